"""Small attention-based encoder-decoder over word ids.

Sizes stay deliberately tiny (vocab <= 1000, hidden <= 128, one GRU
layer each side). The decoder runs teacher-forced in one shot during
training and step-by-step during greedy decoding. Outputs are
log-softmax distributions, so every position sums to one in probability
space.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

PAD, BOS, EOS, UNK = 0, 1, 2, 3
SPECIALS = ["<pad>", "<bos>", "<eos>", "<unk>"]
SEP_TOKEN = "<sep>"

MAX_VOCAB = 1000
MAX_HIDDEN = 128


class Vocab:
    def __init__(self, tokens):
        uniq = sorted(set(tokens))
        self.itos = SPECIALS + [SEP_TOKEN] + uniq
        if len(self.itos) > MAX_VOCAB:
            raise ValueError(f"vocabulary too large: {len(self.itos)} > {MAX_VOCAB}")
        self.stoi = {tok: i for i, tok in enumerate(self.itos)}

    def __len__(self):
        return len(self.itos)

    def encode(self, tokens):
        return [self.stoi.get(tok, UNK) for tok in tokens]

    def decode(self, ids):
        out = []
        for i in ids:
            if i == EOS:
                break
            if i not in (PAD, BOS):
                out.append(self.itos[i])
        return out


class ToyModel(nn.Module):
    def __init__(self, vocab_size: int, embed_dim: int = 64, hidden: int = 96):
        super().__init__()
        if hidden > MAX_HIDDEN:
            raise ValueError(f"hidden size {hidden} > {MAX_HIDDEN}")
        self.embed = nn.Embedding(vocab_size, embed_dim, padding_idx=PAD)
        self.encoder = nn.GRU(embed_dim, hidden, batch_first=True)
        self.decoder = nn.GRU(embed_dim, hidden, batch_first=True)
        self.out = nn.Linear(2 * hidden, vocab_size)

    def encode(self, src):
        enc_out, enc_h = self.encoder(self.embed(src))
        src_mask = src.ne(PAD)
        return enc_out, enc_h, src_mask

    def _attend(self, dec_out, enc_out, src_mask):
        scores = torch.bmm(dec_out, enc_out.transpose(1, 2))
        scores = scores.masked_fill(~src_mask.unsqueeze(1), float("-inf"))
        context = torch.bmm(torch.softmax(scores, dim=-1), enc_out)
        return context

    def log_probs(self, src, dec_in):
        """Teacher-forced per-position log-distributions (B, T, V)."""
        enc_out, enc_h, src_mask = self.encode(src)
        dec_out, _ = self.decoder(self.embed(dec_in), enc_h)
        context = self._attend(dec_out, enc_out, src_mask)
        logits = self.out(torch.cat([dec_out, context], dim=-1))
        return F.log_softmax(logits, dim=-1)

    @torch.no_grad()
    def greedy_decode(self, src, max_len: int = 24):
        """Batch greedy decoding; returns lists of token ids (no EOS)."""
        enc_out, hidden, src_mask = self.encode(src)
        batch = src.shape[0]
        tokens = torch.full((batch, 1), BOS, dtype=torch.long, device=src.device)
        finished = torch.zeros(batch, dtype=torch.bool, device=src.device)
        outputs = []
        for _ in range(max_len):
            dec_out, hidden = self.decoder(self.embed(tokens), hidden)
            context = self._attend(dec_out, enc_out, src_mask)
            logits = self.out(torch.cat([dec_out, context], dim=-1))
            tokens = logits.argmax(dim=-1)
            outputs.append(tokens.squeeze(1).clone())
            finished |= tokens.squeeze(1).eq(EOS)
            if bool(finished.all()):
                break
        stacked = torch.stack(outputs, dim=1)
        results = []
        for row in stacked.tolist():
            ids = []
            for tok in row:
                if tok == EOS:
                    break
                ids.append(tok)
            results.append(ids)
        return results


def masked_sequence_nll(log_probs, labels, mask):
    """Mean negative log-likelihood over masked-in positions.

    ``mask`` is 0/1 per position (already including padding zeros). With
    an all-zero mask the loss is exactly 0 and carries zero gradient.
    """
    lp = log_probs.gather(-1, labels.unsqueeze(-1)).squeeze(-1)
    weighted = lp * mask
    return -weighted.sum() / mask.sum().clamp(min=1.0)
