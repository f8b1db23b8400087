"""Training loop, validation via the pipeline CLI, and curve output.

Validation ROUGE-1 is computed by shelling out to ``opsum eval`` so the
metric definition lives in exactly one place. Each run writes a CSV of
(epoch, loss, val_rouge1) plus a PNG plot.
"""

from __future__ import annotations

import csv
import json
import random
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import torch

from toytrainer.model import (
    BOS,
    EOS,
    PAD,
    SEP_TOKEN,
    ToyModel,
    Vocab,
    masked_sequence_nll,
)
from toytrainer.pairs import Pair, read_pair_file


@dataclass
class TrainConfig:
    embed_dim: int = 96
    hidden: int = 128
    batch_size: int = 64
    learning_rate: float = 3e-3
    max_src_len: int = 48
    max_tgt_len: int = 24
    threads: int = 2


@dataclass
class EpochStats:
    epoch: int
    loss: float
    val_rouge1: float


@dataclass
class TrainRecord:
    mode: str
    seed: int
    epochs: list[EpochStats] = field(default_factory=list)
    curve_path: Path | None = None
    plot_path: Path | None = None

    @property
    def final_rouge1(self) -> float:
        return self.epochs[-1].val_rouge1

    @property
    def peak_rouge1(self) -> float:
        return max(e.val_rouge1 for e in self.epochs)


def source_tokens(pair: Pair) -> list[str]:
    tokens: list[str] = []
    for i, text in enumerate(pair.source_texts):
        if i:
            tokens.append(SEP_TOKEN)
        tokens.extend(text.split())
    return tokens


def build_vocab(pairs: list[Pair]) -> Vocab:
    tokens: list[str] = []
    for pair in pairs:
        tokens.extend(source_tokens(pair))
        tokens.extend(pair.summary_tokens)
    return Vocab(tokens)


def encode_examples(pairs, vocab, cfg, mode):
    """Tensor-ready (src_ids, dec_in, labels, mask) per pair."""
    examples = []
    for pair in pairs:
        src = vocab.encode(source_tokens(pair))[: cfg.max_src_len]
        tgt = vocab.encode(pair.summary_tokens)[: cfg.max_tgt_len - 1]
        if mode == "masked":
            token_mask = list(pair.mask[: len(tgt)])
        else:
            token_mask = [1] * len(tgt)
        dec_in = [BOS] + tgt
        labels = tgt + [EOS]
        mask = token_mask + [1]  # EOS is always supervised
        examples.append((src, dec_in, labels, mask))
    return examples


def pad_batch(examples, device="cpu"):
    src_len = max(len(e[0]) for e in examples)
    tgt_len = max(len(e[1]) for e in examples)
    src = torch.full((len(examples), src_len), PAD, dtype=torch.long)
    dec_in = torch.full((len(examples), tgt_len), PAD, dtype=torch.long)
    labels = torch.full((len(examples), tgt_len), PAD, dtype=torch.long)
    mask = torch.zeros((len(examples), tgt_len), dtype=torch.float32)
    for row, (s, d, l, m) in enumerate(examples):
        src[row, : len(s)] = torch.tensor(s, dtype=torch.long)
        dec_in[row, : len(d)] = torch.tensor(d, dtype=torch.long)
        labels[row, : len(l)] = torch.tensor(l, dtype=torch.long)
        mask[row, : len(m)] = torch.tensor(m, dtype=torch.float32)
    return (src.to(device), dec_in.to(device), labels.to(device), mask.to(device))


def rouge1_via_pipeline(hyps: list[str], refs: list[str], workdir) -> float:
    """Score hypotheses with the pipeline's eval command."""
    workdir = Path(workdir)
    hyp_path = workdir / "hyp.txt"
    ref_path = workdir / "ref.txt"
    out_path = workdir / "eval.json"
    hyp_path.write_text("\n".join(hyps) + "\n", encoding="utf-8")
    ref_path.write_text("\n".join(refs) + "\n", encoding="utf-8")
    proc = subprocess.run(
        [sys.executable, "-m", "opsum", "eval",
         "--hyp", str(hyp_path), "--ref", str(ref_path), "--out", str(out_path)],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(f"opsum eval failed: {proc.stderr.strip()}")
    with open(out_path, "r", encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            if "_header" in obj:
                continue
            return float(obj["rouge1"]["f1"])
    raise RuntimeError("opsum eval produced no report body")


def validate(model, val_pairs, vocab, cfg, workdir) -> float:
    model.eval()
    hyps = []
    for start in range(0, len(val_pairs), 256):
        chunk = val_pairs[start : start + 256]
        encoded = [vocab.encode(source_tokens(p))[: cfg.max_src_len] for p in chunk]
        src_len = max(len(s) for s in encoded)
        src = torch.full((len(chunk), src_len), PAD, dtype=torch.long)
        for row, ids in enumerate(encoded):
            src[row, : len(ids)] = torch.tensor(ids, dtype=torch.long)
        for ids in model.greedy_decode(src, max_len=cfg.max_tgt_len):
            hyps.append(" ".join(vocab.decode(ids)))
    refs = [p.summary_text for p in val_pairs]
    model.train()
    return rouge1_via_pipeline(hyps, refs, workdir)


def train(
    pairs_path,
    mode: str,
    epochs: int,
    seed: int,
    val_pairs_path,
    out_dir,
    cfg: TrainConfig | None = None,
) -> TrainRecord:
    """Train on a pair file and track validation quality per epoch.

    mode "masked" optimizes the per-token masked loss from the pair
    file; mode "unmasked" supervises every target token.
    """
    if mode not in ("masked", "unmasked"):
        raise ValueError(f"unknown mode {mode!r}")
    cfg = cfg or TrainConfig()
    torch.set_num_threads(cfg.threads)
    torch.manual_seed(seed)

    train_pairs = read_pair_file(pairs_path)
    val_pairs = read_pair_file(val_pairs_path)
    if not train_pairs:
        raise ValueError("empty training pair file")
    if mode == "masked":
        missing = [p.pair_id for p in train_pairs if p.mask is None]
        if missing:
            raise ValueError(f"masked mode needs masks; missing on {missing[0]}")

    vocab = build_vocab(train_pairs)
    model = ToyModel(len(vocab), embed_dim=cfg.embed_dim, hidden=cfg.hidden)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    examples = encode_examples(train_pairs, vocab, cfg, mode)
    shuffle_rng = random.Random(seed)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    record = TrainRecord(mode=mode, seed=seed)
    with tempfile.TemporaryDirectory(prefix="toytrainer-eval-") as evaldir:
        for epoch in range(1, epochs + 1):
            order = list(range(len(examples)))
            shuffle_rng.shuffle(order)
            total_loss = 0.0
            batches = 0
            for start in range(0, len(order), cfg.batch_size):
                batch = [examples[i] for i in order[start : start + cfg.batch_size]]
                src, dec_in, labels, mask = pad_batch(batch)
                log_probs = model.log_probs(src, dec_in)
                loss = masked_sequence_nll(log_probs, labels, mask)
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                total_loss += float(loss.detach())
                batches += 1
            val_rouge1 = validate(model, val_pairs, vocab, cfg, evaldir)
            record.epochs.append(
                EpochStats(epoch=epoch, loss=total_loss / batches, val_rouge1=val_rouge1)
            )

    record.curve_path = out_dir / f"curve_{mode}_seed{seed}.csv"
    with open(record.curve_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "loss", "val_rouge1"])
        for stats in record.epochs:
            writer.writerow([stats.epoch, f"{stats.loss:.6f}", f"{stats.val_rouge1:.6f}"])
    record.plot_path = out_dir / f"curve_{mode}_seed{seed}.png"
    _plot(record)
    return record


def _plot(record: TrainRecord) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    epochs = [e.epoch for e in record.epochs]
    fig, ax1 = plt.subplots(figsize=(6, 4))
    ax1.plot(epochs, [e.val_rouge1 for e in record.epochs],
             color="tab:orange", marker="o", label="val ROUGE-1 F1")
    ax1.set_xlabel("epoch")
    ax1.set_ylabel("val ROUGE-1 F1")
    ax1.set_ylim(0, 1)
    ax2 = ax1.twinx()
    ax2.plot(epochs, [e.loss for e in record.epochs],
             color="tab:blue", alpha=0.6, label="train loss")
    ax2.set_ylabel("train loss")
    ax1.set_title(f"{record.mode} (seed {record.seed})")
    fig.tight_layout()
    fig.savefig(record.plot_path, dpi=100)
    plt.close(fig)
