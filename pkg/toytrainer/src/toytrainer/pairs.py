"""Reader for the pipeline's pair JSONL format.

Only the fields the trainer needs are materialized. The first line may be
a header object keyed ``_header``; it is skipped, as are blank lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass
class Pair:
    pair_id: str
    summary_text: str
    summary_tokens: list[str]
    source_texts: list[str]
    mask: list[int] | None


def read_pair_file(path) -> list[Pair]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if isinstance(obj, dict) and "_header" in obj:
                continue
            tokens = [str(t) for t in obj["summary_tokens"]]
            mask = obj.get("mask")
            if mask is not None:
                mask = [int(v) for v in mask]
                if len(mask) != len(tokens):
                    raise ValueError(
                        f"{path}:{line_no}: mask length {len(mask)} does not match "
                        f"summary token count {len(tokens)}"
                    )
                if any(v not in (0, 1) for v in mask):
                    raise ValueError(f"{path}:{line_no}: mask values must be 0 or 1")
            pairs.append(
                Pair(
                    pair_id=str(obj["pair_id"]),
                    summary_text=str(obj["summary_text"]),
                    summary_tokens=tokens,
                    source_texts=[str(t) for t in obj["source_texts"]],
                    mask=mask,
                )
            )
    return pairs
