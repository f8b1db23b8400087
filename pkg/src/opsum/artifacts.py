"""Headers and JSONL helpers shared by every pipeline artifact.

Each artifact file starts with one header line carrying tool version,
config hash and seed, so a file is traceable to the exact invocation that
produced it. JSONL artifacts use a JSON header object keyed ``_header``;
plain-text artifacts use a ``#`` comment line with the same fields.
"""

from __future__ import annotations

import hashlib
import json

from opsum import __version__
from opsum.errors import ParseError

HEADER_KEY = "_header"


def config_hash(config: dict) -> str:
    """Stable short hash of a resolved configuration mapping."""
    canon = json.dumps(config, sort_keys=True, ensure_ascii=False, default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def header_dict(cfg_hash: str, seed: int) -> dict:
    return {
        HEADER_KEY: {
            "tool": "opsum",
            "version": __version__,
            "config_hash": cfg_hash,
            "seed": seed,
        }
    }


def write_jsonl_header(fh, cfg_hash: str, seed: int) -> None:
    fh.write(json.dumps(header_dict(cfg_hash, seed), sort_keys=True) + "\n")


def text_header(cfg_hash: str, seed: int) -> str:
    return f"# opsum v{__version__} config_hash={cfg_hash} seed={seed}"


def is_header(obj) -> bool:
    return isinstance(obj, dict) and HEADER_KEY in obj


def iter_jsonl(path):
    """Yield (line_no, record) from a JSONL file, skipping the header line.

    Raises :class:`ParseError` on undecodable or non-JSON lines.
    """
    with open(path, "rb") as fh:
        for line_no, raw in enumerate(fh, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise ParseError(path, line_no, f"invalid UTF-8: {exc}") from exc
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, f"invalid JSON: {exc.msg}") from exc
            if line_no == 1 and is_header(obj):
                continue
            yield line_no, obj


def read_header(path) -> dict | None:
    """Return the header of an artifact file, or None when absent."""
    with open(path, "rb") as fh:
        first = fh.readline().decode("utf-8", errors="replace").strip()
    if first.startswith("#"):
        return {"raw": first}
    try:
        obj = json.loads(first)
    except json.JSONDecodeError:
        return None
    return obj[HEADER_KEY] if is_header(obj) else None
