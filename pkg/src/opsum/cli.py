"""Command-line pipeline driver.

Stages are plain batch commands over files: filter -> index -> pseudo /
noisy -> align / stats / oracle / eval / select-sources. Every output
artifact starts with a header line (tool version, config hash, seed) and
a rerun with identical inputs and seed reproduces the file byte for byte.

Options can come from a JSON config file (--config); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from opsum import __version__, artifacts
from opsum.corpus import (
    FilterConfig,
    filter_corpus,
    group_by_entity,
    load_entities,
    load_reviews,
    load_summaries,
)
from opsum.errors import ConfigError, OpsumError, ValidationError
from opsum.metrics import (
    compute_dataset_stats,
    extractive_oracle,
    coverage_score,
    rouge_l,
    rouge_n,
    select_sources_by_coverage,
    split_sentences,
)
from opsum.pairing import (
    PairingConfig,
    TrainingPair,
    build_noisy_pairs,
    build_pseudo_pairs,
    read_pairs,
    write_pairs,
)
from opsum.supervision import AlignmentMode, align_mask
from opsum.textproc import (
    build_index,
    fit_tfidf,
    load_synonyms,
    tokenize,
    vectorize,
)
from opsum.textproc.index import load_snapshot, save_snapshot
from opsum.util import parallel_map

MODES = [m.value for m in AlignmentMode]


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _resolved(args: argparse.Namespace, keys: list[str]) -> dict:
    """Merge config-file values and CLI flags (flags win) for ``keys``."""
    from_file = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                from_file = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: invalid JSON: {exc.msg}") from exc
        if not isinstance(from_file, dict):
            raise ConfigError(f"{args.config}: config must be a JSON object")
    resolved = {}
    for key in keys:
        value = getattr(args, key, None)
        if value is None and key in from_file:
            value = from_file[key]
        resolved[key] = value
    return resolved


def _require(resolved: dict, *keys: str) -> None:
    for key in keys:
        if resolved[key] is None:
            raise ConfigError(f"missing required option --{key.replace('_', '-')}")


def _json_report(path, body: dict, cfg_hash: str, seed: int) -> None:
    """Header line + one JSON body line."""
    with open(path, "w", encoding="utf-8") as fh:
        artifacts.write_jsonl_header(fh, cfg_hash, seed)
        fh.write(json.dumps(body, sort_keys=True, ensure_ascii=False) + "\n")


def read_json_report(path) -> dict:
    """Read back a report written by :func:`_json_report`."""
    for _, obj in artifacts.iter_jsonl(path):
        return obj
    raise ValidationError(f"{path}: report has no body")


def _load_lexicon_if_needed(mode: AlignmentMode, synonyms_path):
    if mode is AlignmentMode.WORD_STEM_SYNONYM:
        if not synonyms_path:
            raise ConfigError("--synonyms is required for mode word_stem_synonym")
        return load_synonyms(synonyms_path)
    return None


def _attach_masks(pairs: list[TrainingPair], mode: AlignmentMode, lexicon) -> None:
    for pair in pairs:
        sources = [tokenize(text) for text in pair.source_texts]
        pair.mask = align_mask(pair.summary_tokens, sources, mode, lexicon)
        pair.mask_mode = mode.value


def cmd_filter(args) -> int:
    cfg = _resolved(args, [
        "reviews", "entities", "summaries", "out", "report",
        "min_avg_stars", "required_stars", "min_reviews_per_entity",
        "allowed_categories", "seed",
    ])
    _require(cfg, "reviews", "entities", "out")
    seed = cfg["seed"] or 0
    excluded = frozenset()
    if cfg["summaries"]:
        excluded = frozenset(s.entity_id for s in load_summaries(cfg["summaries"]))
    categories = cfg["allowed_categories"] or "restaurant,food"
    if isinstance(categories, str):
        categories = [c.strip() for c in categories.split(",") if c.strip()]
    filter_cfg = FilterConfig(
        min_avg_stars=float(cfg["min_avg_stars"] if cfg["min_avg_stars"] is not None else 4.0),
        required_review_stars=int(cfg["required_stars"] if cfg["required_stars"] is not None else 5),
        min_reviews_per_entity=int(
            cfg["min_reviews_per_entity"] if cfg["min_reviews_per_entity"] is not None else 10
        ),
        allowed_categories=frozenset(c.lower() for c in categories),
        excluded_entity_ids=excluded,
    )
    reviews = load_reviews(cfg["reviews"])
    entities = load_entities(cfg["entities"])
    kept, report = filter_corpus(reviews, entities, filter_cfg)
    cfg_hash = artifacts.config_hash({**cfg, "command": "filter"})
    with open(cfg["out"], "w", encoding="utf-8") as fh:
        artifacts.write_jsonl_header(fh, cfg_hash, seed)
        for review in kept:
            fh.write(json.dumps({
                "review_id": review.review_id,
                "entity_id": review.entity_id,
                "stars": review.stars,
                "text": review.text,
            }, ensure_ascii=False) + "\n")
    report_path = cfg["report"] or str(Path(cfg["out"]).with_suffix(".report.txt"))
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(artifacts.text_header(cfg_hash, seed) + "\n")
        fh.write(report.as_text() + "\n")
    print(f"kept {report.total_out} of {report.total_in} reviews")
    return 0


def cmd_index(args) -> int:
    cfg = _resolved(args, ["reviews", "out", "seed", "workers"])
    _require(cfg, "reviews", "out")
    reviews = load_reviews(cfg["reviews"])
    if not reviews:
        raise ValidationError("cannot index an empty corpus")
    workers = int(cfg["workers"] or 1)
    docs = parallel_map(lambda r: tokenize(r.text), reviews, workers)
    model = fit_tfidf(docs)
    vectors = parallel_map(lambda d: vectorize(model, d), docs, workers)
    entity_of = {r.review_id: r.entity_id for r in reviews}
    index = build_index([r.review_id for r in reviews], vectors, entity_of)
    save_snapshot(cfg["out"], model, index)
    print(f"indexed {len(index)} reviews, vocabulary {len(model.vocabulary)}")
    return 0


def cmd_pseudo(args) -> int:
    cfg = _resolved(args, [
        "reviews", "index", "out", "n_sources", "top_k", "seed", "workers",
    ])
    _require(cfg, "reviews", "index", "out")
    seed = int(cfg["seed"] or 0)
    pairing_cfg = PairingConfig(
        n_sources=int(cfg["n_sources"] or 8),
        top_k=int(cfg["top_k"] or 100_000),
        seed=seed,
    )
    model, _ = load_snapshot(cfg["index"])
    groups = group_by_entity(load_reviews(cfg["reviews"]))
    workers = int(cfg["workers"] or 1)
    pairs, skipped = build_pseudo_pairs(groups, model, pairing_cfg, workers=workers)
    if skipped:
        _warn(f"skipped {skipped} singleton entity group(s)")
    cfg_hash = artifacts.config_hash({**cfg, "command": "pseudo"})
    write_pairs(cfg["out"], pairs, cfg_hash, seed)
    print(f"wrote {len(pairs)} pseudo pairs")
    return 0


def cmd_noisy(args) -> int:
    cfg = _resolved(args, [
        "reviews", "summaries", "index", "synonyms", "out", "mode",
        "n_sources", "noisy_per_summary", "seed",
    ])
    _require(cfg, "reviews", "summaries", "index", "out")
    seed = int(cfg["seed"] or 0)
    mode = AlignmentMode(cfg["mode"] or "word")
    lexicon = _load_lexicon_if_needed(mode, cfg["synonyms"])
    pairing_cfg = PairingConfig(
        n_sources=int(cfg["n_sources"] or 8),
        noisy_pairs_per_summary=int(cfg["noisy_per_summary"] or 10),
        seed=seed,
    )
    model, index = load_snapshot(cfg["index"])
    groups = group_by_entity(load_reviews(cfg["reviews"]))
    summaries = load_summaries(cfg["summaries"])
    pairs, skipped = build_noisy_pairs(summaries, groups, model, index, pairing_cfg)
    if skipped:
        _warn(f"skipped {skipped} summaries with zero tf-idf vectors")
    produced = {p.summary_id for p in pairs}
    for summary in summaries:
        if summary.summary_id not in produced:
            _warn(f"summary {summary.summary_id}: no pairs produced")
    _attach_masks(pairs, mode, lexicon)
    cfg_hash = artifacts.config_hash({**cfg, "command": "noisy"})
    write_pairs(cfg["out"], pairs, cfg_hash, seed)
    print(f"wrote {len(pairs)} noisy pairs for {len(summaries)} summaries")
    return 0


def cmd_align(args) -> int:
    cfg = _resolved(args, ["pairs", "out", "mode", "synonyms", "seed"])
    _require(cfg, "pairs", "out", "mode")
    seed = int(cfg["seed"] or 0)
    mode = AlignmentMode(cfg["mode"])
    lexicon = _load_lexicon_if_needed(mode, cfg["synonyms"])
    pairs = read_pairs(cfg["pairs"])
    _attach_masks(pairs, mode, lexicon)
    cfg_hash = artifacts.config_hash({**cfg, "command": "align"})
    write_pairs(cfg["out"], pairs, cfg_hash, seed)
    print(f"re-masked {len(pairs)} pairs under mode {mode.value}")
    return 0


def cmd_stats(args) -> int:
    cfg = _resolved(args, ["pairs", "out", "text_out", "max_oracle_sentences", "seed"])
    _require(cfg, "pairs", "out")
    seed = int(cfg["seed"] or 0)
    pairs = read_pairs(cfg["pairs"])
    if not pairs:
        raise ValidationError("pair file contains no pairs")
    examples = [
        (p.summary_tokens, [tokenize(t) for t in p.source_texts]) for p in pairs
    ]
    stats = compute_dataset_stats(
        examples, max_oracle_sentences=int(cfg["max_oracle_sentences"] or 16)
    )
    cfg_hash = artifacts.config_hash({**cfg, "command": "stats"})
    _json_report(cfg["out"], stats.as_dict(), cfg_hash, seed)
    text = stats.as_text()
    if cfg["text_out"]:
        with open(cfg["text_out"], "w", encoding="utf-8") as fh:
            fh.write(artifacts.text_header(cfg_hash, seed) + "\n")
            fh.write(text + "\n")
    print(text)
    return 0


def cmd_oracle(args) -> int:
    cfg = _resolved(args, ["pairs", "out", "max_sentences", "seed"])
    _require(cfg, "pairs", "out")
    seed = int(cfg["seed"] or 0)
    max_sentences = int(cfg["max_sentences"] or 16)
    pairs = read_pairs(cfg["pairs"])
    if not pairs:
        raise ValidationError("pair file contains no pairs")
    per_pair = []
    totals = [0.0, 0.0, 0.0]
    for pair in pairs:
        sentences = [
            sent
            for text in pair.source_texts
            for sent in split_sentences(tokenize(text))
        ]
        result = extractive_oracle(sentences, pair.summary_tokens, max_sentences)
        per_pair.append({
            "pair_id": pair.pair_id,
            "selected": result.selected_sentence_indices,
            "rouge1_f1": result.rouge1.f1,
            "rouge2_f1": result.rouge2.f1,
            "rouge_l_f1": result.rouge_l.f1,
        })
        totals[0] += result.rouge1.f1
        totals[1] += result.rouge2.f1
        totals[2] += result.rouge_l.f1
    body = {
        "pairs": per_pair,
        "mean": {
            "rouge1_f1": totals[0] / len(pairs),
            "rouge2_f1": totals[1] / len(pairs),
            "rouge_l_f1": totals[2] / len(pairs),
        },
    }
    cfg_hash = artifacts.config_hash({**cfg, "command": "oracle"})
    _json_report(cfg["out"], body, cfg_hash, seed)
    print(f"oracle over {len(pairs)} pairs: R1 {body['mean']['rouge1_f1']:.4f}")
    return 0


def _read_lines(path) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if lines and lines[0].startswith("#"):
        lines = lines[1:]
    return lines


def cmd_eval(args) -> int:
    cfg = _resolved(args, ["hyp", "ref", "out", "seed"])
    _require(cfg, "hyp", "ref", "out")
    seed = int(cfg["seed"] or 0)
    hyps = _read_lines(cfg["hyp"])
    refs = _read_lines(cfg["ref"])
    if len(hyps) != len(refs):
        raise ValidationError(
            f"hyp/ref line count mismatch: {len(hyps)} != {len(refs)}"
        )
    if not hyps:
        raise ValidationError("empty evaluation input")
    keys = ("rouge1", "rouge2", "rouge_l")
    sums = {k: [0.0, 0.0, 0.0] for k in keys}
    for hyp_line, ref_line in zip(hyps, refs):
        hyp, ref = tokenize(hyp_line), tokenize(ref_line)
        for key, score in zip(
            keys, (rouge_n(hyp, ref, 1), rouge_n(hyp, ref, 2), rouge_l(hyp, ref))
        ):
            sums[key][0] += score.precision
            sums[key][1] += score.recall
            sums[key][2] += score.f1
    n = len(hyps)
    body = {
        key: {
            "precision": sums[key][0] / n,
            "recall": sums[key][1] / n,
            "f1": sums[key][2] / n,
        }
        for key in keys
    }
    body["examples"] = n
    cfg_hash = artifacts.config_hash({**cfg, "command": "eval"})
    _json_report(cfg["out"], body, cfg_hash, seed)
    print(
        f"rouge1 {body['rouge1']['f1']:.4f} rouge2 {body['rouge2']['f1']:.4f} "
        f"rougeL {body['rouge_l']['f1']:.4f} over {n} examples"
    )
    return 0


def cmd_select_sources(args) -> int:
    cfg = _resolved(args, ["reviews", "summaries", "out", "token_budget", "seed"])
    _require(cfg, "reviews", "summaries", "out")
    seed = int(cfg["seed"] or 0)
    budget = int(cfg["token_budget"] or 1024)
    groups = {g.entity_id: g for g in group_by_entity(load_reviews(cfg["reviews"]))}
    summaries = load_summaries(cfg["summaries"])
    out_pairs: list[TrainingPair] = []
    for summary in summaries:
        group = groups.get(summary.entity_id)
        if group is None:
            _warn(f"summary {summary.summary_id}: no reviews for its entity")
            continue
        ref = tokenize(summary.text)
        chosen = select_sources_by_coverage(group.reviews, ref, budget, seed)
        position = {r.review_id: i for i, r in enumerate(group.reviews)}
        canonical = sorted(chosen, key=lambda r: position[r.review_id])
        coverage = coverage_score([tokenize(r.text) for r in canonical], ref)
        out_pairs.append(
            TrainingPair(
                pair_id=f"supervised-{summary.summary_id}",
                summary_id=summary.summary_id,
                summary_text=summary.text,
                summary_tokens=ref,
                source_review_ids=[r.review_id for r in chosen],
                source_texts=[r.text for r in chosen],
                score=coverage,
                kind="supervised",
            )
        )
    cfg_hash = artifacts.config_hash({**cfg, "command": "select-sources"})
    write_pairs(cfg["out"], out_pairs, cfg_hash, seed)
    print(f"selected sources for {len(out_pairs)} of {len(summaries)} summaries")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opsum",
        description="Weakly supervised opinion summarization data pipeline",
    )
    parser.add_argument("--version", action="version", version=f"opsum {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--seed", type=int, help="seed recorded in artifact headers")
        p.set_defaults(func=func)
        return p

    p = add("filter", cmd_filter, "apply corpus preprocessing filters")
    p.add_argument("--reviews")
    p.add_argument("--entities")
    p.add_argument("--summaries", help="summary set whose entities get excluded")
    p.add_argument("--out", help="filtered review JSONL")
    p.add_argument("--report", help="filter report path (default: <out>.report.txt)")
    p.add_argument("--min-avg-stars", dest="min_avg_stars", type=float)
    p.add_argument("--required-stars", dest="required_stars", type=int)
    p.add_argument("--min-reviews-per-entity", dest="min_reviews_per_entity", type=int)
    p.add_argument("--allowed-categories", dest="allowed_categories",
                   help="comma-separated category tags")

    p = add("index", cmd_index, "fit tf-idf and build the retrieval index")
    p.add_argument("--reviews")
    p.add_argument("--out", help="snapshot file")
    p.add_argument("--workers", type=int)

    p = add("pseudo", cmd_pseudo, "build within-entity pseudo pairs")
    p.add_argument("--reviews")
    p.add_argument("--index")
    p.add_argument("--out")
    p.add_argument("--n-sources", dest="n_sources", type=int)
    p.add_argument("--top-k", dest="top_k", type=int)
    p.add_argument("--workers", type=int)

    p = add("noisy", cmd_noisy, "build cross-entity noisy pairs with masks")
    p.add_argument("--reviews")
    p.add_argument("--summaries")
    p.add_argument("--index")
    p.add_argument("--synonyms")
    p.add_argument("--out")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--n-sources", dest="n_sources", type=int)
    p.add_argument("--noisy-per-summary", dest="noisy_per_summary", type=int)

    p = add("align", cmd_align, "re-mask an existing pair file")
    p.add_argument("--pairs")
    p.add_argument("--out")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--synonyms")

    p = add("stats", cmd_stats, "dataset statistics table")
    p.add_argument("--pairs")
    p.add_argument("--out", help="JSON report")
    p.add_argument("--text-out", dest="text_out", help="aligned text table")
    p.add_argument("--max-oracle-sentences", dest="max_oracle_sentences", type=int)

    p = add("oracle", cmd_oracle, "greedy extractive oracle scores")
    p.add_argument("--pairs")
    p.add_argument("--out")
    p.add_argument("--max-sentences", dest="max_sentences", type=int)

    p = add("eval", cmd_eval, "ROUGE of hypothesis vs reference files")
    p.add_argument("--hyp")
    p.add_argument("--ref")
    p.add_argument("--out")

    p = add("select-sources", cmd_select_sources,
            "coverage-maximizing source selection per summary")
    p.add_argument("--reviews")
    p.add_argument("--summaries")
    p.add_argument("--out")
    p.add_argument("--token-budget", dest="token_budget", type=int)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OpsumError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"io-error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
