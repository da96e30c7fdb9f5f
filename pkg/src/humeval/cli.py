"""Batch evaluation CLI: score, align, agreement, self-test."""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click

from . import __version__
from .agreement import (DEFAULT_MATCH_THRESHOLD, LabelMatrix, group_pa,
                        majority_labels, model_labels_from_quotes, pairwise_pa)
from .alignment import AlignmentConfig, align_ground_truth, filter_laughter
from .corpus import (QuoteSet, load_corpus, load_laughter, load_quote_sets,
                     load_rater_labels, save_quote_sets)
from .embedding import (DeterministicEmbedder, HTTPProvider,
                        PrecomputedFileProvider, pairwise_similarity_fn)
from .errors import HumevalError
from .fuzzy import FuzzyConfig, fuzzy_similarity
from .scoring import score_quote_sets
from .subspace import score_subspace_module

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_STRICT_SKIP = 2


def _emit(report: dict, out, as_csv: bool) -> None:
    if as_csv:
        text = _report_to_csv(report)
    else:
        text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _report_to_csv(report: dict) -> str:
    buf = io.StringIO()
    rows = report.get("per_transcript", [])
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def _display(score: float, percent: bool) -> float:
    return round(score * 100, 6) if percent else score


def _make_provider(provider, dim, precomputed, base_url, api_key,
                   timeout_s, retries, cache_dir):
    if precomputed:
        return PrecomputedFileProvider(precomputed)
    if provider == "http" or (provider == "auto" and base_url):
        if not base_url:
            raise click.UsageError("http provider requires --base-url or EMBED_BASE_URL")
        return HTTPProvider(base_url, api_key=api_key, timeout_s=timeout_s,
                            retries=retries, cache_dir=cache_dir)
    return DeterministicEmbedder(dim)


@click.group()
@click.version_option(version=__version__)
def main():
    """Score humor-detection outputs against laughter-derived ground truth."""


@main.command("score")
@click.option("--module", type=click.Choice(["fuzzy", "embed", "subspace"]),
              default="fuzzy", show_default=True)
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--predictions", "predictions_path", required=True,
              type=click.Path(exists=True))
@click.option("--ground-truth", "ground_truth_path", required=True,
              type=click.Path(exists=True))
@click.option("--alpha", default=0.1, show_default=True)
@click.option("--threshold", default=None, type=float,
              help="Optional minimum best-match similarity; below it a match counts 0.")
@click.option("--q", default=None, type=int, help="Subspace dimension cap.")
@click.option("--r", default=None, type=int, help="Canonical angles used in the score.")
@click.option("--provider", type=click.Choice(["auto", "deterministic", "http"]),
              default="auto", show_default=True)
@click.option("--dim", default=256, show_default=True,
              help="Dimension of the deterministic embedder.")
@click.option("--precomputed", type=click.Path(exists=True), default=None,
              help="JSONL file of precomputed vectors.")
@click.option("--base-url", envvar="EMBED_BASE_URL", default=None)
@click.option("--api-key", envvar="EMBED_API_KEY", default=None)
@click.option("--timeout", "timeout_s", envvar="EMBED_TIMEOUT_S", default=30.0,
              type=float)
@click.option("--retries", envvar="EMBED_RETRIES", default=2, type=int)
@click.option("--cache-dir", default=None, type=click.Path())
@click.option("--jobs", default=os.cpu_count() or 1, show_default="logical cores")
@click.option("--strict", is_flag=True, help="Exit 2 when any transcript is skipped.")
@click.option("--percent", is_flag=True, help="Report scores as percentages.")
@click.option("--csv", "as_csv", is_flag=True)
@click.option("--out", default=None, type=click.Path())
def cmd_score(module, corpus_path, predictions_path, ground_truth_path, alpha,
              threshold, q, r, provider, dim, precomputed, base_url, api_key,
              timeout_s, retries, cache_dir, jobs, strict, percent, as_csv, out):
    """Score every transcript present in both predictions and ground truth."""
    corpus = {t.id: t for t in load_corpus(corpus_path)}
    ground_truth = {qs.transcript_id: qs for qs in load_quote_sets(ground_truth_path)}
    predictions: dict[str, list[QuoteSet]] = {}
    for qs in load_quote_sets(predictions_path):
        predictions.setdefault(qs.transcript_id, []).append(qs)

    unknown = sorted(set(predictions) - set(corpus))
    for tid in unknown:
        click.echo(f"warning: predictions reference unknown transcript {tid!r}",
                   err=True)
    if unknown and strict:
        sys.exit(EXIT_STRICT_SKIP)

    emb_provider = None
    if module in ("embed", "subspace"):
        emb_provider = _make_provider(provider, dim, precomputed, base_url,
                                      api_key, timeout_s, retries, cache_dir)

    skipped = []
    tasks = []
    for tid in sorted(corpus):
        if tid not in predictions:
            skipped.append({"transcript_id": tid, "reason": "no predictions"})
            continue
        gt = ground_truth.get(tid)
        if gt is None or not gt.quotes:
            skipped.append({"transcript_id": tid, "reason": "no ground truth (k = 0)"})
            continue
        tasks.append((tid, predictions[tid], gt))

    def score_one(task):
        tid, pred_sets, gt = task
        if module == "subspace":
            variations = pred_sets if len(pred_sets) >= 2 else None
            if variations is None:
                return tid, None, "subspace module needs >= 2 instruction variations"
            n = sum(len(qs.quotes) for qs in variations)
            try:
                score = score_subspace_module(variations, gt, emb_provider, q=q, r=r)
            except HumevalError as exc:
                return tid, None, str(exc)
            return tid, {"transcript_id": tid, "score": score, "n": n,
                         "k": len(gt.quotes), "penalty": 0}, None
        merged = QuoteSet(transcript_id=tid, source="model",
                          quotes=tuple(quote for qs in pred_sets for quote in qs.quotes))
        if module == "fuzzy":
            sim = lambda a, b: fuzzy_similarity(a, b, FuzzyConfig(alpha=alpha))
        else:
            sim = pairwise_similarity_fn(emb_provider)
        result = score_quote_sets(merged, gt, sim, alpha=alpha,
                                  match_threshold=threshold)
        return tid, {"transcript_id": tid, "score": result.final_score,
                     "n": len(merged.quotes), "k": len(gt.quotes),
                     "penalty": result.penalty_count}, None

    per_transcript = []
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        for tid, row, err in pool.map(score_one, tasks):
            if err is not None:
                skipped.append({"transcript_id": tid, "reason": err})
            else:
                per_transcript.append(row)
    per_transcript.sort(key=lambda r: r["transcript_id"])

    scores = [row["score"] for row in per_transcript]
    for row in per_transcript:
        row["score"] = _display(row["score"], percent)
    report = {
        "tool_version": __version__,
        "config": {
            "module": module, "alpha": alpha, "threshold": threshold,
            "q": q, "r": r,
            "provider": emb_provider.name if emb_provider else None,
            "corpus": str(corpus_path), "predictions": str(predictions_path),
            "ground_truth": str(ground_truth_path),
            "percent": percent, "strict": strict,
        },
        "per_transcript": per_transcript,
        "skipped": sorted(skipped, key=lambda r: r["transcript_id"]),
        "aggregate": _display(sum(scores) / len(scores), percent) if scores else None,
    }
    _emit(report, out, as_csv)
    if strict and skipped:
        sys.exit(EXIT_STRICT_SKIP)


@main.command("align")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--laughter", "laughter_path", required=True,
              type=click.Path(exists=True))
@click.option("--min-laughter-s", default=0.2, show_default=True)
@click.option("--min-probability", default=0.5, show_default=True)
@click.option("--max-lag-s", default=3.0, show_default=True)
@click.option("--strict-preceding", is_flag=True,
              help="Attribute only to the sentence ending before the onset.")
@click.option("--out", required=True, type=click.Path())
def cmd_align(corpus_path, laughter_path, min_laughter_s, min_probability,
              max_lag_s, strict_preceding, out):
    """Derive ground-truth quote sets from laughter events."""
    cfg = AlignmentConfig(min_laughter_s=min_laughter_s,
                          min_probability=min_probability,
                          max_lag_s=max_lag_s,
                          strict_preceding=strict_preceding)
    corpus = load_corpus(corpus_path)
    laughter = load_laughter(laughter_path)
    results = []
    for t in corpus:
        events = filter_laughter(laughter.get(t.id, []), cfg)
        gt = align_ground_truth(t, events, cfg)
        if not gt.quotes:
            click.echo(f"warning: transcript {t.id!r} has empty ground truth",
                       err=True)
        results.append(gt)
    save_quote_sets(results, out)


@main.command("agreement")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True))
@click.option("--predictions", "predictions_path", default=None,
              type=click.Path(exists=True))
@click.option("--threshold", default=DEFAULT_MATCH_THRESHOLD, show_default=True,
              help="Fuzzy similarity needed to map a quote onto a sentence.")
@click.option("--mean-over-raters", is_flag=True,
              help="Human-machine PA as the mean over raters instead of vs majority.")
@click.option("--percent", is_flag=True)
@click.option("--csv", "as_csv", is_flag=True)
@click.option("--out", default=None, type=click.Path())
def cmd_agreement(corpus_path, labels_path, predictions_path, threshold,
                  mean_over_raters, percent, as_csv, out):
    """Inter-rater and human-machine Percentage Agreement."""
    corpus = {t.id: t for t in load_corpus(corpus_path)}
    all_labels = load_rater_labels(labels_path)
    predictions: dict[str, list[QuoteSet]] = {}
    if predictions_path:
        for qs in load_quote_sets(predictions_path):
            predictions.setdefault(qs.transcript_id, []).append(qs)

    per_transcript = []
    for tid in sorted(corpus):
        transcript = corpus[tid]
        rows = [(rl.rater_id, rl.labels) for rl in all_labels
                if rl.transcript_id == tid]
        if not rows:
            continue
        for rid, labels in rows:
            if len(labels) != len(transcript.sentences):
                raise click.ClickException(
                    f"rater {rid!r} has {len(labels)} labels for transcript "
                    f"{tid!r} with {len(transcript.sentences)} sentences"
                )
        matrix = LabelMatrix(rater_ids=tuple(r for r, _ in rows),
                             rows=tuple(l for _, l in rows))
        entry = {"transcript_id": tid, "raters": len(rows)}
        if len(rows) >= 2:
            entry["group_pa"] = _display(group_pa(matrix), percent)
        majority = majority_labels(matrix)
        for pred_sets in ([predictions[tid]] if tid in predictions else []):
            merged = QuoteSet(transcript_id=tid, source="model",
                              quotes=tuple(q for qs in pred_sets for q in qs.quotes))
            model_vec = model_labels_from_quotes(merged, transcript, threshold)
            if mean_over_raters:
                pa = sum(pairwise_pa(model_vec, row) for row in matrix.rows)
                pa /= len(matrix.rows)
            else:
                pa = pairwise_pa(model_vec, majority)
            entry["human_machine_pa"] = _display(pa, percent)
        per_transcript.append(entry)

    group_values = [e["group_pa"] for e in per_transcript if "group_pa" in e]
    hm_values = [e["human_machine_pa"] for e in per_transcript
                 if "human_machine_pa" in e]
    report = {
        "tool_version": __version__,
        "config": {
            "corpus": str(corpus_path), "labels": str(labels_path),
            "predictions": str(predictions_path) if predictions_path else None,
            "threshold": threshold, "mean_over_raters": mean_over_raters,
            "percent": percent,
        },
        "per_transcript": per_transcript,
        "aggregate": {
            "group_pa": sum(group_values) / len(group_values) if group_values else None,
            "human_machine_pa": sum(hm_values) / len(hm_values) if hm_values else None,
        },
    }
    _emit(report, out, as_csv)


@main.command("self-test")
def cmd_self_test():
    """Quick built-in sanity checks, no input files needed."""
    from .fuzzy import levenshtein_distance

    checks = [
        ("levenshtein kitten/sitting = 3",
         levenshtein_distance("kitten", "sitting") == 3),
        ("identity fuzzy score = 1.0",
         score_quote_sets(
             QuoteSet("t", "model", ("a joke",)),
             QuoteSet("t", "ground_truth", ("a joke",)),
             fuzzy_similarity).final_score == 1.0),
        ("overgeneration penalty: 3 copies vs 1 truth = 0.8",
         abs(score_quote_sets(
             QuoteSet("t", "model", ("a joke",) * 3),
             QuoteSet("t", "ground_truth", ("a joke",)),
             fuzzy_similarity).final_score - 0.8) < 1e-12),
        ("deterministic embedder is order-free",
         (DeterministicEmbedder(64).embed(["a b"])[0]
          == DeterministicEmbedder(64).embed(["b a"])[0]).all()),
    ]
    failed = 0
    for name, ok in checks:
        click.echo(f"{'PASS' if ok else 'FAIL'}  {name}")
        failed += not ok
    sys.exit(EXIT_OK if failed == 0 else EXIT_USAGE)


if __name__ == "__main__":
    main()
