"""Command-line entry point.

Exit codes: 0 on success, 1 on any validation or pipeline error, 2 when the
consistency score is undefined (empty basis), so pipelines can tell "model
failed" from "metric undefined".
"""

from __future__ import annotations

import difflib
import json
import os
import sys
from pathlib import Path

import click

from .errors import EmptyBasis, SamError
from . import evaluator as ev
from .generator import (
    GenerationConfig,
    corpus_statistics,
    generate_set,
    load_challenge,
    load_resources,
    write_set,
)
from .quality import quality_report, scan_corpus


@click.group()
def cli():
    """Generate and score aligned challenge sets for extractive reading
    comprehension."""


@cli.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--size", type=int, required=True, help="Number of aligned triples.")
@click.option("--events", type=int, default=6, show_default=True)
@click.option("--max-sam", type=int, default=3, show_default=True)
@click.option("--split", type=click.Choice(["train", "eval", "full"]), default="full", show_default=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--force", is_flag=True, help="Overwrite a non-empty output directory.")
@click.option("--jobs", type=int, default=None, help="Worker processes (default: all cores).")
def generate(seed, size, events, max_sam, split, out_dir, force, jobs):
    """Generate an aligned challenge set."""
    config = GenerationConfig(seed=seed, size=size, events=events, max_sam=max_sam, split=split)
    jobs = jobs if jobs is not None else (os.cpu_count() or 1)
    triples = generate_set(config, jobs=jobs)
    write_set(triples, out_dir, force=force)
    click.echo(f"wrote {len(triples)} aligned triples to {out_dir}")


@cli.command()
@click.option("--challenge", "challenge_dir", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--predictions", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--char-substring", is_flag=True, help="Character-level containment for matching.")
@click.option("--by-category", is_flag=True)
@click.option("--by-n-sam", is_flag=True)
@click.option("--errors", "show_errors", is_flag=True, help="Include the baseline-copy error analysis.")
@click.option("--report", "report_dir", type=click.Path(path_type=Path), default=None,
              help="Write report.json, breakdown.csv and figures to this directory.")
def evaluate(challenge_dir, predictions, k, alpha, char_substring, by_category, by_n_sam,
             show_errors, report_dir):
    """Score a prediction file against a challenge set."""
    challenge = load_challenge(challenge_dir)
    preds = ev.load_predictions(predictions)
    cfg = ev.EvalConfig(k=k, alpha=alpha, char_substring=char_substring)
    result = ev.dice(challenge, preds, cfg)
    errors = None
    if show_errors:
        try:
            errors = ev.error_analysis(challenge, preds, cfg)
        except SamError as exc:
            click.echo(f"error analysis unavailable: {exc}", err=True)

    click.echo(f"n={result.n}  missing={result.missing}")
    click.echo(f"acc  baseline={result.acc_b:.3f}  intervention={result.acc_i:.3f}  control={result.acc_c:.3f}")
    click.echo(f"dice={result.dice:.3f} +/- {result.ci:.3f}  (basis {result.n_basis})")
    if by_category:
        for cat, score in result.by_category.items():
            click.echo(f"  {cat}: {_fmt_score(score)}")
    if by_n_sam:
        for n_sam, score in result.by_n_sam.items():
            click.echo(f"  {n_sam} insertion(s): {_fmt_score(score)}")
    if errors is not None:
        click.echo(
            f"baseline-copy errors: {errors.fraction:.3f} +/- {errors.ci:.3f} over {errors.n}"
        )
    if report_dir is not None:
        from .report import write_report

        for path in write_report(result, report_dir, errors):
            click.echo(f"wrote {path}")
    else:
        click.echo(json.dumps(ev.result_to_dict(result, errors)))


def _fmt_score(score) -> str:
    if score.dice is None:
        return f"undefined (basis 0, n {score.n})"
    return f"{score.dice:.3f} +/- {score.ci:.3f} (basis {score.n_basis}, n {score.n})"


@cli.command()
@click.option("--challenge", "challenge_dir", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--predictions-a", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--predictions-b", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
def compare(challenge_dir, predictions_a, predictions_b, k, alpha):
    """Exact significance test between two prediction files."""
    challenge = load_challenge(challenge_dir)
    cfg = ev.EvalConfig(k=k, alpha=alpha)
    result_a = ev.dice(challenge, ev.load_predictions(predictions_a), cfg)
    result_b = ev.dice(challenge, ev.load_predictions(predictions_b), cfg)
    fisher = ev.fisher_compare(result_a, result_b)
    click.echo(f"dice A = {result_a.dice:.3f} (basis {result_a.n_basis})")
    click.echo(f"dice B = {result_b.dice:.3f} (basis {result_b.n_basis})")
    note = "  [degenerate table]" if fisher.degenerate else ""
    click.echo(f"two-sided p = {fisher.p_value:.6g}{note}")


@cli.command()
@click.option("--type", "kind", type=click.Choice(["random", "informed"]), required=True)
@click.option("--challenge", "challenge_dir", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_file", type=click.Path(path_type=Path), required=True)
def baseline(kind, challenge_dir, seed, out_file):
    """Write a random or answer-type-informed baseline prediction file."""
    challenge = load_challenge(challenge_dir)
    fn = ev.baseline_random if kind == "random" else ev.baseline_informed
    ev.save_predictions(fn(challenge, seed), out_file)
    click.echo(f"wrote {kind} baseline predictions to {out_file}")


@cli.command()
@click.option("--challenge", "challenge_dir", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--pairs", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--report", "report_dir", type=click.Path(path_type=Path), default=None)
def quality(challenge_dir, pairs, seed, report_dir):
    """Lexical similarity and naturality of the baseline passages."""
    challenge = load_challenge(challenge_dir)
    paragraphs = [t.baseline.context for t in challenge.triples]
    rep = quality_report(paragraphs, sample_pairs=pairs, seed=seed)
    payload = {
        "lexical_similarity": rep.lexical_similarity,
        "naturality": rep.naturality,
        "n": rep.n,
        "indices": rep.indices,
    }
    click.echo(json.dumps(payload, indent=2))
    if report_dir is not None:
        from .quality import jaccard
        from .report import similarity_figure
        from .textutil import word_tokens
        import random as _random

        rng = _random.Random(seed)
        sets = [set(w.lower() for w in word_tokens(p)) for p in paragraphs]
        sims = [
            jaccard(*(sets[i] for i in rng.sample(range(len(sets)), 2))) for _ in range(pairs)
        ]
        path = similarity_figure(sims, Path(report_dir) / "similarity_hist.png")
        click.echo(f"wrote {path}")


@cli.command()
@click.option("--corpus", type=click.Path(exists=True, path_type=Path), required=True,
              help="SQuAD-style JSON file to scan.")
@click.option("--window", type=int, default=100, show_default=True)
def scan(corpus, window):
    """Scan a corpus for insertion expressions near expected answers."""
    with open(corpus, encoding="utf-8") as fh:
        payload = json.load(fh)
    passages, answers = [], []
    for article in payload["data"]:
        for para in article["paragraphs"]:
            passages.append(para["context"])
            spans = []
            for qa in para["qas"]:
                for ans in qa.get("answers", []):
                    start = ans["answer_start"]
                    spans.append((start, start + len(ans["text"])))
            answers.append(spans)
    lexicon = load_resources().lexicon
    result = scan_corpus(passages, lexicon.entries, answers, window)
    click.echo(
        json.dumps(
            {
                "passages": result.n_passages,
                "frac_with_expression": result.frac_any,
                "frac_near_answer": result.frac_near,
                "window": window,
            }
        )
    )


@cli.command()
@click.option("--challenge", "challenge_dir", type=click.Path(exists=True, path_type=Path), required=True)
def stats(challenge_dir):
    """Corpus statistics of the baseline passages."""
    cs = corpus_statistics(load_challenge(challenge_dir))
    click.echo(
        json.dumps(
            {
                "passages": cs.n_passages,
                "avg_words": cs.avg_words,
                "avg_entities": cs.avg_entities,
                "avg_numbers": cs.avg_numbers,
            }
        )
    )


@cli.command()
@click.option("--challenge", "challenge_dir", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--id", "serial", type=int, required=True)
def inspect(challenge_dir, serial):
    """Pretty-print one aligned triple with the modification highlighted."""
    challenge = load_challenge(challenge_dir)
    triple = next((t for t in challenge.triples if t.serial == serial), None)
    if triple is None:
        raise SamError(f"no triple with serial {serial}")
    click.echo(f"Q: {triple.baseline.question}")
    click.echo(f"A (baseline): {triple.baseline.answer}")
    click.echo(f"A' (intervention/control): {triple.intervention.answer}")
    click.echo(f"question type: {triple.question_type}  categories: {list(triple.sam_categories)}")
    click.echo("\n[baseline]\n" + triple.baseline.context)
    click.echo("\n[intervention]\n" + _highlight_diff(triple.baseline.context, triple.intervention.context))
    click.echo("\n[control]\n" + triple.control.context)


def _highlight_diff(baseline: str, intervention: str) -> str:
    matcher = difflib.SequenceMatcher(a=baseline.split(), b=intervention.split(), autojunk=False)
    out = []
    for op, _, _, j1, j2 in matcher.get_opcodes():
        chunk = intervention.split()[j1:j2]
        if op in ("insert", "replace"):
            out.extend(f"<<{w}>>" for w in chunk)
        elif op == "equal":
            out.extend(chunk)
    return " ".join(out)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except EmptyBasis as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except (SamError, ValueError, OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
