"""Rendered evaluation reports: JSON, CSV breakdowns and bar-chart figures."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .evaluator import ErrorAnalysis, EvalResult, result_to_dict


def write_report(
    result: EvalResult, out_dir: Path, errors: ErrorAnalysis | None = None
) -> list[Path]:
    """Write report.json, breakdown.csv and the breakdown figures."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    json_path = out_dir / "report.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(result_to_dict(result, errors), fh, indent=2)
    written.append(json_path)

    csv_path = out_dir / "breakdown.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "key", "dice", "ci", "n_basis", "n"])
        writer.writerow(["overall", "", result.dice, result.ci, result.n_basis, result.n])
        for cat, score in result.by_category.items():
            writer.writerow(["category", cat, score.dice, score.ci, score.n_basis, score.n])
        for k, score in result.by_n_sam.items():
            writer.writerow(["n_sam", k, score.dice, score.ci, score.n_basis, score.n])
    written.append(csv_path)

    written.append(
        _bar_figure(
            out_dir / "dice_by_category.png",
            result.by_category,
            "Consistency by insertion category",
        )
    )
    written.append(
        _bar_figure(
            out_dir / "dice_by_n_sam.png",
            {str(k): v for k, v in result.by_n_sam.items()},
            "Consistency by insertions per instance",
        )
    )
    return written


def _bar_figure(path: Path, scores: dict, title: str) -> Path:
    labels = list(scores)
    values = [s.dice if s.dice is not None else 0.0 for s in scores.values()]
    cis = [s.ci if s.ci is not None else 0.0 for s in scores.values()]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(labels, values, yerr=cis, capsize=4, color="#4878a8")
    for x, (label, score) in enumerate(scores.items()):
        if score.dice is None:
            ax.text(x, 0.02, "undefined", ha="center", rotation=90, fontsize=8)
    ax.set_ylim(0, 1)
    ax.set_ylabel("consistency")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def similarity_figure(similarities: list[float], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(similarities, bins=20, color="#4878a8")
    ax.set_xlabel("pairwise Jaccard similarity")
    ax.set_ylabel("pairs")
    ax.set_title("Lexical similarity of generated passages")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
