"""Error analysis over finished runs and comparison across runs."""

from __future__ import annotations

import csv
import io
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from modgate.evalkit import (
    ConfusionMatrix,
    MetricsReport,
    build_confusion,
    confusion_table,
    evaluate_matrix,
    format_table,
    percent,
)
from modgate.records import CommentResult
from modgate.taxonomy import CATEGORIES, Category, is_harmful


@dataclass(frozen=True)
class RunRecord:
    run_id: str
    prompt_version: str
    model_id: str
    metrics: MetricsReport
    records: tuple[CommentResult, ...] | None = None
    matrix: ConfusionMatrix | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.records is not None and len(self.records) != self.metrics.total:
            raise ValueError(
                f"run {self.run_id}: {len(self.records)} records but metrics cover {self.metrics.total}"
            )


def run_from_records(run_id: str, records: Sequence[CommentResult]) -> RunRecord:
    if not records:
        raise ValueError("a run needs at least one record")
    versions = {r.prompt_version for r in records}
    models = {r.model_id for r in records}
    if len(versions) != 1 or len(models) != 1:
        raise ValueError(f"run {run_id} mixes prompt versions {versions} or models {models}")
    m = build_confusion((r.gold, r.primary) for r in records)
    return RunRecord(run_id, versions.pop(), models.pop(), evaluate_matrix(m), tuple(records), m)


# -- misclassifications ------------------------------------------------------


@dataclass(frozen=True)
class Misclassified:
    id: str
    gold: Category
    predicted: Category
    reasoning: str
    parse_failed: bool = False


def _ranked(counter: Counter) -> list[tuple[Category, int]]:
    return sorted(((c, n) for c, n in counter.items() if n), key=lambda cn: (-cn[1], cn[0].index))


@dataclass(frozen=True)
class MisclassificationReport:
    run_id: str
    false_positives: tuple[Misclassified, ...]
    false_negatives: tuple[Misclassified, ...]
    fn_by_category: tuple[tuple[Category, int], ...]
    fp_by_predicted: tuple[tuple[Category, int], ...]
    confusions: tuple[tuple[Category, Category, int], ...] = ()

    def to_dict(self) -> dict:
        def item(m: Misclassified) -> dict:
            return {
                "id": m.id,
                "gold": m.gold.value,
                "predicted": m.predicted.value,
                "reasoning": m.reasoning,
                "parse_failed": m.parse_failed,
            }

        return {
            "run_id": self.run_id,
            "false_positive_count": len(self.false_positives),
            "false_negative_count": len(self.false_negatives),
            "fn_by_category": [{"category": c.value, "count": n} for c, n in self.fn_by_category],
            "fp_by_predicted": [{"category": c.value, "count": n} for c, n in self.fp_by_predicted],
            "top_confusions": [
                {"gold": g.value, "predicted": p.value, "count": n} for g, p, n in self.confusions
            ],
            "false_positives": [item(m) for m in self.false_positives],
            "false_negatives": [item(m) for m in self.false_negatives],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_markdown(self) -> str:
        d = self.to_dict()
        out = [f"# Misclassification report: {self.run_id}", ""]
        out.append(f"- Binary false positives: {d['false_positive_count']}")
        out.append(f"- Binary false negatives: {d['false_negative_count']}")
        out.append("")
        out.append("## False negatives by gold category")
        out.append("")
        out.append("| Category | Missed |")
        out.append("|---|---:|")
        out += [f"| {c['category']} | {c['count']} |" for c in d["fn_by_category"]]
        if d["top_confusions"]:
            out += ["", "## Top confusions", "", "| Gold | Predicted | Count |", "|---|---|---:|"]
            out += [f"| {c['gold']} | {c['predicted']} | {c['count']} |" for c in d["top_confusions"]]
        for title, items in (("False positives", d["false_positives"]), ("False negatives", d["false_negatives"])):
            out += ["", f"## {title}", ""]
            if not items:
                out.append("None.")
                continue
            out.append("| Id | Gold | Predicted | Model reasoning |")
            out.append("|---|---|---|---|")
            for m in items:
                reason = m["reasoning"].replace("|", "\\|") or ("(unparseable output)" if m["parse_failed"] else "")
                out.append(f"| {m['id']} | {m['gold']} | {m['predicted']} | {reason} |")
        return "\n".join(out) + "\n"


def misclassification_report(run: RunRecord, top_k: int = 10) -> MisclassificationReport:
    """Binary false positives and negatives of a run, with the model's reasoning."""
    if run.records is None:
        raise ValueError(f"run {run.run_id} has no per-comment records")
    fps, fns = [], []
    for r in run.records:
        item = Misclassified(r.id, r.gold, r.primary, r.reasoning, r.parse_failed)
        if is_harmful(r.gold) and not is_harmful(r.primary):
            fns.append(item)
        elif not is_harmful(r.gold) and is_harmful(r.primary):
            fps.append(item)
    matrix = run.matrix or build_confusion((r.gold, r.primary) for r in run.records)
    return MisclassificationReport(
        run_id=run.run_id,
        false_positives=tuple(fps),
        false_negatives=tuple(fns),
        fn_by_category=tuple(_ranked(Counter(m.gold for m in fns))),
        fp_by_predicted=tuple(_ranked(Counter(m.predicted for m in fps))),
        confusions=tuple(top_confusions(matrix, top_k)) if top_k else (),
    )


def top_confusions(m: ConfusionMatrix, k: int) -> list[tuple[Category, Category, int]]:
    """The ``k`` largest non-zero off-diagonal cells, largest first."""
    if k < 1:
        raise ValueError("k must be at least 1")
    cells = [
        (g, p, int(m.counts[i, j]))
        for i, g in enumerate(m.categories)
        for j, p in enumerate(m.categories)
        if i != j and m.counts[i, j] > 0
    ]
    cells.sort(key=lambda c: (-c[2], m.categories.index(c[0]), m.categories.index(c[1])))
    return cells[:k]


# -- comparison --------------------------------------------------------------


def version_key(version: str):
    """Natural sort key so P2 sorts before P10."""
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", version)]


@dataclass(frozen=True)
class Delta:
    model_id: str
    from_version: str
    to_version: str
    delta: float


@dataclass(frozen=True)
class Comparison:
    versions: tuple[str, ...]
    models: tuple[str, ...]
    mcc: dict[tuple[str, str], float]
    f1: dict[tuple[str, str], dict[Category, float]]
    deltas: tuple[Delta, ...]

    def cell(self, version: str, model: str) -> float | None:
        return self.mcc.get((version, model))

    def to_text(self) -> str:
        rows = [
            [v, *(f"{self.mcc[(v, m)]:.3f}" if (v, m) in self.mcc else "-" for m in self.models)]
            for v in self.versions
        ]
        text = "MCC by prompt version and model\n\n" + format_table(["prompt", *self.models], rows)
        if self.deltas:
            drows = [[d.model_id, f"{d.from_version} -> {d.to_version}", f"{d.delta:+.3f}"] for d in self.deltas]
            text += "\n\nMCC change between consecutive prompt versions\n\n"
            text += format_table(["model", "versions", "delta"], drows)
        return text + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["prompt_version", "model_id", "mcc", "delta_from_previous"])
        prev = {(d.to_version, d.model_id): d.delta for d in self.deltas}
        for v in self.versions:
            for m in self.models:
                if (v, m) in self.mcc:
                    delta = prev.get((v, m))
                    w.writerow([v, m, f"{self.mcc[(v, m)]:.6f}", "" if delta is None else f"{delta:+.6f}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "versions": list(self.versions),
            "models": list(self.models),
            "cells": [
                {"prompt_version": v, "model_id": m, "mcc": self.mcc[(v, m)],
                 "f1": {c.value: f for c, f in self.f1[(v, m)].items()}}
                for v in self.versions for m in self.models if (v, m) in self.mcc
            ],
            "deltas": [
                {"model_id": d.model_id, "from": d.from_version, "to": d.to_version, "delta": d.delta}
                for d in self.deltas
            ],
        }


def compare_runs(runs: Sequence[RunRecord]) -> Comparison:
    """Tabulate stored MCC by (prompt version, model) and per-model deltas.

    Values are taken from each run's metrics as stored; nothing is recomputed.
    """
    if not runs:
        raise ValueError("need at least one run to compare")
    mcc: dict[tuple[str, str], float] = {}
    f1: dict[tuple[str, str], dict[Category, float]] = {}
    for run in runs:
        key = (run.prompt_version, run.model_id)
        if key in mcc:
            raise ValueError(f"two runs for prompt {key[0]} and model {key[1]}")
        mcc[key] = run.metrics.mcc
        f1[key] = {c: s.f1 for c, s in run.metrics.per_class.items()}
    versions = tuple(sorted({v for v, _ in mcc}, key=version_key))
    models = tuple(dict.fromkeys(run.model_id for run in runs))
    deltas = []
    for m in models:
        present = [v for v in versions if (v, m) in mcc]
        for a, b in zip(present, present[1:]):
            deltas.append(Delta(m, a, b, mcc[(b, m)] - mcc[(a, m)]))
    return Comparison(versions, models, mcc, f1, tuple(deltas))


def metrics_markdown(run: RunRecord, parse_failed: int | None = None) -> str:
    """Human-readable metrics document for one run."""
    mr = run.metrics
    if parse_failed is None and run.records is not None:
        parse_failed = sum(r.parse_failed for r in run.records)
    out = [
        f"# Evaluation: {run.run_id}",
        "",
        f"- Prompt version: {run.prompt_version}",
        f"- Model: {run.model_id}",
        f"- Comments scored: {mr.total}",
        f"- Accuracy: {percent(mr.accuracy)}",
        f"- Macro F1: {mr.macro_f1:.3f}",
        f"- MCC: {mr.mcc:.3f}",
    ]
    if parse_failed is not None:
        out.append(f"- Unparseable responses (scored as Neutral): {parse_failed}")
    b, bc = mr.binary, mr.binary_counts
    out += [
        "",
        "## Binary (harmful vs Neutral)",
        "",
        f"- TP {bc.tp}, FP {bc.fp}, FN {bc.fn}, TN {bc.tn}",
        f"- Precision: {percent(b.precision)}",
        f"- Recall: {percent(b.recall)}",
        f"- F1: {percent(b.f1)}",
        f"- MCC: {b.mcc:.3f}",
        "",
        "## Per category",
        "",
        "| Category | Precision | Recall | F1 | Support |",
        "|---|---:|---:|---:|---:|",
    ]
    for cat in CATEGORIES:
        s = mr.per_class[cat]
        mark = " *" if s.degenerate else ""
        out.append(f"| {cat.value}{mark} | {s.precision:.3f} | {s.recall:.3f} | {s.f1:.3f} | {s.support} |")
    if any(s.degenerate for s in mr.per_class.values()):
        out += ["", "\\* a ratio had a zero denominator and is reported as 0."]
    if run.matrix is not None:
        out += ["", "## Confusion matrix (rows gold, columns predicted)", "", "```"]
        out.append(confusion_table(run.matrix))
        out.append("```")
    return "\n".join(out) + "\n"
