"""Confusion matrices and the metric suite: P/R/F1, accuracy, MCC, binary collapse."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

import numpy as np

from modgate.errors import EmptyMatrix
from modgate.taxonomy import CATEGORIES, Category, is_harmful


@dataclass(frozen=True)
class ConfusionMatrix:
    """Gold-by-predicted counts; rows are gold, columns predicted."""

    counts: np.ndarray
    categories: tuple[Category, ...] = CATEGORIES

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.categories)
        if counts.shape != (k, k):
            raise ValueError(f"expected a {k}x{k} matrix, got shape {counts.shape}")
        if (counts < 0).any():
            raise ValueError("confusion counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def cell(self, gold: Category, predicted: Category) -> int:
        return int(self.counts[self.categories.index(gold), self.categories.index(predicted)])

    def row(self, gold: Category) -> np.ndarray:
        return self.counts[self.categories.index(gold)]

    def to_lists(self) -> list[list[int]]:
        return self.counts.tolist()

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], categories=CATEGORIES) -> "ConfusionMatrix":
        return cls(np.array(rows, dtype=np.int64), tuple(categories))


def build_confusion(records: Iterable[tuple[Category, Category]]) -> ConfusionMatrix:
    counts = np.zeros((len(CATEGORIES), len(CATEGORIES)), dtype=np.int64)
    for gold, pred in records:
        counts[gold.index, pred.index] += 1
    return ConfusionMatrix(counts)


def _as_counts(m) -> np.ndarray:
    return m.counts if isinstance(m, ConfusionMatrix) else np.asarray(m, dtype=np.int64)


# -- per-class ---------------------------------------------------------------


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int
    degenerate: bool = False


def _ratio(num: int, den: int) -> tuple[float, bool]:
    return (0.0, True) if den == 0 else (num / den, False)


def _f1(p: float, r: float) -> tuple[float, bool]:
    return (0.0, True) if p + r == 0 else (2 * p * r / (p + r), False)


def per_class_prf(m: ConfusionMatrix) -> dict[Category, ClassScores]:
    """Precision, recall and F1 per category; any 0/0 gives 0.0 and ``degenerate``."""
    c = m.counts
    out = {}
    for i, cat in enumerate(m.categories):
        tp = int(c[i, i])
        p, dp = _ratio(tp, int(c[:, i].sum()))
        r, dr = _ratio(tp, int(c[i, :].sum()))
        f, df = _f1(p, r)
        out[cat] = ClassScores(p, r, f, int(c[i, :].sum()), dp or dr or df)
    return out


def accuracy(m) -> float:
    c = _as_counts(m)
    s = int(c.sum())
    if s == 0:
        raise EmptyMatrix("accuracy is undefined for an empty matrix")
    return int(np.trace(c)) / s


def micro_recall(m) -> float:
    """Pooled recall: sum of true positives over sum of gold counts."""
    c = _as_counts(m)
    tp = sum(int(c[i, i]) for i in range(c.shape[0]))
    gold = sum(int(c[i, :].sum()) for i in range(c.shape[0]))
    if gold == 0:
        raise EmptyMatrix("micro recall is undefined for an empty matrix")
    return tp / gold


def macro_f1(scores: dict[Category, ClassScores]) -> float:
    return sum(s.f1 for s in scores.values()) / len(scores) if scores else 0.0


def multiclass_mcc(m) -> float:
    """K-class Matthews correlation (Gorodkin's R_K).

    ``(c*s - sum_k p_k t_k) / sqrt((s^2 - sum_k p_k^2)(s^2 - sum_k t_k^2))``
    with ``c`` the trace, ``s`` the total, ``t_k`` gold row sums and ``p_k``
    predicted column sums. Returns 0.0 when either factor under the root is 0.
    Accepts a :class:`ConfusionMatrix` or any square integer array.
    """
    c = _as_counts(m)
    # python ints keep the products exact for large counts
    t = [int(v) for v in c.sum(axis=1)]
    p = [int(v) for v in c.sum(axis=0)]
    s = sum(t)
    trace = int(np.trace(c))
    cov_yy = s * s - sum(v * v for v in p)
    cov_xx = s * s - sum(v * v for v in t)
    if cov_xx == 0 or cov_yy == 0:
        return 0.0
    num = trace * s - sum(pk * tk for pk, tk in zip(p, t))
    prod = cov_xx * cov_yy
    root = math.isqrt(prod)
    # exact integer root when available, so a perfect diagonal gives exactly 1.0
    value = num / (root if root * root == prod else math.sqrt(prod))
    return max(-1.0, min(1.0, value))


# -- binary ------------------------------------------------------------------


@dataclass(frozen=True)
class BinaryCounts:
    tp: int
    fp: int
    fn: int
    tn: int


@dataclass(frozen=True)
class BinaryScores:
    precision: float
    recall: float
    f1: float
    mcc: float
    degenerate: bool = False


def binary_collapse(m: ConfusionMatrix) -> BinaryCounts:
    """Harmful-vs-Neutral counts; a harmful prediction of the wrong harmful
    category still counts as a true positive."""
    harm = np.array([is_harmful(c) for c in m.categories])
    c = m.counts
    return BinaryCounts(
        tp=int(c[np.ix_(harm, harm)].sum()),
        fp=int(c[np.ix_(~harm, harm)].sum()),
        fn=int(c[np.ix_(harm, ~harm)].sum()),
        tn=int(c[np.ix_(~harm, ~harm)].sum()),
    )


def binary_mcc(tp: int, fp: int, fn: int, tn: int) -> float:
    den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if den == 0:
        return 0.0
    root = math.isqrt(den)
    return (tp * tn - fp * fn) / (root if root * root == den else math.sqrt(den))


def binary_prf(counts: BinaryCounts) -> BinaryScores:
    tp, fp, fn, tn = counts.tp, counts.fp, counts.fn, counts.tn
    p, dp = _ratio(tp, tp + fp)
    r, dr = _ratio(tp, tp + fn)
    f, df = _f1(p, r)
    dm = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn) == 0
    return BinaryScores(p, r, f, binary_mcc(tp, fp, fn, tn), dp or dr or df or dm)


# -- report ------------------------------------------------------------------


def percent(rate: float) -> str:
    """Format a rate as a percentage rounded half-up to two decimals."""
    d = (Decimal(repr(rate)) * 100).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    return f"{d}%"


@dataclass(frozen=True)
class MetricsReport:
    per_class: dict[Category, ClassScores]
    accuracy: float
    macro_f1: float
    mcc: float
    binary_counts: BinaryCounts
    binary: BinaryScores
    total: int

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "mcc": self.mcc,
            "binary": {
                "tp": self.binary_counts.tp,
                "fp": self.binary_counts.fp,
                "fn": self.binary_counts.fn,
                "tn": self.binary_counts.tn,
                "precision": self.binary.precision,
                "recall": self.binary.recall,
                "f1": self.binary.f1,
                "mcc": self.binary.mcc,
                "degenerate": self.binary.degenerate,
            },
            "per_class": {
                cat.value: {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "support": s.support,
                    "degenerate": s.degenerate,
                }
                for cat, s in self.per_class.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        b = data["binary"]
        return cls(
            per_class={
                Category(k): ClassScores(v["precision"], v["recall"], v["f1"], v["support"], v.get("degenerate", False))
                for k, v in data["per_class"].items()
            },
            accuracy=data["accuracy"],
            macro_f1=data["macro_f1"],
            mcc=data["mcc"],
            binary_counts=BinaryCounts(b["tp"], b["fp"], b["fn"], b["tn"]),
            binary=BinaryScores(b["precision"], b["recall"], b["f1"], b["mcc"], b.get("degenerate", False)),
            total=data["total"],
        )


def evaluate_matrix(m: ConfusionMatrix) -> MetricsReport:
    scores = per_class_prf(m)
    counts = binary_collapse(m)
    return MetricsReport(
        per_class=scores,
        accuracy=accuracy(m),
        macro_f1=macro_f1(scores),
        mcc=multiclass_mcc(m),
        binary_counts=counts,
        binary=binary_prf(counts),
        total=m.total,
    )


def format_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Plain-text table with left-aligned first column and right-aligned others."""
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]

    def line(cells):
        parts = [cells[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return "  ".join(parts).rstrip()

    sep = "  ".join("-" * w for w in widths)
    return "\n".join([line(headers), sep, *(line(r) for r in rows)])


def metrics_table(report: MetricsReport) -> str:
    rows = [
        [cat.value, f"{s.precision:.3f}", f"{s.recall:.3f}", f"{s.f1:.3f}", str(s.support)]
        for cat, s in report.per_class.items()
    ]
    return format_table(["category", "precision", "recall", "f1", "support"], rows)


_SHORT = {
    Category.DISCREDIT: "Disc",
    Category.STEREOTYPING: "Ster",
    Category.SEXUAL_HARASSMENT: "SxHa",
    Category.THREATS_OF_VIOLENCE: "Thrt",
    Category.MATERNAL_INSULTS: "Matr",
    Category.SEXUAL_OBJECTIFICATION: "SxOb",
    Category.ANTI_LGBTQ: "LGBT",
    Category.PHYSICAL_APPEARANCE: "Phys",
    Category.DOMINANCE: "Domn",
    Category.DAMNING: "Damn",
    Category.DISMISSING: "Dism",
    Category.NEUTRAL: "Neut",
}


def confusion_table(m: ConfusionMatrix) -> str:
    short = [_SHORT.get(c, c.value[:4]) for c in m.categories]
    rows = [[cat.value, *map(str, m.counts[i].tolist())] for i, cat in enumerate(m.categories)]
    return format_table(["gold \\ predicted", *short], rows)


def dumps_report(report: MetricsReport, **extra) -> str:
    return json.dumps({**extra, "metrics": report.to_dict()}, indent=2, ensure_ascii=False) + "\n"
