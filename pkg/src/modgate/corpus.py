"""Labeled comment datasets: cleaning, ingestion, and balanced sampling."""

from __future__ import annotations

import json
import random
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from modgate.errors import FileError, RecordError, Underfull, UnknownLabel
from modgate.taxonomy import CATEGORIES, HARMFUL, Category, Taxonomy, canonicalize_label

SOURCES = ("original", "augmented", "synthetic-fixture")

_QUOTES = {
    "\u2018": "'", "\u2019": "'", "\u201a": "'", "\u201b": "'", "\u2032": "'",
    "\u201c": '"', "\u201d": '"', "\u201e": '"', "\u201f": '"', "\u2033": '"',
    "\u00ab": '"', "\u00bb": '"',
    # hyphen, non-breaking hyphen, figure dash, en dash, em dash, bar, minus
    "\u2010": "-", "\u2011": "-", "\u2012": "-", "\u2013": "-", "\u2014": "-", "\u2015": "-",
    "\u2212": "-",
}
_QUOTE_TABLE = str.maketrans(_QUOTES)
_WS = re.compile(r"\s+")
_REPEAT = re.compile(r"(.)\1{2,}", re.DOTALL)


def _strip_controls(text: str) -> str:
    out = []
    for ch in text:
        if unicodedata.category(ch) == "Cc":
            # whitespace controls keep their word boundary
            if ch.isspace():
                out.append(" ")
            continue
        out.append(ch)
    return "".join(out)


def _collapse_punct(text: str) -> str:
    def repl(m: re.Match) -> str:
        ch = m.group(1)
        return ch if unicodedata.category(ch).startswith("P") else m.group(0)

    return _REPEAT.sub(repl, text)


def _normalize_once(text: str) -> str:
    text = unicodedata.normalize("NFC", text)
    text = text.translate(_QUOTE_TABLE)
    text = _strip_controls(text)
    text = _WS.sub(" ", text)
    text = _collapse_punct(text)
    return text.strip()


def normalize_text(raw: str) -> str:
    """Clean comment text into the canonical form used for prompts and caches.

    Steps, in order: NFC composition, curly quotes and dashes to ASCII,
    control characters dropped (whitespace controls such as newline become a
    space), whitespace runs collapsed to one space, runs of three or more of
    the same punctuation mark collapsed to one, trim. The sequence is repeated
    until the text stops changing, which makes the function idempotent even
    when a removal lets characters compose or merge into a new run.
    """
    prev = raw
    for _ in range(16):
        cur = _normalize_once(prev)
        if cur == prev:
            return cur
        prev = cur
    return prev


@dataclass(frozen=True)
class LabeledComment:
    id: str
    text: str
    gold: Category
    source: str = "original"


@dataclass(frozen=True)
class Corpus:
    comments: tuple[LabeledComment, ...]
    seed: int | None = None

    def __post_init__(self):
        seen = set()
        for c in self.comments:
            if c.id in seen:
                raise ValueError(f"duplicate comment id {c.id!r}")
            seen.add(c.id)

    def __len__(self) -> int:
        return len(self.comments)

    def __iter__(self):
        return iter(self.comments)

    def __getitem__(self, i):
        return self.comments[i]

    def by_category(self) -> dict[Category, list[LabeledComment]]:
        groups: dict[Category, list[LabeledComment]] = {c: [] for c in CATEGORIES}
        for comment in self.comments:
            groups[comment.gold].append(comment)
        return groups


def read_corpus_lines(lines: Iterable[str], taxonomy: Taxonomy) -> Corpus:
    comments: list[LabeledComment] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordError(lineno, "malformed record", str(exc)) from None
        if not isinstance(rec, dict):
            raise RecordError(lineno, "malformed record", "expected an object")
        rid, text, label = rec.get("id"), rec.get("text"), rec.get("label")
        source = rec.get("source", "original")
        if isinstance(rid, int) and not isinstance(rid, bool):
            rid = str(rid)
        if not isinstance(rid, str) or not rid or not isinstance(text, str):
            raise RecordError(lineno, "malformed record", "id and text are required strings")
        if not isinstance(label, str):
            # a list here means multi-label gold, which is not supported
            raise RecordError(lineno, "bad label", f"expected a single label, got {label!r}")
        if source not in SOURCES:
            raise RecordError(lineno, "malformed record", f"unknown source {source!r}")
        try:
            gold = canonicalize_label(label, taxonomy)
        except UnknownLabel:
            raise RecordError(lineno, "bad label", label) from None
        clean = normalize_text(text)
        if not clean:
            raise RecordError(lineno, "empty text", rid)
        if rid in seen:
            raise RecordError(lineno, "duplicate id", rid)
        seen.add(rid)
        comments.append(LabeledComment(rid, clean, gold, source))
    return Corpus(tuple(comments))


def load_corpus(path: str | Path, taxonomy: Taxonomy) -> Corpus:
    try:
        with open(path, encoding="utf-8") as fh:
            return read_corpus_lines(fh, taxonomy)
    except OSError as exc:
        raise FileError(f"cannot read corpus {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise FileError(f"corpus {path} is not UTF-8: {exc}") from exc


def dump_corpus(corpus: Corpus) -> str:
    lines = []
    for c in corpus:
        rec = {"id": c.id, "text": c.text, "label": c.gold.value, "source": c.source}
        lines.append(json.dumps(rec, ensure_ascii=False) + "\n")
    return "".join(lines)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_corpus(corpus))


def balance_sample(corpus: Corpus, per_category: int, neutral: int, seed: int) -> Corpus:
    """Draw ``per_category`` comments from every harmful category and
    ``neutral`` Neutral comments, uniformly without replacement.

    The draw for each category uses one ``random.Random(seed)`` stream visited
    in canonical category order; the result keeps the input corpus order.
    """
    if per_category < 0 or neutral < 0:
        raise ValueError("sample sizes must be non-negative")
    groups = corpus.by_category()
    need = {c: per_category for c in HARMFUL}
    need[Category.NEUTRAL] = neutral
    for cat in CATEGORIES:
        if len(groups[cat]) < need[cat]:
            raise Underfull(cat, len(groups[cat]), need[cat])

    rng = random.Random(seed)
    keep: set[str] = set()
    for cat in CATEGORIES:
        keep.update(c.id for c in rng.sample(groups[cat], need[cat]))
    return Corpus(tuple(c for c in corpus if c.id in keep), seed=seed)


def corpus_stats(corpus: Corpus) -> dict[Category, int]:
    counts = Counter(c.gold for c in corpus)
    return {cat: counts.get(cat, 0) for cat in CATEGORIES}
