"""Parse raw model output into structured classifications."""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Iterable

from modgate.errors import ParseError, UnknownLabel
from modgate.taxonomy import Category, Taxonomy, canonicalize_label

NEUTRAL_MIN_CONFIDENCE = 0.95
MAX_REASONING_WORDS = 20

LOW_NEUTRAL_CONFIDENCE = "low_neutral_confidence"
TRUNCATED = "truncated"
COERCED_FORMAT = "coerced_format"
MULTI_LABEL = "multi_label"
LONG_REASONING = "long_reasoning"

_NUMBER = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)"
_LINE = re.compile(
    rf"^\s*(?:[-*•]\s*|\d+[.)]\s*)?"
    rf"label\s*[:=]\s*(?P<label>[^;\n]*?)\s*;\s*"
    rf"confidence\s*[:=]\s*(?P<conf>{_NUMBER})\s*(?P<pct>%?)\s*"
    rf"(?:;\s*reason(?:ing)?\s*[:=]\s*(?P<reason>.*?))?\s*$",
    re.IGNORECASE,
)
_PARTIAL = re.compile(r"^\s*(?:[-*•]\s*)?label\s*[:=]", re.IGNORECASE)
_ANY_NUMBER = re.compile(_NUMBER)


@dataclass(frozen=True)
class Classification:
    labels: tuple[tuple[Category, float], ...]
    reasoning: str = ""
    flags: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.labels:
            raise ValueError("a classification needs at least one label")


def primary_label(c: Classification) -> Category:
    """Highest-confidence category; ties go to the earlier canonical category."""
    return min(c.labels, key=lambda lc: (-lc[1], lc[0].index))[0]


def serialize(c: Classification) -> str:
    """Render a classification in the primary output grammar."""
    return "\n".join(
        f"label: {cat.value}; confidence: {conf:.2f}; reason: {c.reasoning}" for cat, conf in c.labels
    )


def _clamp(value: float, flags: set[str]) -> float:
    if value != value:  # NaN
        flags.add(COERCED_FORMAT)
        return 0.0
    if value < 0.0 or value > 1.0:
        flags.add(COERCED_FORMAT)
        return min(1.0, max(0.0, value))
    return value


def _finish(found: Iterable[tuple[Category, float, str]], flags: set[str]) -> Classification:
    best: dict[Category, tuple[float, int, str]] = {}
    for order, (cat, conf, reason) in enumerate(found):
        if cat not in best or conf > best[cat][0]:
            best[cat] = (conf, best.get(cat, (0, order))[1], reason)
    # confidence descending; model order breaks ties
    ranked = sorted(best.items(), key=lambda kv: (-kv[1][0], kv[1][1]))
    labels = tuple((cat, conf) for cat, (conf, _, _) in ranked)
    reasoning = ranked[0][1][2]
    if len(labels) > 1:
        flags.add(MULTI_LABEL)
    if len(labels) == 1 and labels[0][0] is Category.NEUTRAL and labels[0][1] < NEUTRAL_MIN_CONFIDENCE:
        flags.add(LOW_NEUTRAL_CONFIDENCE)
    if len(reasoning.split()) > MAX_REASONING_WORDS:
        flags.add(LONG_REASONING)
    return Classification(labels, reasoning, frozenset(flags))


def _strip_fences(text: str) -> str:
    lines = [ln for ln in text.split("\n") if not ln.strip().startswith("```")]
    return "\n".join(lines)


@functools.lru_cache(maxsize=8)
def _spelling_patterns(taxonomy: Taxonomy) -> list[tuple[re.Pattern, Category]]:
    out = []
    for spelling, cat in taxonomy.spellings().items():
        body = r"\s+".join(re.escape(part) for part in spelling.split())
        out.append((re.compile(r"(?<!\w)" + body + r"(?!\w)"), cat))
    return out


def _fallback(text: str, taxonomy: Taxonomy, flags: set[str]) -> Classification:
    # earliest mention of any accepted spelling; longest spelling wins at a tie
    best = None
    lowered = text.casefold()
    for pattern, cat in _spelling_patterns(taxonomy):
        m = pattern.search(lowered)
        if m and (best is None or (m.start(), -len(m.group(0))) < (best[0], -best[1])):
            best = (m.start(), len(m.group(0)), cat)
    if best is None:
        raise ParseError("no recognizable label in model output", text)
    start, length, cat = best
    flags.add(COERCED_FORMAT)
    num = _ANY_NUMBER.search(text, start + length) or _ANY_NUMBER.search(text)
    if num is None:
        conf = 0.5
    else:
        try:
            conf = float(num.group(0))
        except ValueError:
            conf = 0.5
    return _finish([(cat, _clamp(conf, flags), "")], flags)


def parse_text(content: str | bytes, taxonomy: Taxonomy) -> Classification:
    """Parse model output text.

    Accepted primary form, one line per label::

        label: <name>; confidence: <0.00-1.00>; reason: <text>

    List bullets, code fences and a trailing ``%`` are tolerated. When no
    line parses, the first recognizable label name in the text is taken with
    the first number after it as confidence, and ``coerced_format`` is set.

    Raises:
        ParseError: if no category name appears anywhere.
    """
    if isinstance(content, (bytes, bytearray)):
        content = bytes(content).decode("utf-8", "replace")
    text = content.replace("\r\n", "\n").replace("\r", "\n")
    flags: set[str] = set()
    found = []
    lines = [ln for ln in _strip_fences(text).split("\n") if ln.strip()]
    for line in lines:
        m = _LINE.match(line)
        if not m:
            continue
        try:
            cat = canonicalize_label(m.group("label").strip(" *`'\""), taxonomy)
        except UnknownLabel:
            flags.add(COERCED_FORMAT)
            continue
        try:
            conf = float(m.group("conf"))
        except ValueError:
            continue
        if m.group("pct"):
            conf /= 100.0
        reason = " ".join((m.group("reason") or "").split())
        found.append((cat, _clamp(conf, flags), reason))

    if lines and _PARTIAL.match(lines[-1]) and not _LINE.match(lines[-1]):
        flags.add(TRUNCATED)
    if text.count("```") % 2:
        flags.add(TRUNCATED)
    if found:
        return _finish(found, flags)
    return _fallback(text, taxonomy, flags)


def parse_response(raw, taxonomy: Taxonomy) -> Classification:
    """Parse a :class:`~modgate.modelgw.RawResponse` (or plain text)."""
    content = raw if isinstance(raw, (str, bytes, bytearray)) else raw.content
    return parse_text(content, taxonomy)
