"""Per-comment run records and their line-delimited file format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from modgate.errors import FileError, ParseError, RecordError
from modgate.outparse import Classification, parse_response, primary_label
from modgate.taxonomy import Category, Taxonomy

PARSE_FAILED = "parse_failed"


@dataclass(frozen=True)
class CommentResult:
    id: str
    gold: Category
    primary: Category
    labels: tuple[tuple[Category, float], ...]
    reasoning: str
    flags: tuple[str, ...]
    prompt_version: str
    model_id: str
    from_cache: bool
    raw: str

    @property
    def parse_failed(self) -> bool:
        return PARSE_FAILED in self.flags

    def to_json(self) -> str:
        rec = {
            "id": self.id,
            "gold": self.gold.value,
            "labels": [{"category": c.value, "confidence": conf} for c, conf in self.labels],
            "primary": self.primary.value,
            "reasoning": self.reasoning,
            "flags": list(self.flags),
            "prompt_version": self.prompt_version,
            "model_id": self.model_id,
            "from_cache": self.from_cache,
            "raw": self.raw,
        }
        return json.dumps(rec, ensure_ascii=False)

    @classmethod
    def from_dict(cls, rec: dict) -> "CommentResult":
        return cls(
            id=str(rec["id"]),
            gold=Category(rec["gold"]),
            primary=Category(rec["primary"]),
            labels=tuple((Category(x["category"]), float(x["confidence"])) for x in rec["labels"]),
            reasoning=rec.get("reasoning", ""),
            flags=tuple(rec.get("flags", ())),
            prompt_version=rec["prompt_version"],
            model_id=rec["model_id"],
            from_cache=bool(rec.get("from_cache", False)),
            raw=rec.get("raw", ""),
        )


def score_response(
    comment_id: str,
    gold: Category,
    raw_content: str,
    taxonomy: Taxonomy,
    *,
    prompt_version: str,
    model_id: str,
    from_cache: bool,
) -> CommentResult:
    """Parse one response into a scored record.

    Unparseable output is scored as a Neutral prediction carrying the
    ``parse_failed`` flag.
    """
    try:
        c: Classification = parse_response(raw_content, taxonomy)
    except ParseError:
        return CommentResult(
            comment_id, gold, Category.NEUTRAL, (), "", (PARSE_FAILED,),
            prompt_version, model_id, from_cache, raw_content,
        )
    return CommentResult(
        comment_id, gold, primary_label(c), c.labels, c.reasoning, tuple(sorted(c.flags)),
        prompt_version, model_id, from_cache, raw_content,
    )


def write_run_records(records: Iterable[CommentResult], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")


def read_run_records(path: str | Path) -> list[CommentResult]:
    out = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot read run file {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(CommentResult.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise RecordError(lineno, "malformed record", repr(exc)) from None
    return out
