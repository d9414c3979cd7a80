"""Versioned prompt specifications and deterministic prompt rendering."""

from __future__ import annotations

import hashlib
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

import yaml

from modgate.corpus import normalize_text
from modgate.errors import FileError, SpecError, UnknownLabel
from modgate.taxonomy import CATEGORIES, Category, Taxonomy, canonicalize_label

MAX_REASONING_WORDS = 20

BEGIN_MARKER = "<<<TARGET COMMENT>>>"
END_MARKER = "<<<END TARGET COMMENT>>>"
_ESCAPE = re.compile(r"\\|<<<|\n")
_UNESCAPE = re.compile(r"\\(\\|<<<|n)")


def escape_comment(text: str) -> str:
    """Make ``text`` safe to place on a single line between the markers."""
    return _ESCAPE.sub(lambda m: {"\\": "\\\\", "<<<": "\\<<<", "\n": "\\n"}[m.group(0)], text)


def unescape_comment(text: str) -> str:
    return _UNESCAPE.sub(lambda m: "\n" if m.group(1) == "n" else m.group(1), text)


@dataclass(frozen=True)
class FewShotExample:
    text: str
    labels: tuple[tuple[Category, float], ...]
    reasoning: str

    def __post_init__(self):
        if not self.labels:
            raise SpecError("example needs at least one label")
        for cat, conf in self.labels:
            if not 0.0 <= conf <= 1.0:
                raise SpecError(f"confidence {conf} for {cat.value} is outside [0, 1]")
        n = len(self.reasoning.split())
        if n > MAX_REASONING_WORDS:
            raise SpecError(
                f"reasoning has {n} words (max {MAX_REASONING_WORDS}): {self.reasoning!r}"
            )


@dataclass(frozen=True)
class PromptSpec:
    version_id: str
    role_text: str
    task_text: str
    definitions: Mapping[Category, str]
    examples: tuple[FewShotExample, ...]
    guidelines: tuple[str, ...]
    output_format: str
    parent: str | None = None
    changelog: str = ""
    label_names: Mapping[Category, str] = field(default_factory=dict)

    def __post_init__(self):
        missing = [c.value for c in CATEGORIES if c not in self.definitions]
        if missing:
            raise SpecError(f"{self.version_id}: missing definitions for {', '.join(missing)}")
        if self.parent and not self.changelog.strip():
            raise SpecError(f"{self.version_id}: a changelog is required when parent is set")
        free_text = [self.role_text, self.task_text, self.output_format, *self.guidelines]
        if any("<<<" in t for t in free_text):
            raise SpecError(f"{self.version_id}: '<<<' is reserved for the target comment markers")

    @property
    def is_zero_shot(self) -> bool:
        return not self.examples

    def name_of(self, category: Category) -> str:
        return self.label_names.get(category, category.value)


# -- loading -----------------------------------------------------------------


def _category(raw, taxonomy: Taxonomy, where: str) -> Category:
    if not isinstance(raw, str):
        raise SpecError(f"{where}: category must be text, got {raw!r}")
    try:
        return canonicalize_label(raw, taxonomy)
    except UnknownLabel:
        raise SpecError(f"{where}: unknown category {raw!r}") from None


def _text(data: dict, key: str, where: str) -> str:
    value = data.get(key)
    if not isinstance(value, str) or not value.strip():
        raise SpecError(f"{where}: '{key}' must be non-empty text")
    return value.strip()


def parse_prompt_spec(data, taxonomy: Taxonomy) -> PromptSpec:
    if not isinstance(data, dict):
        raise SpecError("prompt spec must be a mapping")
    vid = data.get("version_id")
    if not isinstance(vid, str) or not vid.strip():
        raise SpecError("prompt spec needs a version_id")
    vid = vid.strip()

    raw_defs = data.get("definitions")
    if not isinstance(raw_defs, dict):
        raise SpecError(f"{vid}: 'definitions' must be a mapping of category to text")
    definitions: dict[Category, str] = {}
    for key, text in raw_defs.items():
        cat = _category(key, taxonomy, f"{vid}.definitions")
        if cat in definitions:
            raise SpecError(f"{vid}: {cat.value} is defined twice")
        if not isinstance(text, str) or not text.strip():
            raise SpecError(f"{vid}: empty definition for {cat.value}")
        definitions[cat] = " ".join(text.split())
    missing = [c.value for c in CATEGORIES if c not in definitions]
    if missing:
        raise SpecError(f"{vid}: missing definition for {', '.join(missing)}")

    names = {d.category: d.display_name for d in taxonomy}
    for key, name in (data.get("label_names") or {}).items():
        cat = _category(key, taxonomy, f"{vid}.label_names")
        if not isinstance(name, str) or canonicalize_label_safe(name, taxonomy) is not cat:
            raise SpecError(f"{vid}: label name {name!r} does not map back to {cat.value}")
        names[cat] = name

    examples = []
    for i, ex in enumerate(data.get("examples") or []):
        where = f"{vid}.examples[{i}]"
        if not isinstance(ex, dict):
            raise SpecError(f"{where}: expected a mapping")
        labels = []
        for lab in ex.get("labels") or []:
            if not isinstance(lab, dict):
                raise SpecError(f"{where}: label entries need category and confidence")
            conf = lab.get("confidence")
            if isinstance(conf, bool) or not isinstance(conf, (int, float)):
                raise SpecError(f"{where}: confidence must be a number")
            labels.append((_category(lab.get("category"), taxonomy, where), float(conf)))
        reasoning = ex.get("reasoning")
        if not isinstance(reasoning, str):
            raise SpecError(f"{where}: reasoning must be text")
        text = normalize_text(_text(ex, "text", where))
        try:
            examples.append(FewShotExample(text, tuple(labels), " ".join(reasoning.split())))
        except SpecError as exc:
            raise SpecError(f"{where}: {exc}") from None

    guidelines = data.get("guidelines") or []
    if not isinstance(guidelines, list) or not all(isinstance(g, str) for g in guidelines):
        raise SpecError(f"{vid}: 'guidelines' must be a list of text rules")

    parent = data.get("parent")
    return PromptSpec(
        version_id=vid,
        role_text=_text(data, "role", vid),
        task_text=_text(data, "task", vid),
        definitions={c: definitions[c] for c in CATEGORIES},
        examples=tuple(examples),
        guidelines=tuple(" ".join(g.split()) for g in guidelines),
        output_format=_text(data, "output_format", vid),
        parent=str(parent) if parent else None,
        changelog=str(data.get("changelog") or "").strip(),
        label_names=names,
    )


def canonicalize_label_safe(raw: str, taxonomy: Taxonomy) -> Category | None:
    try:
        return canonicalize_label(raw, taxonomy)
    except UnknownLabel:
        return None


def load_prompt_spec(path: str | Path, taxonomy: Taxonomy) -> PromptSpec:
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        raise FileError(f"cannot read prompt spec {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SpecError(f"{path}: not valid YAML: {exc}") from exc
    return parse_prompt_spec(data, taxonomy)


def bundled_spec_dir() -> Path:
    return Path(str(resources.files("modgate.data").joinpath("specs")))


def load_spec_store(directory: str | Path | None, taxonomy: Taxonomy) -> dict[str, PromptSpec]:
    """Load every ``*.yaml`` spec in ``directory`` keyed by version id."""
    directory = Path(directory) if directory is not None else bundled_spec_dir()
    if not directory.is_dir():
        raise FileError(f"prompt spec directory {directory} does not exist")
    store: dict[str, PromptSpec] = {}
    for path in sorted(directory.glob("*.yaml")):
        spec = load_prompt_spec(path, taxonomy)
        if spec.version_id in store:
            raise SpecError(f"version id {spec.version_id} appears twice in {directory}")
        store[spec.version_id] = spec
    for spec in store.values():
        if spec.parent and spec.parent not in store:
            raise SpecError(f"{spec.version_id}: parent {spec.parent} not found")
    return store


def resolve_prompt_spec(
    ref: str, taxonomy: Taxonomy, spec_dir: str | Path | None = None
) -> PromptSpec:
    """Resolve a version id (``P19``) or a path to a spec file."""
    path = Path(ref)
    if path.suffix in (".yaml", ".yml") or path.is_file():
        return load_prompt_spec(path, taxonomy)
    directory = Path(spec_dir) if spec_dir is not None else bundled_spec_dir()
    candidate = directory / f"{ref}.yaml"
    if candidate.is_file():
        spec = load_prompt_spec(candidate, taxonomy)
        if spec.version_id == ref:
            return spec
    store = load_spec_store(directory, taxonomy)
    if ref not in store:
        raise FileError(f"no prompt spec with version {ref!r} in {directory}")
    return store[ref]


# -- rendering ---------------------------------------------------------------


def format_label_line(name: str, confidence: float, reason: str) -> str:
    return f"label: {name}; confidence: {confidence:.2f}; reason: {reason}"


def _sections(spec: PromptSpec, comment_text: str) -> list[str]:
    defs = "\n".join(
        f"{i}. {spec.name_of(c)}: {spec.definitions[c]}" for i, c in enumerate(CATEGORIES, 1)
    )
    blocks = [
        f"## Role\n{spec.role_text}",
        f"## Task\n{spec.task_text}",
        f"## Category definitions\n{defs}",
    ]
    if spec.examples:
        entries = []
        for i, ex in enumerate(spec.examples, 1):
            lines = [f"### Example {i}", f"Comment: {escape_comment(ex.text)}"]
            lines += [format_label_line(spec.name_of(c), conf, ex.reasoning) for c, conf in ex.labels]
            entries.append("\n".join(lines))
        blocks.append("## Examples\n" + "\n\n".join(entries))
    if spec.guidelines:
        blocks.append("## Classification guidelines\n" + "\n".join(f"- {g}" for g in spec.guidelines))
    blocks.append(f"## Output format\n{spec.output_format}")
    blocks.append(
        f"## Comment to classify\n{BEGIN_MARKER}\n{escape_comment(comment_text)}\n{END_MARKER}"
    )
    return blocks


SYSTEM_BLOCKS = 3


def render_prompt(spec: PromptSpec, comment_text: str) -> str:
    return "\n\n".join(_sections(spec, comment_text))


def render_messages(spec: PromptSpec, comment_text: str) -> list[dict[str, str]]:
    """Split the rendered prompt into a system and a user chat message.

    Role, task and definitions form the system message; everything after
    (examples, guidelines, output format, target) is the user message. Joining
    the two contents with a blank line reproduces :func:`render_prompt`.
    """
    blocks = _sections(spec, comment_text)
    return [
        {"role": "system", "content": "\n\n".join(blocks[:SYSTEM_BLOCKS])},
        {"role": "user", "content": "\n\n".join(blocks[SYSTEM_BLOCKS:])},
    ]


def extract_target(rendered: str) -> str:
    """Recover the target comment from a rendered prompt."""
    lines = rendered.split("\n")
    starts = [i for i, line in enumerate(lines) if line == BEGIN_MARKER]
    if len(starts) != 1 or starts[0] + 2 >= len(lines) or lines[starts[0] + 2] != END_MARKER:
        raise ValueError("rendered prompt has no unique target block")
    return unescape_comment(lines[starts[0] + 1])


def count_examples(rendered: str) -> int:
    return sum(1 for line in rendered.split("\n") if re.fullmatch(r"### Example \d+", line))


# -- hashing -----------------------------------------------------------------

_UNSET = "-"


def request_digest(
    rendered: str,
    model_id: str = _UNSET,
    temperature: float | None = None,
    top_p: float | None = None,
    max_tokens: int | None = None,
) -> str:
    """SHA-256 over the model parameters and the exact rendered bytes."""

    def fmt(v):
        return _UNSET if v is None else repr(float(v)) if isinstance(v, float) else str(v)

    header = "\x1f".join(
        ["modgate-request-v1", model_id, fmt(temperature), fmt(top_p), fmt(max_tokens)]
    )
    h = hashlib.sha256(header.encode("utf-8"))
    h.update(b"\x00")
    h.update(rendered.encode("utf-8", "surrogatepass"))
    return h.hexdigest()


def prompt_hash(spec: PromptSpec, comment_text: str, config=None) -> str:
    """Digest of ``render_prompt(spec, comment_text)``.

    Without ``config`` the model parameters are left as placeholders; with a
    :class:`~modgate.modelgw.ModelConfig` the result equals the gateway's
    cache key for the same request.
    """
    rendered = render_prompt(spec, comment_text)
    if config is None:
        return request_digest(rendered)
    return request_digest(
        rendered, config.model_id, config.temperature, config.top_p, config.max_tokens
    )


# -- diffing -----------------------------------------------------------------


@dataclass(frozen=True)
class SpecDiff:
    a: str
    b: str
    fields_changed: tuple[str, ...]
    definitions_changed: tuple[Category, ...]
    labels_renamed: tuple[tuple[Category, str, str], ...]
    examples_added: tuple[str, ...]
    examples_removed: tuple[str, ...]
    examples_relabeled: tuple[str, ...]
    example_count: tuple[int, int]
    guidelines_added: tuple[str, ...]
    guidelines_removed: tuple[str, ...]

    @property
    def example_delta(self) -> int:
        return self.example_count[1] - self.example_count[0]

    def is_empty(self) -> bool:
        return not self.summary()

    def summary(self) -> list[str]:
        out = []
        if self.example_delta:
            n0, n1 = self.example_count
            out.append(f"{self.example_delta:+d} examples ({n0} -> {n1})")
        if self.examples_added:
            out.append(f"{len(self.examples_added)} examples added")
        if self.examples_removed:
            out.append(f"{len(self.examples_removed)} examples removed")
        if self.examples_relabeled:
            out.append(f"{len(self.examples_relabeled)} examples relabeled")
        for cat, old, new in self.labels_renamed:
            out.append(f"label {cat.value} renamed {old!r} -> {new!r}")
        if self.definitions_changed:
            out.append(
                "definitions changed: " + ", ".join(c.value for c in self.definitions_changed)
            )
        if self.guidelines_added:
            out.append(f"+{len(self.guidelines_added)} guidelines")
        if self.guidelines_removed:
            out.append(f"-{len(self.guidelines_removed)} guidelines")
        out.extend(f"{name} changed" for name in self.fields_changed)
        return out


def _multiset_minus(a, b) -> tuple:
    left = Counter(b)
    out = []
    for item in a:
        if left[item]:
            left[item] -= 1
        else:
            out.append(item)
    return tuple(out)


def diff_specs(a: PromptSpec, b: PromptSpec) -> SpecDiff:
    fields = tuple(
        name
        for name, attr in (("role", "role_text"), ("task", "task_text"), ("output format", "output_format"))
        if getattr(a, attr) != getattr(b, attr)
    )
    a_ex = {ex.text: ex for ex in a.examples}
    b_ex = {ex.text: ex for ex in b.examples}
    relabeled = tuple(
        t for t in b_ex if t in a_ex and (a_ex[t].labels, a_ex[t].reasoning) != (b_ex[t].labels, b_ex[t].reasoning)
    )
    return SpecDiff(
        a=a.version_id,
        b=b.version_id,
        fields_changed=fields,
        definitions_changed=tuple(c for c in CATEGORIES if a.definitions[c] != b.definitions[c]),
        labels_renamed=tuple(
            (c, a.name_of(c), b.name_of(c)) for c in CATEGORIES if a.name_of(c) != b.name_of(c)
        ),
        examples_added=_multiset_minus([e.text for e in b.examples], [e.text for e in a.examples]),
        examples_removed=_multiset_minus([e.text for e in a.examples], [e.text for e in b.examples]),
        examples_relabeled=relabeled,
        example_count=(len(a.examples), len(b.examples)),
        guidelines_added=_multiset_minus(b.guidelines, a.guidelines),
        guidelines_removed=_multiset_minus(a.guidelines, b.guidelines),
    )
