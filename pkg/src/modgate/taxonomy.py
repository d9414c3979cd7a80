"""The closed 12-category harm taxonomy and label canonicalization."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from modgate.errors import FileError, SchemaError, UnknownLabel


class Category(str, enum.Enum):
    """Canonical categories, declared in canonical order (Neutral last)."""

    DISCREDIT = "Discredit"
    STEREOTYPING = "Stereotyping"
    SEXUAL_HARASSMENT = "SexualHarassment"
    THREATS_OF_VIOLENCE = "ThreatsOfViolence"
    MATERNAL_INSULTS = "MaternalInsults"
    SEXUAL_OBJECTIFICATION = "SexualObjectification"
    ANTI_LGBTQ = "AntiLGBTQ"
    PHYSICAL_APPEARANCE = "PhysicalAppearance"
    DOMINANCE = "Dominance"
    DAMNING = "Damning"
    DISMISSING = "Dismissing"
    NEUTRAL = "Neutral"

    @property
    def index(self) -> int:
        return _ORDER[self]

    def __str__(self) -> str:
        return self.value


CATEGORIES: tuple[Category, ...] = tuple(Category)
_ORDER = {c: i for i, c in enumerate(CATEGORIES)}
HARMFUL: tuple[Category, ...] = tuple(c for c in CATEGORIES if c is not Category.NEUTRAL)


def is_harmful(category: Category) -> bool:
    return category is not Category.NEUTRAL


@dataclass(frozen=True)
class CategoryDef:
    category: Category
    display_name: str
    definition: str
    behavioral_cues: tuple[str, ...] = ()
    aliases: tuple[str, ...] = ()

    def names(self) -> list[str]:
        """Every spelling that canonicalizes to this category."""
        return [self.category.value, self.display_name, *self.aliases]


@dataclass(frozen=True)
class Taxonomy:
    defs: tuple[CategoryDef, ...]
    _lookup: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        cats = [d.category for d in self.defs]
        if cats != list(CATEGORIES):
            raise SchemaError("taxonomy must list all 12 categories in canonical order")
        lookup: dict[str, Category] = {}
        for d in self.defs:
            if not d.definition.strip():
                raise SchemaError(f"{d.category.value}: empty definition")
            for name in d.names():
                key = _fold(name)
                if not key:
                    continue
                owner = lookup.setdefault(key, d.category)
                if owner is not d.category:
                    raise SchemaError(
                        f"duplicate alias {name!r}: claimed by {owner.value} and {d.category.value}"
                    )
        self._lookup.update(lookup)

    def __getitem__(self, category: Category) -> CategoryDef:
        return self.defs[category.index]

    def __iter__(self):
        return iter(self.defs)

    def __len__(self) -> int:
        return len(self.defs)

    def spellings(self) -> dict[str, Category]:
        """Case-folded spelling -> category, for every accepted name."""
        return dict(self._lookup)


def _fold(text: str) -> str:
    return " ".join(text.split()).casefold()


def canonicalize_label(raw: str, taxonomy: Taxonomy) -> Category:
    try:
        return taxonomy._lookup[_fold(raw)]
    except KeyError:
        raise UnknownLabel(raw) from None


def _as_str_list(value, where: str) -> tuple[str, ...]:
    if value is None:
        return ()
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SchemaError(f"{where}: expected a list of strings")
    return tuple(value)


def parse_taxonomy(data) -> Taxonomy:
    """Build a validated taxonomy from the decoded schema document."""
    if isinstance(data, dict):
        data = data.get("categories")
    if not isinstance(data, list):
        raise SchemaError("schema must contain a 'categories' list")

    by_cat: dict[Category, CategoryDef] = {}
    for i, rec in enumerate(data):
        if not isinstance(rec, dict):
            raise SchemaError(f"record {i}: expected a mapping")
        name = rec.get("canonical_name")
        try:
            cat = Category(name)
        except ValueError:
            raise SchemaError(f"record {i}: unknown canonical_name {name!r}") from None
        if cat in by_cat:
            raise SchemaError(f"duplicate category {cat.value}")
        definition = rec.get("definition")
        if not isinstance(definition, str) or not definition.strip():
            raise SchemaError(f"{cat.value}: definition must be non-empty text")
        by_cat[cat] = CategoryDef(
            category=cat,
            display_name=str(rec.get("display_name") or cat.value),
            definition=definition.strip(),
            behavioral_cues=_as_str_list(rec.get("cues"), f"{cat.value}.cues"),
            aliases=_as_str_list(rec.get("aliases"), f"{cat.value}.aliases"),
        )

    missing = [c.value for c in CATEGORIES if c not in by_cat]
    if missing:
        raise SchemaError(f"missing categories: {', '.join(missing)}")
    return Taxonomy(tuple(by_cat[c] for c in CATEGORIES))


def load_taxonomy(path: str | Path | None = None) -> Taxonomy:
    """Load a taxonomy schema file; ``None`` loads the bundled default."""
    if path is None:
        text = resources.files("modgate.data").joinpath("taxonomy.yaml").read_text("utf-8")
    else:
        try:
            text = Path(path).read_text("utf-8")
        except OSError as exc:
            raise FileError(f"cannot read taxonomy {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SchemaError(f"taxonomy is not valid YAML: {exc}") from exc
    return parse_taxonomy(data)


_default: Taxonomy | None = None


def default_taxonomy() -> Taxonomy:
    global _default
    if _default is None:
        _default = load_taxonomy()
    return _default
