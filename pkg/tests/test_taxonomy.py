import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

from modgate.errors import SchemaError, UnknownLabel
from modgate.taxonomy import (
    CATEGORIES,
    HARMFUL,
    Category,
    canonicalize_label,
    is_harmful,
    load_taxonomy,
    parse_taxonomy,
)


def _records(taxonomy):
    return [
        {
            "canonical_name": d.category.value,
            "display_name": d.display_name,
            "definition": d.definition,
            "cues": list(d.behavioral_cues),
            "aliases": list(d.aliases),
        }
        for d in taxonomy
    ]


def test_twelve_categories_neutral_last():
    assert len(CATEGORIES) == 12
    assert CATEGORIES[-1] is Category.NEUTRAL
    assert len(HARMFUL) == 11
    assert [c.index for c in CATEGORIES] == list(range(12))


def test_harmful_predicate():
    assert not is_harmful(Category.NEUTRAL)
    assert all(is_harmful(c) for c in HARMFUL)


def test_default_taxonomy_loads(taxonomy):
    assert len(taxonomy) == 12
    assert [d.category for d in taxonomy] == list(CATEGORIES)
    assert all(d.definition for d in taxonomy)


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("Victim Blaming", Category.DISMISSING),
        ("victim   blaming", Category.DISMISSING),
        ("Deflection", Category.DISMISSING),
        ("  dismissing ", Category.DISMISSING),
        ("None", Category.NEUTRAL),
        ("Anti-LGBTQ+", Category.ANTI_LGBTQ),
        ("AntiLGBTQ", Category.ANTI_LGBTQ),
        ("Sexual Harassment", Category.SEXUAL_HARASSMENT),
        ("THREATSOFVIOLENCE", Category.THREATS_OF_VIOLENCE),
    ],
)
def test_canonicalize_known_spellings(taxonomy, raw, expected):
    assert canonicalize_label(raw, taxonomy) is expected


@pytest.mark.parametrize("raw", ["Others", "sexual reference", "", "Harmful"])
def test_canonicalize_rejects_unknown(taxonomy, raw):
    with pytest.raises(UnknownLabel) as exc:
        canonicalize_label(raw, taxonomy)
    assert exc.value.raw == raw


@given(st.sampled_from(CATEGORIES), st.sampled_from([str.upper, str.lower, str.title]), st.text(" \t", max_size=3))
def test_canonical_names_are_fixed_points(cat, case, pad):
    from modgate.taxonomy import default_taxonomy

    assert canonicalize_label(pad + case(cat.value) + pad, default_taxonomy()) is cat


def test_schema_records_resorted(taxonomy):
    recs = _records(taxonomy)[::-1]
    t = parse_taxonomy({"categories": recs})
    assert [d.category for d in t] == list(CATEGORIES)


def test_schema_missing_category(taxonomy):
    recs = _records(taxonomy)[:-1]
    with pytest.raises(SchemaError, match="missing categories: Neutral"):
        parse_taxonomy({"categories": recs})


def test_schema_unknown_category(taxonomy):
    recs = _records(taxonomy) + [{"canonical_name": "Others", "definition": "x"}]
    with pytest.raises(SchemaError, match="Others"):
        parse_taxonomy({"categories": recs})


def test_schema_duplicate_category(taxonomy):
    recs = _records(taxonomy)
    recs.append(dict(recs[0]))
    with pytest.raises(SchemaError, match="duplicate"):
        parse_taxonomy({"categories": recs})


def test_schema_alias_claimed_twice(taxonomy):
    recs = _records(taxonomy)
    recs[0]["aliases"] = ["Deflection"]
    with pytest.raises(SchemaError):
        parse_taxonomy({"categories": recs})


def test_schema_empty_definition(taxonomy):
    recs = _records(taxonomy)
    recs[3]["definition"] = "  "
    with pytest.raises(SchemaError, match="definition"):
        parse_taxonomy({"categories": recs})


def test_load_from_file(tmp_path, taxonomy):
    p = tmp_path / "tax.yaml"
    p.write_text(yaml.safe_dump({"categories": _records(taxonomy)}), encoding="utf-8")
    t = load_taxonomy(p)
    assert t.spellings() == taxonomy.spellings()
