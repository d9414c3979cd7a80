import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modgate.errors import ParseError
from modgate.outparse import (
    COERCED_FORMAT,
    LONG_REASONING,
    LOW_NEUTRAL_CONFIDENCE,
    MULTI_LABEL,
    TRUNCATED,
    Classification,
    parse_text,
    primary_label,
    serialize,
)
from modgate.taxonomy import CATEGORIES, Category, default_taxonomy

C = Category


def test_single_line(taxonomy):
    c = parse_text("label: Damning; confidence: 0.82; reason: Strong condemnation.", taxonomy)
    assert c.labels == ((C.DAMNING, 0.82),)
    assert c.reasoning == "Strong condemnation."
    assert c.flags == frozenset()


def test_multi_label_sorted_by_confidence(taxonomy):
    c = parse_text(
        "label: Stereotyping; confidence: 0.6; reason: a\n"
        "label: Discredit; confidence: 0.9; reason: b\n",
        taxonomy,
    )
    assert c.labels == ((C.DISCREDIT, 0.9), (C.STEREOTYPING, 0.6))
    assert c.reasoning == "b"
    assert MULTI_LABEL in c.flags
    assert primary_label(c) is C.DISCREDIT


def test_primary_tie_goes_to_canonical_order(taxonomy):
    c = parse_text(
        "label: Damning; confidence: 0.7; reason: x\nlabel: Discredit; confidence: 0.7; reason: y", taxonomy
    )
    assert primary_label(c) is C.DISCREDIT


def test_duplicate_label_keeps_max(taxonomy):
    c = parse_text(
        "label: Damning; confidence: 0.4; reason: x\nlabel: damning; confidence: 0.8; reason: y", taxonomy
    )
    assert c.labels == ((C.DAMNING, 0.8),)
    assert MULTI_LABEL not in c.flags


@pytest.mark.parametrize(
    "text, label",
    [
        ("label: Victim Blaming; confidence: 0.7; reason: r", C.DISMISSING),
        ("label: Deflection; confidence: 0.7; reason: r", C.DISMISSING),
        ("label: None; confidence: 0.99; reason: r", C.NEUTRAL),
        ("label: Anti-LGBTQ+; confidence: 0.9; reason: r", C.ANTI_LGBTQ),
    ],
)
def test_aliases(taxonomy, text, label):
    assert primary_label(parse_text(text, taxonomy)) is label


def test_low_neutral_confidence(taxonomy):
    assert LOW_NEUTRAL_CONFIDENCE in parse_text("label: Neutral; confidence: 0.94; reason: r", taxonomy).flags
    assert LOW_NEUTRAL_CONFIDENCE not in parse_text("label: Neutral; confidence: 0.95; reason: r", taxonomy).flags


def test_tolerates_bullets_fences_percent(taxonomy):
    text = "```\n- label: Dominance; confidence: 85%; reason: pushes them out\n```"
    c = parse_text(text, taxonomy)
    assert c.labels == ((C.DOMINANCE, 0.85),)
    assert TRUNCATED not in c.flags


def test_truncated_last_line(taxonomy):
    c = parse_text("label: Damning; confidence: 0.8; reason: r\nlabel: Discr", taxonomy)
    assert c.labels == ((C.DAMNING, 0.8),)
    assert TRUNCATED in c.flags


def test_unclosed_fence_is_truncated(taxonomy):
    assert TRUNCATED in parse_text("```\nlabel: Damning; confidence: 0.8; reason: r", taxonomy).flags


def test_unknown_label_line_is_coerced(taxonomy):
    c = parse_text("label: Others; confidence: 0.9; reason: r\nlabel: Damning; confidence: 0.5; reason: s", taxonomy)
    assert c.labels == ((C.DAMNING, 0.5),)
    assert COERCED_FORMAT in c.flags


def test_out_of_range_clamped(taxonomy):
    c = parse_text("label: Damning; confidence: 1.7; reason: r", taxonomy)
    assert c.labels == ((C.DAMNING, 1.0),)
    assert COERCED_FORMAT in c.flags


def test_fallback_free_text(taxonomy):
    c = parse_text("The comment looks like Sexual Harassment (confidence 0.81).", taxonomy)
    assert c.labels == ((C.SEXUAL_HARASSMENT, 0.81),)
    assert COERCED_FORMAT in c.flags


def test_fallback_without_number(taxonomy):
    c = parse_text("I would call this Dominance.", taxonomy)
    assert c.labels == ((C.DOMINANCE, 0.5),)


def test_long_reasoning_flag(taxonomy):
    c = parse_text("label: Damning; confidence: 0.8; reason: " + "word " * 25, taxonomy)
    assert LONG_REASONING in c.flags


@pytest.mark.parametrize("text", ["", "I think this is fine.", "label: ; confidence: ; reason:", "\x00\xff"])
def test_unparseable(taxonomy, text):
    with pytest.raises(ParseError):
        parse_text(text, taxonomy)


def test_bytes_input(taxonomy):
    c = parse_text("label: Damning; confidence: 0.8; reason: ok".encode(), taxonomy)
    assert primary_label(c) is C.DAMNING


_words = st.lists(st.sampled_from(["rude", "tone", "fine", "code", "review", "ok"]), min_size=0, max_size=12)


@st.composite
def classifications(draw):
    cats = draw(st.lists(st.sampled_from(CATEGORIES), min_size=1, max_size=4, unique=True))
    confs = sorted(draw(st.lists(st.integers(0, 100), min_size=len(cats), max_size=len(cats), unique=True)), reverse=True)
    return Classification(tuple((c, v / 100) for c, v in zip(cats, confs)), " ".join(draw(_words)))


@settings(max_examples=300)
@given(classifications())
def test_roundtrip(c):
    back = parse_text(serialize(c), default_taxonomy())
    assert back.labels == c.labels
    assert back.reasoning == c.reasoning
    assert primary_label(back) is primary_label(c)


@settings(max_examples=500)
@given(st.binary(max_size=300))
def test_fuzz_never_crashes(data):
    try:
        c = parse_text(data, default_taxonomy())
    except ParseError:
        return
    assert c.labels
    assert all(0.0 <= conf <= 1.0 for _, conf in c.labels)
