import json
import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import write_jsonl
from modgate.corpus import (
    Corpus,
    LabeledComment,
    balance_sample,
    corpus_stats,
    dump_corpus,
    load_corpus,
    normalize_text,
    read_corpus_lines,
    save_corpus,
)
from modgate.errors import FileError, RecordError, Underfull
from modgate.taxonomy import CATEGORIES, HARMFUL, Category


@pytest.mark.parametrize(
    "raw, clean",
    [
        ("  hello   world  ", "hello world"),
        ("“quoted” and ‘single’", "\"quoted\" and 'single'"),
        ("a \u2014 b \u2013 c", "a - b - c"),
        ("what?!!!", "what?!"),
        ("really????", "really?"),
        ("ok...", "ok."),
        ("ok..", "ok.."),
        ("line\none\ttab", "line one tab"),
        ("bell\x07here", "bellhere"),
        ("café", "café"),
        ("aaa bbb", "aaa bbb"),
        ("", ""),
    ],
)
def test_normalize_examples(raw, clean):
    assert normalize_text(raw) == clean


def test_normalize_control_removal_can_create_a_run():
    # removing the control chars leaves "!!!" which must collapse too
    assert normalize_text("!\x00!\x01!") == "!"


@settings(max_examples=300)
@given(st.text())
def test_normalize_idempotent(s):
    once = normalize_text(s)
    assert normalize_text(once) == once


@settings(max_examples=200)
@given(st.text())
def test_normalize_output_shape(s):
    out = normalize_text(s)
    assert out == out.strip()
    assert "  " not in out
    assert not any(unicodedata.category(ch) == "Cc" for ch in out)
    assert unicodedata.normalize("NFC", out) == out


def _rec(i, label, text=None, **kw):
    return {"id": f"c{i}", "text": text or f"comment number {i}", "label": label, **kw}


def test_load_corpus_canonicalizes(tmp_path, taxonomy):
    p = write_jsonl(tmp_path / "c.jsonl", [
        _rec(1, "Victim Blaming"),
        _rec(2, "none"),
        {"id": 3, "text": "  spaced   out ", "label": "Anti-LGBTQ+", "source": "augmented"},
    ])
    corpus = load_corpus(p, taxonomy)
    assert [c.gold for c in corpus] == [Category.DISMISSING, Category.NEUTRAL, Category.ANTI_LGBTQ]
    assert corpus[2].id == "3"
    assert corpus[2].text == "spaced out"
    assert corpus[2].source == "augmented"


@pytest.mark.parametrize(
    "bad, cause",
    [
        (_rec(9, "Others"), "bad label"),
        (_rec(9, "sexual reference"), "bad label"),
        (_rec(9, ["Discredit", "Damning"]), "bad label"),
        (_rec(9, "Discredit", text="   \n "), "empty text"),
        (_rec(1, "Discredit"), "duplicate id"),
        ({"text": "no id", "label": "Neutral"}, "malformed record"),
        (_rec(9, "Neutral", source="scraped"), "malformed record"),
    ],
)
def test_load_corpus_record_errors(tmp_path, taxonomy, bad, cause):
    p = write_jsonl(tmp_path / "c.jsonl", [_rec(1, "Neutral"), bad])
    with pytest.raises(RecordError) as exc:
        load_corpus(p, taxonomy)
    assert exc.value.cause == cause
    assert exc.value.line == 2


def test_load_corpus_malformed_json(taxonomy):
    with pytest.raises(RecordError) as exc:
        read_corpus_lines(['{"id": "a", "text": "x", "label": "Neutral"}', "{not json"], taxonomy)
    assert exc.value.cause == "malformed record"


def test_load_corpus_missing_file(tmp_path, taxonomy):
    with pytest.raises(FileError):
        load_corpus(tmp_path / "absent.jsonl", taxonomy)


def test_dump_roundtrip(tmp_path, taxonomy):
    corpus = Corpus(tuple(
        LabeledComment(f"id{i}", f"text “{i}”", cat, "original") for i, cat in enumerate(CATEGORIES)
    ))
    p = tmp_path / "out.jsonl"
    save_corpus(corpus, p)
    again = load_corpus(p, taxonomy)
    assert [(c.id, c.gold) for c in again] == [(c.id, c.gold) for c in corpus]
    assert json.loads(p.read_text("utf-8").splitlines()[0]) == {
        "id": "id0", "text": "text “0”", "label": "Discredit", "source": "original"
    }


def _supply(n_harm=50, n_neutral=1200):
    comments = []
    for cat in CATEGORIES:
        n = n_neutral if cat is Category.NEUTRAL else n_harm
        comments += [LabeledComment(f"{cat.value}-{i}", f"{cat.value} text {i}", cat) for i in range(n)]
    return Corpus(tuple(comments))


def test_balance_sample_counts_and_order():
    corpus = _supply()
    sample = balance_sample(corpus, 40, 1000, seed=7)
    stats = corpus_stats(sample)
    assert all(stats[c] == 40 for c in HARMFUL)
    assert stats[Category.NEUTRAL] == 1000
    assert len(sample) == 1440
    assert sample.seed == 7
    positions = {c.id: i for i, c in enumerate(corpus)}
    idx = [positions[c.id] for c in sample]
    assert idx == sorted(idx)


def test_balance_sample_seeded():
    corpus = _supply()
    a = balance_sample(corpus, 40, 1000, seed=3)
    b = balance_sample(corpus, 40, 1000, seed=3)
    c = balance_sample(corpus, 40, 1000, seed=4)
    assert dump_corpus(a) == dump_corpus(b)
    assert dump_corpus(a) != dump_corpus(c)


def test_balance_sample_underfull():
    comments = list(_supply())
    comments = [c for c in comments if not (c.gold is Category.DAMNING and c.id.endswith(tuple(f"-{i}" for i in range(39, 50))))]
    with pytest.raises(Underfull) as exc:
        balance_sample(Corpus(tuple(comments)), 40, 1000, seed=0)
    assert str(exc.value) == "Underfull Damning 39/40"
    assert (exc.value.have, exc.value.need) == (39, 40)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5), st.integers(0, 8), st.integers(0, 2**32))
def test_balance_sample_without_replacement(per, neutral, seed):
    corpus = _supply(n_harm=5, n_neutral=8)
    sample = balance_sample(corpus, per, neutral, seed)
    ids = [c.id for c in sample]
    assert len(ids) == len(set(ids)) == per * 11 + neutral
