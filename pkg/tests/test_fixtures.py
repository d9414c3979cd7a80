import pytest

from modgate.errlab import misclassification_report, run_from_records
from modgate.evalkit import binary_collapse, evaluate_matrix
from modgate.modelgw import Gateway, load_model_config, record_replay
from modgate.records import score_response
from modgate.taxonomy import Category
from tests_support import FIXTURE_ROWS

C = Category


@pytest.fixture(scope="module")
def replay_run(specs, eval_corpus, fixtures_dir, taxonomy):
    cfg, _ = load_model_config(fixtures_dir / "replay_model.yaml")
    items = Gateway(cfg, record_replay(fixtures_dir / "replay_gpt-4o_P19.jsonl")).classify_batch(specs["P19"], eval_corpus)
    assert all(it.ok for it in items)
    recs = [
        score_response(it.comment.id, it.comment.gold, it.response.content, taxonomy,
                       prompt_version="P19", model_id=cfg.model_id, from_cache=True)
        for it in items
    ]
    return run_from_records("fixture", recs)


def test_corpus_shape(eval_corpus):
    counts = {c: 0 for c in Category}
    for comment in eval_corpus:
        counts[comment.gold] += 1
        assert comment.source == "synthetic-fixture"
    assert counts[C.NEUTRAL] == 1000
    assert all(n == 40 for c, n in counts.items() if c is not C.NEUTRAL)


def test_replay_realizes_matrix(replay_run):
    assert replay_run.matrix.to_lists() == FIXTURE_ROWS


def test_replay_exercises_parser_paths(replay_run):
    flags = [set(r.flags) for r in replay_run.records]
    assert sum("parse_failed" in f for f in flags) == 2
    assert any("multi_label" in f for f in flags)
    assert any("coerced_format" in f for f in flags)
    assert any("low_neutral_confidence" in f for f in flags)


def test_published_summary_numbers(replay_run):
    m = replay_run.matrix
    assert binary_collapse(m).fn == 103 and binary_collapse(m).fp == 6
    assert m.cell(C.DISCREDIT, C.DISCREDIT) == 7
    assert m.cell(C.DISCREDIT, C.NEUTRAL) == 21
    scores = evaluate_matrix(m).per_class
    assert round(scores[C.DISMISSING].f1, 2) == 0.75
    for cat in (C.ANTI_LGBTQ, C.MATERNAL_INSULTS, C.DISMISSING, C.DAMNING, C.STEREOTYPING, C.NEUTRAL):
        assert scores[cat].recall > 0.6
    for cat in (C.DISCREDIT, C.PHYSICAL_APPEARANCE, C.SEXUAL_HARASSMENT, C.SEXUAL_OBJECTIFICATION):
        assert scores[cat].recall < 0.3


def test_fn_groups(replay_run):
    rep = misclassification_report(replay_run)
    assert rep.fn_by_category[:3] == ((C.PHYSICAL_APPEARANCE, 22), (C.DISCREDIT, 21), (C.SEXUAL_OBJECTIFICATION, 16))
    assert (C.SEXUAL_HARASSMENT, C.ANTI_LGBTQ, 15) in rep.confusions
    assert (C.SEXUAL_OBJECTIFICATION, C.NEUTRAL, 16) in rep.confusions
