"""Regenerate the bundled offline fixtures under src/modgate/data/fixtures.

* ``eval_corpus.jsonl``: 1,440 synthetic comments, 40 per harmful category
  and 1,000 Neutral.
* ``replay_gpt-4o_P19.jsonl``: one recorded response per comment, keyed by
  the request digest of prompt P19 under ``replay_model.yaml``. Parsing the
  responses and taking primary labels yields ``MATRIX`` below.

``MATRIX`` fixes the cells known for the best run (37/40 Anti-LGBTQ+,
34/40 Dismissing, 994 Neutral, 7/40 Discredit with 21 missed as Neutral,
15 Sexual Harassment -> Anti-LGBTQ+, 16 Sexual Objectification -> Neutral,
15 Sexual Objectification -> Discredit, 22 missed Physical Appearance,
103 binary false negatives, 6 binary false positives). The remaining cells
are invented but keep every row sum at 40 or 1,000 and put 1,211 comments on
the diagonal.

Re-run after any change to P19 or to the request digest:

    python scripts/build_fixtures.py
"""

from __future__ import annotations

import json
import random
from pathlib import Path

import yaml

from modgate.corpus import Corpus, LabeledComment, dump_corpus
from modgate.modelgw import ModelConfig
from modgate.promptkit import load_prompt_spec, render_prompt
from modgate.taxonomy import CATEGORIES, Category, default_taxonomy

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "modgate" / "data"
OUT = DATA / "fixtures"

C = Category
# rows: gold, columns: predicted, canonical order
MATRIX = [
    #  Dis Ste SxH Thr Mat Obj LGB Phy Dom Dam Dsm  Neu
    [7,  3,  0,  0,  0,  0,  0,  0,  2,  2,  5,  21],   # Discredit
    [3, 26,  0,  0,  0,  3,  0,  0,  2,  0,  0,   6],   # Stereotyping
    [0,  0,  9,  1,  0,  5, 15,  0,  0,  2,  0,   8],   # SexualHarassment
    [0,  0,  0, 20,  0,  0,  0,  0,  5,  8,  0,   7],   # ThreatsOfViolence
    [3,  0,  0,  0, 30,  0,  0,  3,  0,  0,  0,   4],   # MaternalInsults
    [15, 2,  2,  0,  0,  5,  0,  0,  0,  0,  0,  16],   # SexualObjectification
    [0,  0,  2,  0,  0,  0, 37,  0,  0,  0,  0,   1],   # AntiLGBTQ
    [2,  0,  0,  0,  2,  4,  0, 10,  0,  0,  0,  22],   # PhysicalAppearance
    [8,  3,  0,  0,  0,  0,  0,  0, 14,  0,  6,   9],   # Dominance
    [3,  0,  0,  0,  0,  0,  0,  0,  0, 25,  6,   6],   # Damning
    [2,  0,  0,  0,  0,  0,  0,  0,  1,  0, 34,   3],   # Dismissing
    [1,  1,  1,  0,  0,  0,  0,  0,  2,  1,  0, 994],   # Neutral
]

TOPICS = [
    "the retry logic in the HTTP client", "the flaky CI job on macOS", "the new config loader",
    "the README install section", "the memory leak in the parser", "the release checklist",
    "the dark-mode stylesheet", "the database migration", "the plugin API", "the test fixtures",
    "the benchmark numbers", "the code-of-conduct thread", "the logging refactor",
    "the Windows build", "the issue triage bot", "the docs translation",
]

REASONS = {
    C.DISCREDIT: "Belittles the contributor's competence.",
    C.STEREOTYPING: "Relies on a gender stereotype.",
    C.SEXUAL_HARASSMENT: "Mocks the person's sexuality.",
    C.THREATS_OF_VIOLENCE: "Implies physical harm to the contributor.",
    C.MATERNAL_INSULTS: "Insults the contributor through their mother.",
    C.SEXUAL_OBJECTIFICATION: "Reduces the person to a sexual object.",
    C.ANTI_LGBTQ: "Hostile toward LGBTQ+ identity.",
    C.PHYSICAL_APPEARANCE: "Mocks the person's appearance.",
    C.DOMINANCE: "Tries to push the contributor out of the discussion.",
    C.DAMNING: "Strong condemnation of the person.",
    C.DISMISSING: "Downplays the reported harm.",
    C.NEUTRAL: "Technical discussion with no harmful content.",
}

SECONDARY = {
    C.DISCREDIT: C.DAMNING,
    C.STEREOTYPING: C.DISCREDIT,
    C.SEXUAL_HARASSMENT: C.SEXUAL_OBJECTIFICATION,
    C.THREATS_OF_VIOLENCE: C.DAMNING,
    C.MATERNAL_INSULTS: C.DISCREDIT,
    C.SEXUAL_OBJECTIFICATION: C.PHYSICAL_APPEARANCE,
    C.ANTI_LGBTQ: C.SEXUAL_HARASSMENT,
    C.PHYSICAL_APPEARANCE: C.SEXUAL_OBJECTIFICATION,
    C.DOMINANCE: C.STEREOTYPING,
    C.DAMNING: C.DISCREDIT,
    C.DISMISSING: C.DOMINANCE,
}


def response_for(pred: Category, names: dict, rng: random.Random, slot: int) -> str:
    """A model-style answer whose primary label is ``pred``."""
    name = names[pred]
    if pred is C.NEUTRAL:
        if slot in (3, 501):
            return "I think this is fine."  # unparseable, scored as Neutral
        conf = 0.90 if slot % 97 == 5 else rng.choice([0.95, 0.97, 0.98, 0.99])
        return f"label: {name}; confidence: {conf:.2f}; reason: {REASONS[pred]}"
    conf = rng.choice([0.72, 0.78, 0.81, 0.85, 0.88, 0.92])
    style = slot % 9
    if style == 0:
        sec = SECONDARY[pred]
        return (
            f"label: {name}; confidence: {conf:.2f}; reason: {REASONS[pred]}\n"
            f"label: {names[sec]}; confidence: {conf - 0.3:.2f}; reason: {REASONS[pred]}"
        )
    if style == 4:
        return f"- label: {name}; confidence: {round(conf * 100)}%; reason: {REASONS[pred]}"
    if style == 7:
        return f"The comment looks like {name} (confidence {conf:.2f}). {REASONS[pred]}"
    return f"label: {name}; confidence: {conf:.2f}; reason: {REASONS[pred]}"


def main() -> None:
    taxonomy = default_taxonomy()
    spec = load_prompt_spec(DATA / "specs" / "P19.yaml", taxonomy)
    config = ModelConfig(provider="replay", model_id="gpt-4o")
    names = {c: spec.name_of(c) for c in CATEGORIES}
    rng = random.Random(20250801)

    for row, gold in zip(MATRIX, CATEGORIES):
        want = 1000 if gold is C.NEUTRAL else 40
        assert sum(row) == want, (gold, sum(row))

    comments, predictions = [], []
    for i, gold in enumerate(CATEGORIES):
        preds = [p for j, p in enumerate(CATEGORIES) for _ in range(MATRIX[i][j])]
        rng.shuffle(preds)
        for n, pred in enumerate(preds):
            topic = TOPICS[(i * 7 + n) % len(TOPICS)]
            text = f"Synthetic fixture comment {gold.index:02d}-{n:04d} about {topic}."
            comments.append((gold, text))
            predictions.append(pred)

    order = list(range(len(comments)))
    rng.shuffle(order)
    corpus = Corpus(
        tuple(
            LabeledComment(f"fx-{k + 1:04d}", comments[idx][1], comments[idx][0], "synthetic-fixture")
            for k, idx in enumerate(order)
        )
    )
    preds = [predictions[idx] for idx in order]

    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "eval_corpus.jsonl").write_text(dump_corpus(corpus), encoding="utf-8")

    lines = []
    for slot, (comment, pred) in enumerate(zip(corpus, preds)):
        digest = config.request_digest(render_prompt(spec, comment.text))
        rec = {"digest": digest, "model_id": config.model_id, "content": response_for(pred, names, rng, slot)}
        lines.append(json.dumps(rec, ensure_ascii=False) + "\n")
    (OUT / "replay_gpt-4o_P19.jsonl").write_text("".join(lines), encoding="utf-8")

    (OUT / "replay_model.yaml").write_text(
        yaml.safe_dump(
            {"provider": "replay", "model_id": "gpt-4o", "temperature": 0.1, "top_p": 0.9,
             "max_tokens": 150, "concurrency_limit": 8},
            sort_keys=False,
        ),
        encoding="utf-8",
    )
    print(f"wrote {len(corpus)} comments and {len(lines)} replay records to {OUT}")


if __name__ == "__main__":
    main()
