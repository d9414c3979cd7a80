"""Regenerate the bundled prompt specs P00..P19 under src/modgate/data/specs.

The specs are ordinary YAML files and may be edited by hand; this script
exists so the lineage (which examples, definitions and rules each version
adds or drops) stays readable in one place.

    python scripts/build_specs.py
"""

from __future__ import annotations

from pathlib import Path

import yaml

OUT = Path(__file__).resolve().parents[1] / "src" / "modgate" / "data" / "specs"

ROLE = (
    "You maintain an open source project hosted on GitHub. You want the project's "
    "discussions to stay welcoming to contributors of every gender identity."
)
TASK = (
    "Read the developer comment below and decide whether it contains sexist or "
    "misogynistic content. If it does, assign it to the matching categories from "
    "the list of definitions; otherwise label it Neutral."
)

OUTPUT_BASIC = (
    "Reply with one line per label, in exactly this form:\n"
    "label: <category name>; confidence: <0.00-1.00>; reason: <at most 20 words>\n"
    "If the comment has no sexist or misogynistic content, reply with the single label "
    "Neutral and a confidence of at least 0.95."
)
OUTPUT_STRICT = (
    OUTPUT_BASIC + "\n"
    "Write the category name exactly as it appears in the definitions. Give confidences "
    "with two decimals. List the strongest label first. Do not add any other text, "
    "headings, or code fences."
)

CATS = [
    "Discredit", "Stereotyping", "SexualHarassment", "ThreatsOfViolence",
    "MaternalInsults", "SexualObjectification", "AntiLGBTQ", "PhysicalAppearance",
    "Dominance", "Damning", "Dismissing", "Neutral",
]

BRIEF = {
    "Discredit": "Belittles someone's skills or intelligence.",
    "Stereotyping": "Generalizes based on gender.",
    "SexualHarassment": "Sexual remarks aimed at someone.",
    "ThreatsOfViolence": "Threatens physical harm.",
    "MaternalInsults": "Insults someone's mother or female relatives.",
    "SexualObjectification": "Treats a person as a sexual object.",
    "AntiLGBTQ": "Hostility toward LGBTQ+ people.",
    "PhysicalAppearance": "Criticizes someone's looks.",
    "Dominance": "Tries to control or silence women.",
    "Damning": "Strong hate or condemnation.",
    "Dismissing": "Blames the victim for the harm they experienced.",
    "Neutral": "No harmful content.",
}

ONE_SENTENCE = {
    "Discredit": "A remark that attacks someone's competence or intelligence in a belittling way.",
    "Stereotyping": "A generalization that assigns abilities, interests, or traits to people because of their gender.",
    "SexualHarassment": "An unwanted, aggressive, or mocking remark about someone's sexuality or sexual behavior.",
    "ThreatsOfViolence": "A statement that threatens or wishes physical harm on someone.",
    "MaternalInsults": "An insult delivered through someone's mother or another female relative.",
    "SexualObjectification": "A remark that reduces a person to their body or a sexual role.",
    "AntiLGBTQ": "A slur or hostile remark aimed at LGBTQ+ identities.",
    "PhysicalAppearance": "A critical or mocking remark about someone's body, looks, or clothing.",
    "Dominance": "An attempt to control, silence, or exclude women from the conversation.",
    "Damning": "An expression of intense hatred, shame, or moral condemnation of a person.",
    "Dismissing": "A remark that blames the person who was harmed instead of the one who caused it.",
    "Neutral": "A technical or ordinary comment with no sexist or misogynistic content.",
}

SECOND_SENTENCE = {
    "Discredit": "The attack targets the person rather than the code.",
    "Stereotyping": "It can be explicit or hidden in jokes about what women or men are like.",
    "SexualHarassment": "This includes propositions and jokes about someone's sex life.",
    "ThreatsOfViolence": "Threats can be direct or implied.",
    "MaternalInsults": "'Your mom' jokes count even when phrased playfully.",
    "SexualObjectification": "Gendered sexual slurs count even without a named target.",
    "AntiLGBTQ": "It includes treating LGBTQ+ identity as unwelcome in the project.",
    "PhysicalAppearance": "Jokes about weight, hair, or outfits count.",
    "Dominance": "Typical forms are telling someone to step aside or that they do not belong.",
    "Damning": "It often wishes that someone would leave, fail, or disappear.",
    "Dismissing": "It treats the reported harm as the victim's own fault.",
    "Neutral": "Technical disagreement and blunt but impersonal feedback are Neutral.",
}

RED_FLAGS = {
    "Discredit": "Red flags: sneering questions about basics, 'let someone competent do it'.",
    "Stereotyping": "Red flags: 'girls/guys are...' statements, gender-coded praise or blame.",
    "SexualHarassment": "Red flags: invitations to private places, comments on someone's love life.",
    "ThreatsOfViolence": "Red flags: 'I will find you', references to hitting or breaking things.",
    "MaternalInsults": "Red flags: mom, grandma, or sister used as the punchline.",
    "SexualObjectification": "Red flags: focus on bodies or photos instead of the work.",
    "AntiLGBTQ": "Red flags: 'gay' as an insult, mocking pronouns or pride.",
    "PhysicalAppearance": "Red flags: hair, weight, skirts, or makeup mentioned critically.",
    "Dominance": "Red flags: 'real engineers', 'stay out of', 'nobody asked you'.",
    "Damning": "Red flags: 'disgrace', 'shame on you', 'delete your account'.",
    "Dismissing": "Red flags: 'why didn't you say so earlier', 'it was only a joke'.",
    "Neutral": "",
}

EDGE_CASES = {
    "Discredit": "Mixed with a gendered slur, prefer Discredit only if the attack is mainly about ability.",
    "Stereotyping": "Sarcastic praise that relies on a gender trope is still Stereotyping.",
    "SexualHarassment": "Mocking someone's sexuality is Sexual Harassment even when LGBTQ+ words appear.",
    "ThreatsOfViolence": "Hyperbole aimed at a person ('deserve a punch') counts; violence against objects alone does not.",
    "MaternalInsults": "An insult to any female relative qualifies, including grandmothers and wives.",
    "SexualObjectification": "Profanity that is a gendered sexual slur belongs here even in general frustration.",
    "AntiLGBTQ": "Mixed sexist and homophobic slurs: choose the identity that is attacked most directly.",
    "PhysicalAppearance": "Health 'concern' that is really about someone's body counts.",
    "Dominance": "Statements that women do not belong in tech are Dominance, not Discredit.",
    "Damning": "Condemnation of the person, not of the code, is required.",
    "Dismissing": "Questions that cast doubt on a harassment report count.",
    "Neutral": "Software terms that sound loaded (for example primary and replica) are Neutral.",
}

DEFLECTION = (
    "Deflects responsibility for a harm onto the person who experienced it, or downplays "
    "that the harm happened. Shifting blame, asking why the victim did not react sooner, "
    "and undermining their credibility all count."
)
DISMISSING = (
    "Minimizes, deflects, or silences a reported harm. Covers downplaying ('just a joke'), "
    "shifting blame onto the person who was harmed, doubting their account, and shutting "
    "the topic down."
)
DISCREDIT_V17 = "Attacks a person's competence or intelligence. The target is the person, not the code."
HARASSMENT_V17 = "Sexual propositions, or mockery of someone's sexuality or sex life."
STEREOTYPING_V19 = (
    "Generalizes about people using gender roles, traits, or gendered tropes, including "
    "nicknames like 'Karen' and jokes about what women or men are like."
)


def ex(text, labels, reasoning):
    return {
        "text": text,
        "labels": [{"category": c, "confidence": v} for c, v in labels],
        "reasoning": reasoning,
    }


POOL = {
    "D1": ex("Did you even run this before opening the PR? Let someone who understands async take over.",
             [("Discredit", 0.90)], "Belittles the author's competence and says someone more capable should replace them."),
    "D2": ex("Honestly surprised you got commit access with code like this.",
             [("Discredit", 0.85)], "Questions the contributor's skill in a contemptuous way."),
    "D3": ex("Sweetie, pointers are hard, maybe stick to writing the docs.",
             [("Discredit", 0.80), ("Stereotyping", 0.55)], "Condescending pet name paired with an attack on technical ability."),
    "S1": ex("Of course the CSS is pixel perfect, a girl wrote it.",
             [("Stereotyping", 0.90)], "Credits the work to gender instead of skill."),
    "S2": ex("Classic Karen move, demanding to speak to the maintainer.",
             [("Stereotyping", 0.88)], "Uses 'Karen' as a gendered trope."),
    "S3": ex("Guys are just naturally better at low-level stuff, no offense.",
             [("Stereotyping", 0.92)], "Generalizes technical ability by gender."),
    "H1": ex("Skip the standup and come up to my hotel room, I'll review your code there.",
             [("SexualHarassment", 0.93)], "Unwanted sexual proposition aimed at a contributor."),
    "H2": ex("Bet your love life is as messy as this merge.",
             [("SexualHarassment", 0.78)], "Mocks the person's sex life."),
    "H3": ex("Your commit messages read like pickup lines, are you flirting with the reviewers?",
             [("SexualHarassment", 0.72)], "Sexualized mockery aimed at the contributor."),
    "T1": ex("Break the build one more time and I will come over and smash your keyboard over your head.",
             [("ThreatsOfViolence", 0.95)], "Explicit threat of physical harm."),
    "T2": ex("Keep closing my issues and see what happens when I find out where you live.",
             [("ThreatsOfViolence", 0.90)], "Implied physical threat tied to the person's home."),
    "T3": ex("People like you deserve a punch for shipping this.",
             [("ThreatsOfViolence", 0.85)], "Says the person deserves physical violence."),
    "M1": ex("Your mother could write a better regex blindfolded.",
             [("MaternalInsults", 0.90)], "Insults the contributor through their mother."),
    "M2": ex("Did your grandma approve this PR too?",
             [("MaternalInsults", 0.75)], "Mocks the contributor through a female relative."),
    "M3": ex("Your mom's cooking has fewer bugs than this.",
             [("MaternalInsults", 0.82)], "Insult framed around the contributor's mother."),
    "O1": ex("Nice patch, but I'd rather see that swimsuit photo of you again.",
             [("SexualObjectification", 0.92)], "Reduces the contributor to her body."),
    "O2": ex("What a useless b***h wrote this handler.",
             [("SexualObjectification", 0.80)], "Gendered sexual slur aimed at the author."),
    "O3": ex("Put her on the conference booth, she will pull more sign-ups than the demo.",
             [("SexualObjectification", 0.88)], "Treats a woman as decoration to attract attention."),
    "A1": ex("Keep your rainbow politics out of our issue tracker.",
             [("AntiLGBTQ", 0.90)], "Treats LGBTQ+ identity as unwelcome in the project."),
    "A2": ex("Adding pronouns to the contributors file is ridiculous, nobody cares about that trans stuff.",
             [("AntiLGBTQ", 0.88)], "Dismisses and mocks transgender identities."),
    "A3": ex("This config format is so gay.",
             [("AntiLGBTQ", 0.75)], "Uses an LGBTQ+ identity as an insult."),
    "P1": ex("Fix your hair before the next video call, it's as messy as this diff.",
             [("PhysicalAppearance", 0.88)], "Mocks the person's appearance."),
    "P2": ex("That skirt in your profile photo is not exactly professional.",
             [("PhysicalAppearance", 0.80)], "Critical remark about a woman's clothing."),
    "P3": ex("No wonder the build is slow, it has to carry your weight.",
             [("PhysicalAppearance", 0.85)], "Body-shaming joke about weight."),
    "Dm1": ex("Let the real engineers handle the architecture, you can take notes.",
              [("Dominance", 0.88)], "Pushes the person out of the decision making."),
    "Dm2": ex("Women should stay out of kernel discussions, this isn't the place.",
              [("Dominance", 0.93), ("Stereotyping", 0.40)], "Says women do not belong in the discussion."),
    "Dm3": ex("Nobody asked for your opinion, just merge what we tell you.",
              [("Dominance", 0.80)], "Tries to silence the contributor."),
    "Dg1": ex("You are an embarrassment to this project, delete your account.",
              [("Damning", 0.92)], "Shames the person and wishes them gone."),
    "Dg2": ex("Shame on you, people like you are rotting open source.",
              [("Damning", 0.90)], "Strong moral condemnation of the person."),
    "Dg3": ex("I hope every project you touch fails.",
              [("Damning", 0.80)], "Expresses intense hostility toward the person."),
    "Ds1": ex("If it bothered you so much, why didn't you say something at the time?",
              [("Dismissing", 0.85)], "Shifts responsibility onto the person who reported the harm."),
    "Ds2": ex("It was obviously a joke, you're overreacting.",
              [("Dismissing", 0.90)], "Minimizes a reported harm."),
    "Ds3": ex("Maybe you misread his tone, let's not make this a thing.",
              [("Dismissing", 0.82)], "Doubts the report and tries to shut the topic down."),
    "N1": ex("Could you split this function into smaller helpers? The nesting is hard to follow.",
             [("Neutral", 0.98)], "Technical review feedback with no harmful content."),
    "N2": ex("Shouldn't this say replica instead of primary in the warning message?",
             [("Neutral", 0.97)], "Question about terminology; no person is targeted."),
    "N3": ex("Thanks for the fix! Merging once CI passes.",
             [("Neutral", 0.99)], "Routine project logistics."),
}

SET_8 = ["D1", "S1", "H1", "T1", "M1", "A1", "Dm1", "N1"]
SET_12 = SET_8 + ["O1", "P1", "Dg1", "Ds1"]
SET_22 = SET_12 + ["D2", "S2", "H2", "T2", "M2", "O2", "A2", "P2", "Dm2", "N2"]
SET_24 = SET_22 + ["H3", "Dg2"]
SET_18 = ["D1", "S1", "H1", "T1", "M1", "M2", "O1", "O2", "O3", "A1",
          "P1", "P2", "P3", "Dm1", "Dg1", "Ds1", "N1", "N2"]
SET_33 = ["D1", "D2", "D3", "S1", "S2", "S3", "H1", "H2", "T1", "T2",
          "M1", "M2", "M3", "O1", "O2", "O3", "A1", "A2", "A3", "P1", "P2", "P3",
          "Dm1", "Dm2", "Dm3", "Dg1", "Dg2", "Ds1", "Ds2", "Ds3", "N1", "N2", "N3"]

G_MULTI = "If a comment fits several categories, list each one on its own line."
G_CONF = "Give every label a confidence between 0.00 and 1.00."
G_REASON = "Keep each reason to 20 words or fewer."
G_FORMAT = "Follow the output format exactly."
G_TONE = "Read for tone: sarcasm, backhanded praise, and 'just joking' framing can carry harm."
G_REDFLAG = "Use the red-flag cues in each definition as evidence, not as keywords to match blindly."
G_FALLBACK = "When a comment is ambiguous between a harmful category and Neutral, prefer the harmful category with a lower confidence."
G_NEUTRAL_NARROW = "Reserve Neutral for comments with no gendered or identity-based harm at all."
G_STEPS = [
    "Step 1: identify who or what the comment targets.",
    "Step 2: decide whether the target is attacked because of gender, sexuality, or a gendered trait.",
    "Step 3: pick the category whose definition matches the dominant intent.",
    "Step 4: add secondary categories only when they are clearly present.",
    "Step 5: write one output line per label, strongest first.",
]
G_PROFANITY = "Profanity alone is not harmful; profanity combined with a gendered slur, sarcasm about gender, or a sexual remark is."
G_BORDERLINE = "Distinguish mild banter between peers from harassment by asking whether a reasonable contributor would feel targeted."
G_DOMINANT = "When categories overlap, the label with the dominant intent comes first and gets the highest confidence."
G_OVERLAP_14 = "Overlap order: Threats of Violence, Sexual Harassment, Anti-LGBTQ+, Deflection, Dominance, then the remaining categories."
G_VICTIM = "Comments that blame someone for harm they experienced, or ask why they did not react sooner, are Deflection."
G_OVERLAP_19 = [
    "Overlap framework: prefer the most specific harm. Threats of Violence beats everything else.",
    "Sexual Harassment vs Anti-LGBTQ+: mockery of someone's sexuality is Sexual Harassment; hostility to LGBTQ+ identity is Anti-LGBTQ+.",
    "Discredit vs Dismissing: attacks on skill are Discredit; downplaying a reported harm is Dismissing.",
    "Discredit vs Damning: criticism of ability is Discredit; condemnation of the person's worth is Damning.",
    "Dominance vs Discredit: saying women do not belong is Dominance even when it mentions skill.",
]
G_SARCASM_19 = [
    "For sarcasm, restate the literal claim, then the intended claim, and classify the intended claim.",
    "Gendered nicknames and tropes (for example 'Karen' or blonde jokes) count as Stereotyping.",
    "Confidence guide: 0.90 and above for explicit harm, 0.60-0.89 for implied harm, below 0.60 for weak secondary labels.",
]


def stage(version):
    n = int(version[1:])
    defs = {}
    names = {}
    for c in CATS:
        if n == 0:
            d = BRIEF[c]
        elif n == 1:
            d = ONE_SENTENCE[c]
        else:
            d = ONE_SENTENCE[c] + " " + SECOND_SENTENCE[c]
        if n >= 5 and RED_FLAGS[c]:
            d += " " + RED_FLAGS[c]
        if n >= 13:
            d += " Edge case: " + EDGE_CASES[c]
        defs[c] = d
    if n >= 6:
        defs["Neutral"] = (
            "A technical or ordinary comment with no gendered, sexual, or identity-based harm. "
            "Blunt but impersonal code criticism is Neutral."
        ) + (" Edge case: " + EDGE_CASES["Neutral"] if n >= 13 else "")
    if n >= 14:
        defs["Dismissing"] = DEFLECTION
    if n >= 17:
        defs["Discredit"] = DISCREDIT_V17
        defs["SexualHarassment"] = HARASSMENT_V17
    if n >= 19:
        defs["Dismissing"] = DISMISSING
        defs["Stereotyping"] = STEREOTYPING_V19

    names["Dismissing"] = "Victim Blaming" if n < 14 else "Deflection" if n < 19 else "Dismissing"

    if n == 0:
        examples = []
    elif n == 1:
        examples = SET_8
    elif n <= 7:
        examples = SET_12
    elif n <= 10:
        examples = SET_22
    elif n <= 17:
        examples = SET_24
    elif n == 18:
        examples = SET_18
    else:
        examples = SET_33

    guidelines = [G_MULTI, G_CONF, G_REASON, G_FORMAT]
    if n == 3:
        guidelines[0] = "If a comment fits several categories, give one line per category."
    if n >= 4:
        guidelines[0] = "If a comment fits several categories, list each one on its own line."
    if n >= 5:
        guidelines += [G_TONE, G_REDFLAG]
    if n >= 6:
        guidelines.append(G_FALLBACK)
    if n >= 7:
        guidelines.append(G_NEUTRAL_NARROW)
    if n >= 8:
        guidelines += G_STEPS[: 3 if n == 8 else 4 if n == 9 else 5]
    if n >= 11:
        guidelines.append(G_PROFANITY)
    if n >= 12:
        guidelines.append(G_BORDERLINE)
    if n >= 13:
        guidelines.append(G_DOMINANT)
    if n >= 14:
        guidelines.append(G_VICTIM)
    if n >= 15:
        guidelines.append(G_OVERLAP_14)
    if n == 16:
        guidelines.append("Do not use Deflection for ordinary disagreement about code.")
    if n >= 19:
        guidelines = [g for g in guidelines if g not in (G_OVERLAP_14, G_VICTIM)]
        guidelines += G_OVERLAP_19 + G_SARCASM_19
        guidelines.append(
            "Comments that minimize a harm, doubt the person who reported it, or blame them for it are Dismissing."
        )

    output = OUTPUT_BASIC if n < 8 else OUTPUT_STRICT
    return defs, names, [POOL[k] for k in examples], guidelines, output


CHANGELOG = {
    "P01": "Definitions trimmed to one line each. Adds examples 1-8 with confidence and reason.",
    "P02": "Definitions get a second sentence. Examples 9-12 added.",
    "P03": "Multi-label guideline reworded.",
    "P04": "Multi-label guideline reverted to the P02 wording.",
    "P05": "New guideline on reading tone. Definitions list warning signs.",
    "P06": "Ambiguous text now leans toward a harmful label. Tighter Neutral definition.",
    "P07": "Neutral is reserved for comments without identity-based harm.",
    "P08": "Examples 13-22 added. Numbered labeling steps. Stricter output block.",
    "P09": "Labeling step 4 added.",
    "P10": "Labeling step 5 added.",
    "P11": "Examples 23-24 cover crude jokes between peers. Rule on swearing.",
    "P12": "Guideline for telling banter apart from mild harassment.",
    "P13": "Definitions list edge cases. Rule to pick the main intent.",
    "P14": "Victim Blaming label shown as Deflection. Definition rewritten around behaviour.",
    "P15": "Deflection added to the tie-break order.",
    "P16": "Deflection is not for ordinary technical disagreement.",
    "P17": "Discredit and Sexual Harassment definitions shortened.",
    "P18": "Example set reduced to 18.",
    "P19": "Deflection label shown as Dismissing. Example set grows to 33. Tie-break rules spelled out.",
}


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for n in range(20):
        vid = f"P{n:02d}"
        defs, names, examples, guidelines, output = stage(vid)
        doc = {
            "version_id": vid,
            "parent": f"P{n - 1:02d}" if n else None,
            "changelog": CHANGELOG.get(vid, "Baseline with short definitions and no examples."),
            "role": ROLE,
            "task": TASK,
            "label_names": names,
            "definitions": defs,
            "examples": examples,
            "guidelines": guidelines,
            "output_format": output,
        }
        if doc["parent"] is None:
            del doc["parent"]
        path = OUT / f"{vid}.yaml"
        path.write_text(
            yaml.safe_dump(doc, sort_keys=False, allow_unicode=True, width=100), encoding="utf-8"
        )
        print(f"{path.name}: {len(examples)} examples, {len(guidelines)} guidelines")


if __name__ == "__main__":
    main()
