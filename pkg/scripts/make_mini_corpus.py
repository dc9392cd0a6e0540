#!/usr/bin/env python3
"""Regenerate the bundled mini corpus (data/mini) and the extraction demo
(data/demo).

The corpus is a hand-built, dependency-annotated toy: two documents of short
music-domain sentences whose parse trees exercise every extraction pattern
(active subject/object, preposition chains, passives, compound and adjective
modifiers).  The gold standard maps 12 of its noun phrases to 3 concept
labels.  Everything is deterministic; rerunning must reproduce the committed
files byte for byte.
"""
from __future__ import annotations

import argparse
from pathlib import Path

DET = ("The", "the", "DET", "det")


def _rows(tokens):
    return "\n".join(
        "\t".join([str(i), form, lemma, upos, "_", "_", str(head), deprel, "_", "_"])
        for i, (form, lemma, upos, head, deprel) in enumerate(tokens, start=1))


def _np(words, head_target, head_deprel, start, det):
    """Noun phrase tokens: optional determiner, zero or more modifiers, head.
    words: [(form, lemma, upos, deprel), ...] modifiers then the head noun
    (whose deprel entry is ignored in favour of head_deprel)."""
    tokens = []
    head_index = start + (1 if det else 0) + len(words) - 1
    if det:
        tokens.append(("the", "the", "DET", head_index, "det"))
    for form, lemma, upos, deprel in words[:-1]:
        tokens.append((form, lemma, upos, head_index, deprel))
    form, lemma, upos, _ = words[-1]
    tokens.append((form, lemma, upos, head_target, head_deprel))
    return tokens, head_index


def _n(noun):
    return [(noun, noun, "NOUN", "")]


def sentence(subj, verb, obj=None, pp=None, subj_det=True, obj_det=True):
    """Active clause: subj VERB [obj] [prep pobj].  subj/obj/pp NPs are word
    lists as taken by _np; verb is (surface, lemma); pp is (prep, np_words)."""
    surface, lemma = verb
    subj_len = len(subj) + (1 if subj_det else 0)
    verb_index = subj_len + 1
    tokens, _ = _np(subj, verb_index, "nsubj", 1, subj_det)
    tokens.append((surface, lemma, "VERB", 0, "ROOT"))
    cursor = verb_index + 1
    if obj is not None:
        obj_tokens, _ = _np(obj, verb_index, "dobj", cursor, obj_det)
        tokens.extend(obj_tokens)
        cursor += len(obj_tokens)
    if pp is not None:
        prep, pobj = pp
        tokens.append((prep, prep, "ADP", verb_index, "prep"))
        prep_index = cursor
        cursor += 1
        pobj_tokens, _ = _np(pobj, prep_index, "pobj", cursor, True)
        tokens.extend(pobj_tokens)
        cursor += len(pobj_tokens)
    tokens.append((".", ".", "PUNCT", verb_index, "punct"))
    return _capitalized(tokens)


def passive(patient, participle, agent=None):
    """Passive clause: patient was VERB-ed [by agent]."""
    surface, lemma = participle
    patient_len = len(patient) + 1           # always with determiner
    verb_index = patient_len + 2             # after the auxiliary
    tokens, _ = _np(patient, verb_index, "nsubjpass", 1, True)
    tokens.append(("was", "be", "AUX", verb_index, "auxpass"))
    tokens.append((surface, lemma, "VERB", 0, "ROOT"))
    cursor = verb_index + 1
    if agent is not None:
        tokens.append(("by", "by", "ADP", verb_index, "prep"))
        prep_index = cursor
        cursor += 1
        agent_tokens, _ = _np(agent, prep_index, "pobj", cursor, True)
        tokens.extend(agent_tokens)
    tokens.append((".", ".", "PUNCT", verb_index, "punct"))
    return _capitalized(tokens)


def _capitalized(tokens):
    form, lemma, upos, head, deprel = tokens[0]
    tokens[0] = (form[0].upper() + form[1:], lemma, upos, head, deprel)
    return tokens


# gold terms: 4 instruments, 4 musicians, 4 genres
GOLD = [
    ("guitar", "Instrument"), ("piano", "Instrument"),
    ("violin", "Instrument"), ("drum", "Instrument"),
    ("guitarist", "Musician"), ("pianist", "Musician"),
    ("singer", "Musician"), ("composer", "Musician"),
    ("jazz", "Genre"), ("rock", "Genre"),
    ("blues", "Genre"), ("folk", "Genre"),
]

# (doc, sentences); verbs get explicit surface forms, no conjugation logic
DOC_A = [
    sentence(_n("guitarist"), ("plays", "play"), _n("guitar")),
    sentence(_n("pianist"), ("plays", "play"), _n("piano")),
    sentence(_n("singer"), ("plays", "play"), _n("guitar")),
    sentence(_n("guitarist"), ("tunes", "tune"), _n("guitar")),
    sentence(_n("pianist"), ("masters", "master"), _n("piano")),
    sentence(_n("student"), ("practices", "practice"), _n("violin")),
    passive(_n("violin"), ("played", "play"), _n("pianist")),
    sentence(_n("teacher"), ("plays", "play"), _n("violin")),
    sentence(_n("student"), ("plays", "play"), _n("drum")),
    sentence(_n("teacher"), ("tunes", "tune"), _n("piano")),
    sentence(_n("singer"), ("hears", "hear"), _n("drum")),
    sentence(_n("crowd"), ("hears", "hear"), _n("drum")),
    sentence(_n("guitarist"), ("performs", "perform"), pp=("in", _n("club"))),
    sentence(_n("singer"), ("performs", "perform"), pp=("in", _n("hall"))),
    sentence(_n("composer"), ("writes", "write"), _n("song")),
    passive(_n("guitar"), ("tuned", "tune"), _n("teacher")),
    sentence(_n("pianist"), ("teaches", "teach"), _n("student")),
    sentence(_n("composer"), ("admires", "admire"), _n("pianist")),
    sentence(_n("singer"), ("admires", "admire"), _n("guitarist")),
    passive(_n("piano"), ("played", "play"), _n("singer")),
    passive(_n("drum"), ("played", "play"), _n("guitarist")),
    sentence(_n("student"), ("masters", "master"), _n("drum")),
    sentence(_n("composer"), ("plays", "play"), _n("piano")),
    sentence(_n("teacher"), ("hears", "hear"), _n("violin")),
    sentence([("young", "young", "ADJ", "amod"), ("student", "student", "NOUN", "")],
             ("loves", "love"), _n("guitar")),
    passive(_n("violin"), ("tuned", "tune"), _n("student")),
]

DOC_B = [
    sentence(_n("singer"), ("sings", "sing"), _n("blues"), obj_det=False),
    sentence(_n("crowd"), ("loves", "love"), _n("blues"), obj_det=False),
    sentence(_n("guitarist"), ("loves", "love"), _n("rock"), obj_det=False),
    sentence(_n("band"), ("performs", "perform"), _n("rock"), obj_det=False),
    sentence(_n("composer"), ("writes", "write"), _n("folk"), obj_det=False),
    sentence(_n("singer"), ("loves", "love"), _n("folk"), obj_det=False),
    sentence(_n("pianist"), ("performs", "perform"), _n("jazz"), obj_det=False),
    sentence(_n("band"), ("records", "record"), _n("jazz"), obj_det=False),
    sentence(_n("singer"), ("records", "record"), _n("blues"), obj_det=False),
    sentence(_n("student"), ("enjoys", "enjoy"), _n("jazz"), obj_det=False),
    sentence(_n("crowd"), ("enjoys", "enjoy"), _n("rock"), obj_det=False),
    sentence(_n("teacher"), ("enjoys", "enjoy"), _n("folk"), obj_det=False),
    sentence(_n("jazz"), ("inspires", "inspire"), _n("composer")),
    sentence(_n("rock"), ("inspires", "inspire"), _n("band")),
    sentence(_n("blues"), ("inspires", "inspire"), _n("singer")),
    sentence(_n("folk"), ("inspires", "inspire"), _n("teacher")),
    sentence(_n("composer"), ("performs", "perform"), _n("jazz"),
             pp=("in", _n("club")), obj_det=False),
    sentence(_n("band"), ("performs", "perform"), _n("rock"),
             pp=("in", _n("hall")), obj_det=False),
    passive(_n("jazz"), ("recorded", "record"), _n("band")),
    passive(_n("folk"), ("performed", "perform"), _n("singer")),
    passive(_n("rock"), ("played", "play"), _n("guitarist")),
    sentence(_n("singer"), ("performs", "perform"), _n("folk"), obj_det=False),
    sentence(_n("composer"), ("studies", "study"), _n("jazz"), obj_det=False),
    sentence(_n("student"), ("studies", "study"), _n("blues"), obj_det=False),
    sentence([("music", "music", "NOUN", "compound"), ("school", "school", "NOUN", "")],
             ("teaches", "teach"), _n("folk"), obj_det=False),
    sentence([("concert", "concert", "NOUN", "compound"), ("hall", "hall", "NOUN", "")],
             ("hosts", "host"),
             [("jazz", "jazz", "NOUN", "compound"), ("band", "band", "NOUN", "")]),
]

DEMO = [
    # tool extracting data from a resource: subject, object and prep couples
    [
        ("OntoWrapper", "ontowrapper", "PROPN", 2, "nsubj"),
        ("extracts", "extract", "VERB", 0, "ROOT"),
        ("information", "information", "NOUN", 2, "dobj"),
        ("from", "from", "ADP", 2, "prep"),
        ("on-line", "on-line", "ADJ", 6, "amod"),
        ("resource", "resource", "NOUN", 4, "pobj"),
        (".", ".", "PUNCT", 2, "punct"),
    ],
    # bare prepositional couple, no direct object
    [
        ("Bart", "bart", "PROPN", 2, "nsubj"),
        ("travels", "travel", "VERB", 0, "ROOT"),
        ("by", "by", "ADP", 2, "prep"),
        ("boat", "boat", "NOUN", 3, "pobj"),
        (".", ".", "PUNCT", 2, "punct"),
    ],
]


def write_corpus(out_dir: Path) -> None:
    blocks = []
    for doc_id, sents in (("mini-a", DOC_A), ("mini-b", DOC_B)):
        blocks.append(f"# newdoc id = {doc_id}")
        for n, tokens in enumerate(sents, start=1):
            text = " ".join(form for form, *_ in tokens[:-1]) + "."
            blocks.append(f"# sent_id = {doc_id}.{n:02d}")
            blocks.append(f"# text = {text}")
            blocks.append(_rows(tokens))
            blocks.append("")
    (out_dir / "corpus.conllu").write_text("\n".join(blocks) + "\n", encoding="utf-8")
    (out_dir / "gold.tsv").write_text(
        "".join(f"{term}\t{label}\n" for term, label in GOLD), encoding="utf-8")


def write_demo(out_dir: Path) -> None:
    blocks = ["# newdoc id = demo"]
    for n, tokens in enumerate(DEMO, start=1):
        text = " ".join(form for form, *_ in tokens[:-1]) + "."
        blocks.append(f"# sent_id = demo.{n}")
        blocks.append(f"# text = {text}")
        blocks.append(_rows(tokens))
        blocks.append("")
    (out_dir / "extraction_demo.conllu").write_text("\n".join(blocks) + "\n",
                                                    encoding="utf-8")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default=Path(__file__).resolve().parent.parent / "data",
                        type=Path)
    args = parser.parse_args()
    mini = args.data_dir / "mini"
    demo = args.data_dir / "demo"
    mini.mkdir(parents=True, exist_ok=True)
    demo.mkdir(parents=True, exist_ok=True)
    write_corpus(mini)
    write_demo(demo)
    print(f"wrote {mini / 'corpus.conllu'}, {mini / 'gold.tsv'}, "
          f"{demo / 'extraction_demo.conllu'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
