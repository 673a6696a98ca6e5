#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture corpus.

Deterministic: same seed, same output file. The corpus mixes in-window
documents carrying lexicon terms, a few documents published before the
default window, and a few without any lexicon term, so ingestion filters
are exercised end to end. Run from the repo root:

    python3 scripts/make_fixture_corpus.py
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from biascorpus.lexicon import load_default_lexicon

OUT = Path(__file__).resolve().parent.parent / "src" / "biascorpus" / "data" / "fixture_corpus.jsonl"

FILLERS = (
    "beleid overheid aanpak gemeente kamer wet regeling voorstel kosten budget "
    "zorg onderzoek rapport cijfers stijging daling periode regio aanvraag "
    "procedure termijn advies besluit toelichting wijziging programma doelgroep "
    "samenwerking uitvoering evaluatie resultaat ontwikkeling verbetering vraag "
    "antwoord debat motie stemming fractie minister staatssecretaris ambtenaar "
    "dienst loket formulier subsidie toeslag huur woning energie vervoer"
).split()

DOC_TYPES = ("Nota", "Rapport", "Memorie van Toelichting", "Bijlage", "Brief")

DUP_SENTENCES = (
    "De Kamer wordt hierover nader geinformeerd.",
    "Zie o.a. de bijlage bij deze nota.",
    "De kosten worden gedekt uit de begroting.",
)


def make_sentence(rng: random.Random, term_form: str | None) -> str:
    n = rng.randint(5, 11)
    words = [rng.choice(FILLERS) for _ in range(n)]
    if rng.random() < 0.15:
        words[rng.randrange(1, len(words))] = rng.choice(FILLERS).upper()
    if term_form is not None:
        words.insert(rng.randrange(1, n), term_form)
    words[0] = words[0].capitalize()
    terminator = rng.choice(".........!?")
    return " ".join(words) + terminator


def make_body(rng: random.Random, term_forms: list[str]) -> str:
    n_sentences = rng.randint(4, 9)
    slots = list(range(n_sentences))
    rng.shuffle(slots)
    planted = {slot: form for slot, form in zip(slots, term_forms)}
    sentences = [make_sentence(rng, planted.get(i)) for i in range(n_sentences)]
    if rng.random() < 0.4:
        sentences.insert(rng.randrange(len(sentences)), rng.choice(DUP_SENTENCES))
    # untidy whitespace so normalization has work to do
    sep = lambda: rng.choice(["  ", " \t ", "\n", " "])
    return sep().join(sentences)


def main() -> None:
    lexicon = load_default_lexicon()
    rng = random.Random(20240131)
    forms = []
    for term in lexicon.terms:
        forms.append(term.surface)
        forms.extend(term.variants)
    rng.shuffle(forms)

    docs = []
    serial = 0

    def add_doc(year_range: tuple[int, int], term_forms: list[str]) -> None:
        nonlocal serial
        serial += 1
        year = rng.randint(*year_range)
        month = rng.randint(1, 12)
        day = rng.randint(1, 28)
        doc_id = f"tk-{serial:04d}"
        docs.append(
            {
                "doc_id": doc_id,
                "title": f"{rng.choice(DOC_TYPES)} over {rng.choice(FILLERS)} {serial}",
                "doc_type": rng.choice(DOC_TYPES),
                "published": f"{year:04d}-{month:02d}-{day:02d}",
                "body": make_body(rng, term_forms),
                "source_uri": f"https://docs.example.org/{doc_id}",
            }
        )

    for i in range(44):  # in window, term-bearing
        k = rng.randint(1, 3)
        picked = [forms[(i * 3 + j) % len(forms)] for j in range(k)]
        add_doc((2010, 2023), picked)
    for _ in range(4):  # before the window
        add_doc((2005, 2009), [rng.choice(forms)])
    for _ in range(4):  # no lexicon term
        add_doc((2010, 2023), [])

    rng.shuffle(docs)
    with OUT.open("w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"wrote {len(docs)} documents to {OUT}")


if __name__ == "__main__":
    main()
