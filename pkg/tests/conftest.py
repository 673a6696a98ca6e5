from __future__ import annotations

import random

import pytest

from biascorpus.corpus import ContextSentence
from biascorpus.dataset import BinaryLabel, CandidateItem, LabeledInstance, extract_candidates
from biascorpus.lexicon import Lexicon, TermClass, load_default_lexicon, make_lexicon


@pytest.fixture(scope="session")
def default_lexicon() -> Lexicon:
    return load_default_lexicon()


@pytest.fixture()
def tiny_lexicon() -> Lexicon:
    return make_lexicon(
        [
            ("gehandicapt", "beperkingen", "prohibited", ["gehandicapte", "gehandicapten"]),
            ("stroom", "migratie", "context_sensitive"),
            ("migranten", "migratie", "conditionally_biased", ["migrant"]),
            ("zwarte school", "onderwijs", "conditionally_biased", ["zwarte scholen"]),
            ("islam", "geloof", "conditionally_biased"),
        ]
    )


def sentence(text: str, doc_id: str = "doc-1", index: int = 0, before: str = "", after: str = "") -> ContextSentence:
    return ContextSentence(
        sentence_id=f"{doc_id}:{index}:{hash(text) & 0xFFFFFFFF:08x}",
        text=text,
        context_before=before,
        context_after=after,
        doc_id=doc_id,
        index=index,
    )


def make_instances(
    lexicon: Lexicon,
    texts_and_labels: list[tuple[str, int]],
) -> list[LabeledInstance]:
    """Labeled instances from (text, label) pairs; matches recomputed."""
    sentences = [sentence(t, index=i) for i, (t, _l) in enumerate(texts_and_labels)]
    candidates = {c.sentence.index: c for c in extract_candidates(sentences, lexicon)}
    out = []
    for i, (text, label) in enumerate(texts_and_labels):
        cand = candidates.get(i)
        out.append(
            LabeledInstance(
                item_id=f"item-{i:04d}",
                text=text,
                context_before="",
                context_after="",
                matches=cand.matches if cand else (),
                label=BinaryLabel(label),
            )
        )
    return out


FILLER_TOKENS = (
    "beleid overheid aanpak gemeente kamer wet regeling voorstel kosten budget "
    "zorg onderzoek rapport cijfers periode regio aanvraag procedure termijn "
    "advies besluit wijziging programma samenwerking uitvoering resultaat vraag"
).split()


def random_filler_sentence(rng: random.Random, n_tokens: int) -> str:
    return " ".join(rng.choice(FILLER_TOKENS) for _ in range(n_tokens))
