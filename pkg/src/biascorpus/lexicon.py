"""Categorized bias-term lexicon: loading, validation, and matching.

The lexicon is a flat list of keywords, each assigned to one of nine bias
categories and one of three term classes (prohibited / conditionally biased /
context sensitive). Matching is whole-token and case-insensitive over
normalized (lowercase) sentences; multi-word terms match as contiguous token
sequences, and overlaps resolve longest-match-first, then leftmost.

A lexicon file is UTF-8, line oriented::

    surface<TAB>category<TAB>class<TAB>variant1,variant2,...

Lines starting with ``#`` are ignored. The bundled default lives in
``data/default_lexicon.tsv``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from biascorpus.errors import MalformedLexicon


class Category(str, Enum):
    ALGEMEEN = "algemeen"
    BEPERKINGEN = "beperkingen"
    CULTUUR = "cultuur"
    GELOOF = "geloof"
    GENDER = "gender"
    KOLONIALISME = "kolonialisme"
    MIGRATIE = "migratie"
    ONDERWIJS = "onderwijs"
    SEKSUALITEIT = "seksualiteit"


# English spellings accepted on input; canonical values stay Dutch to match
# the bundled data file.
_CATEGORY_ALIASES = {
    "general": Category.ALGEMEEN,
    "disabilities": Category.BEPERKINGEN,
    "culture": Category.CULTUUR,
    "religion": Category.GELOOF,
    "gender": Category.GENDER,
    "colonialism": Category.KOLONIALISME,
    "migration": Category.MIGRATIE,
    "education": Category.ONDERWIJS,
    "sexuality": Category.SEKSUALITEIT,
}


class TermClass(str, Enum):
    PROHIBITED = "prohibited"
    CONDITIONALLY_BIASED = "conditionally_biased"
    CONTEXT_SENSITIVE = "context_sensitive"


_CLASS_ALIASES = {
    "prohibited": TermClass.PROHIBITED,
    "conditionally_biased": TermClass.CONDITIONALLY_BIASED,
    "conditionally biased": TermClass.CONDITIONALLY_BIASED,
    "conditional": TermClass.CONDITIONALLY_BIASED,
    "context_sensitive": TermClass.CONTEXT_SENSITIVE,
    "context sensitive": TermClass.CONTEXT_SENSITIVE,
    "context": TermClass.CONTEXT_SENSITIVE,
}

# Unicode letter/digit runs; hyphens, slashes, and apostrophes split tokens,
# so hyphenated compounds are matched as multi-token sequences.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Optional inflection suffixes appended to single-token surfaces when
# suffix expansion is enabled at load time.
EXPANSION_SUFFIXES = ("e", "en", "s", "'s")


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Split text into (token, start, end) triples on letter/digit runs."""
    return [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def token_texts(text: str) -> tuple[str, ...]:
    return tuple(m.group() for m in _TOKEN_RE.finditer(text))


@dataclass(frozen=True)
class LexiconTerm:
    """One bias keyword with its category, class, and inflected variants."""

    surface: str
    category: Category
    term_class: TermClass
    variants: tuple[str, ...] = ()


@dataclass(frozen=True)
class TermMatch:
    """A whole-token hit of a lexicon term inside a normalized sentence."""

    term: LexiconTerm
    span: tuple[int, int]
    matched_form: str

    def to_record(self) -> dict:
        return {
            "surface": self.term.surface,
            "category": self.term.category.value,
            "term_class": self.term.term_class.value,
            "variants": list(self.term.variants),
            "span": list(self.span),
            "matched_form": self.matched_form,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "TermMatch":
        term = LexiconTerm(
            surface=rec["surface"],
            category=Category(rec["category"]),
            term_class=TermClass(rec["term_class"]),
            variants=tuple(rec.get("variants", ())),
        )
        return cls(term=term, span=tuple(rec["span"]), matched_form=rec["matched_form"])


@dataclass
class Lexicon:
    """Immutable term collection plus the token-sequence index used to match."""

    terms: list[LexiconTerm]
    source_id: str = "unnamed"
    # first token -> [(token sequence, term, written form)], longest first
    _index: dict[str, list[tuple[tuple[str, ...], LexiconTerm, str]]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        index: dict[str, list[tuple[tuple[str, ...], LexiconTerm, str]]] = {}
        for term in self.terms:
            for form in (term.surface, *term.variants):
                seq = token_texts(form)
                if not seq:
                    raise MalformedLexicon(f"form {form!r} of {term.surface!r} has no tokens")
                index.setdefault(seq[0], []).append((seq, term, form))
        for entries in index.values():
            # longest sequence wins; ties break on surface then form for determinism
            entries.sort(key=lambda e: (-len(e[0]), e[1].surface, e[2]))
        self._index = index

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[LexiconTerm]:
        return iter(self.terms)

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.terms]

    def all_forms(self) -> list[str]:
        """Every matchable written form: surfaces plus variants."""
        forms: list[str] = []
        for t in self.terms:
            forms.append(t.surface)
            forms.extend(t.variants)
        return forms

    def by_surface(self, surface: str) -> LexiconTerm:
        for t in self.terms:
            if t.surface == surface:
                return t
        raise KeyError(surface)

    def category_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {c.value: 0 for c in Category}
        for t in self.terms:
            counts[t.category.value] += 1
        return counts


def _parse_category(raw: str, lineno: int) -> Category:
    key = raw.strip().lower()
    if key in Category._value2member_map_:
        return Category(key)
    if key in _CATEGORY_ALIASES:
        return _CATEGORY_ALIASES[key]
    raise MalformedLexicon(f"line {lineno}: unknown category {raw!r}")


def _parse_class(raw: str, lineno: int) -> TermClass:
    key = raw.strip().lower()
    if key in _CLASS_ALIASES:
        return _CLASS_ALIASES[key]
    raise MalformedLexicon(f"line {lineno}: unknown term class {raw!r}")


def _expand_suffixes(surface: str) -> list[str]:
    if " " in surface:
        return []
    return [surface + suffix for suffix in EXPANSION_SUFFIXES]


def parse_lexicon(
    lines: Iterable[str], source_id: str, expand_suffixes: bool = False
) -> Lexicon:
    """Parse lexicon records; raises MalformedLexicon on any invalid line."""
    terms: list[LexiconTerm] = []
    seen_surfaces: set[str] = set()
    seen_forms: set[tuple[str, ...]] = set()
    n_records = 0
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        n_records += 1
        parts = line.split("\t")
        if len(parts) < 3:
            raise MalformedLexicon(f"line {lineno}: expected at least 3 tab-separated fields")
        surface = parts[0].strip().lower()
        if not surface:
            raise MalformedLexicon(f"line {lineno}: empty surface")
        if surface in seen_surfaces:
            raise MalformedLexicon(f"line {lineno}: duplicate surface {surface!r}")
        category = _parse_category(parts[1], lineno)
        term_class = _parse_class(parts[2], lineno)

        variants: list[str] = []
        raw_variants = parts[3].strip() if len(parts) > 3 else ""
        candidates = [v.strip().lower() for v in raw_variants.split(",") if v.strip()]
        if expand_suffixes:
            candidates.extend(_expand_suffixes(surface))
        for v in candidates:
            if v == surface or v in variants:
                continue
            variants.append(v)

        # A variant that collides with another term's surface or variant would
        # make term attribution ambiguous; refuse the file outright.
        for form in (surface, *variants):
            seq = token_texts(form)
            if not seq:
                raise MalformedLexicon(f"line {lineno}: form {form!r} has no tokens")
            if seq in seen_forms:
                raise MalformedLexicon(f"line {lineno}: form {form!r} already mapped to another term")
            seen_forms.add(seq)

        seen_surfaces.add(surface)
        terms.append(
            LexiconTerm(
                surface=surface,
                category=category,
                term_class=term_class,
                variants=tuple(variants),
            )
        )
    if n_records == 0:
        raise MalformedLexicon(f"{source_id}: no term records found")
    return Lexicon(terms=terms, source_id=source_id)


def load_lexicon(source: str | Path, expand_suffixes: bool = False) -> Lexicon:
    """Load and validate a lexicon file."""
    path = Path(source)
    text = path.read_text(encoding="utf-8")
    return parse_lexicon(text.splitlines(), source_id=str(path), expand_suffixes=expand_suffixes)


def load_default_lexicon(expand_suffixes: bool = False) -> Lexicon:
    """Load the bundled default term list."""
    ref = resources.files("biascorpus").joinpath("data/default_lexicon.tsv")
    text = ref.read_text(encoding="utf-8")
    return parse_lexicon(text.splitlines(), source_id="default", expand_suffixes=expand_suffixes)


def match_terms(sentence: str, lexicon: Lexicon) -> list[TermMatch]:
    """All non-overlapping whole-token lexicon matches, ordered by span start.

    The sentence is expected to be normalized (lowercase); matching lowercases
    tokens defensively, so mixed-case input still matches but the recorded
    ``matched_form`` is the literal sentence substring.
    """
    tokens = tokenize(sentence)
    lowered = [t[0].lower() for t in tokens]
    matches: list[TermMatch] = []
    i = 0
    n = len(tokens)
    while i < n:
        hit = None
        for seq, term, _form in lexicon._index.get(lowered[i], ()):
            if len(seq) <= n - i and tuple(lowered[i : i + len(seq)]) == seq:
                hit = (seq, term)
                break
        if hit is None:
            i += 1
            continue
        seq, term = hit
        start = tokens[i][1]
        end = tokens[i + len(seq) - 1][2]
        matches.append(TermMatch(term=term, span=(start, end), matched_form=sentence[start:end]))
        i += len(seq)
    return matches


def scan_term_hits(sentence: str, lexicon: Lexicon) -> dict[str, int]:
    """Per-term whole-token hit counts, independent of overlap resolution.

    Unlike :func:`match_terms`, every term is scanned on its own, so hits
    shadowed by a longer overlapping term still count. Used where the question
    is "does this surface or any variant occur at all" (rare-term holdout and
    leakage checks), where longest-match shadowing must not hide occurrences.
    """
    lowered = [t.lower() for t in token_texts(sentence)]
    counts: dict[str, int] = {}
    n = len(lowered)
    for term in lexicon.terms:
        total = 0
        for form in (term.surface, *term.variants):
            seq = token_texts(form)
            k = len(seq)
            if k == 0 or k > n:
                continue
            for i in range(n - k + 1):
                if tuple(lowered[i : i + k]) == seq:
                    total += 1
        if total:
            counts[term.surface] = total
    return counts


def contains_any_term(text: str, lexicon: Lexicon) -> bool:
    """Whether any lexicon surface or variant occurs as a whole-token hit."""
    tokens = [t.lower() for t in token_texts(text)]
    n = len(tokens)
    for i, tok in enumerate(tokens):
        for seq, _term, _form in lexicon._index.get(tok, ()):
            if len(seq) <= n - i and tuple(tokens[i : i + len(seq)]) == seq:
                return True
    return False


def make_lexicon(entries: Sequence[tuple[str, str, str]] | Sequence[tuple[str, str, str, Sequence[str]]],
                 source_id: str = "inline") -> Lexicon:
    """Build a small lexicon from (surface, category, class[, variants]) tuples.

    Convenience for tests and synthetic fixtures.
    """
    lines = []
    for entry in entries:
        surface, category, term_class = entry[0], entry[1], entry[2]
        variants = ",".join(entry[3]) if len(entry) > 3 else ""
        lines.append(f"{surface}\t{category}\t{term_class}\t{variants}")
    return parse_lexicon(lines, source_id=source_id)
