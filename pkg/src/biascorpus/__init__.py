"""Toolkit for mining, annotating, and evaluating bias-term corpora.

Pipeline in one line: fetch documents, normalize and segment them into
context-bearing sentences, flag candidates with a categorized bias-term
lexicon, run multi-annotator labeling sessions with agreement measurement,
resolve labels into a binary dataset, split/resample it, score classifiers
through a model-agnostic adapter protocol, and explain single predictions.
"""

__version__ = "0.1.0"

from biascorpus.lexicon import Lexicon, LexiconTerm, TermMatch, load_default_lexicon, load_lexicon, match_terms

__all__ = [
    "Lexicon",
    "LexiconTerm",
    "TermMatch",
    "load_default_lexicon",
    "load_lexicon",
    "match_terms",
    "__version__",
]
