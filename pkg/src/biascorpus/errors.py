"""Exception types shared across the toolkit.

Every operational failure raises a subclass of :class:`BiasCorpusError`; the
CLI maps these to exit code 1 and prints the class name so scripted callers
can branch on it.
"""


class BiasCorpusError(Exception):
    """Base class for all operational errors raised by this package."""


# lexicon
class MalformedLexicon(BiasCorpusError):
    pass


# corpus
class SourceUnreachable(BiasCorpusError):
    pass


class MalformedDocument(BiasCorpusError):
    pass


# dataset building
class PoolExhausted(BiasCorpusError):
    pass


class UnknownItem(BiasCorpusError):
    pass


class MalformedAnnotations(BiasCorpusError):
    pass


class UnresolvedExpertItem(BiasCorpusError):
    pass


# annotation service
class EmptyBatch(BiasCorpusError):
    pass


class UnknownAnnotator(BiasCorpusError):
    pass


class UnknownSession(BiasCorpusError):
    pass


class NotAssigned(BiasCorpusError):
    pass


class AlreadyLabeled(BiasCorpusError):
    pass


class InvalidLabel(BiasCorpusError):
    pass


# agreement
class RowSumMismatch(BiasCorpusError):
    pass


# splits
class TooSmall(BiasCorpusError):
    pass


class InfeasibleTarget(BiasCorpusError):
    pass


# classifiers
class MissingPlaceholder(BiasCorpusError):
    pass


class AdapterUnavailable(BiasCorpusError):
    pass


class InferenceError(BiasCorpusError):
    pass


# evaluation
class Misaligned(BiasCorpusError):
    pass


# manifests
class ManifestDrift(BiasCorpusError):
    pass
