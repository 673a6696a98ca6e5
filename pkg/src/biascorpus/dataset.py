"""From matched sentences to a labeled dataset.

Candidates are sentences with at least one lexicon match. They are sampled
into annotation batches, labeled 0/1/2/3 by annotators, and resolved into
binary :class:`LabeledInstance` records: excluded items (3) are dropped,
unsure items (2) requeue for re-annotation, and 0/1 disagreements route to an
expert queue or a majority vote depending on policy.
"""

from __future__ import annotations

import csv
import logging
import random
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from biascorpus.corpus import ContextSentence
from biascorpus.errors import (
    MalformedAnnotations,
    PoolExhausted,
    UnknownItem,
    UnresolvedExpertItem,
)
from biascorpus.io import read_jsonl, write_jsonl
from biascorpus.lexicon import Lexicon, TermClass, TermMatch, match_terms

logger = logging.getLogger(__name__)


class AnnotationLabel(IntEnum):
    NOT_BIASED = 0
    BIASED = 1
    UNSURE = 2
    EXCLUDED = 3


class BinaryLabel(IntEnum):
    NOT_BIASED = 0
    BIASED = 1


@dataclass(frozen=True)
class CandidateItem:
    item_id: str
    sentence: ContextSentence
    matches: tuple[TermMatch, ...]

    def to_record(self) -> dict:
        return {
            "item_id": self.item_id,
            "sentence": self.sentence.to_record(),
            "matches": [m.to_record() for m in self.matches],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "CandidateItem":
        return cls(
            item_id=rec["item_id"],
            sentence=ContextSentence.from_record(rec["sentence"]),
            matches=tuple(TermMatch.from_record(m) for m in rec["matches"]),
        )


@dataclass(frozen=True)
class AnnotationRecord:
    item_id: str
    annotator_id: str
    session_id: str
    label: AnnotationLabel
    timestamp: str = ""

    def to_record(self) -> dict:
        return {
            "item_id": self.item_id,
            "annotator_id": self.annotator_id,
            "session_id": self.session_id,
            "label": int(self.label),
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "AnnotationRecord":
        return cls(
            item_id=rec["item_id"],
            annotator_id=rec["annotator_id"],
            session_id=rec["session_id"],
            label=AnnotationLabel(int(rec["label"])),
            timestamp=rec.get("timestamp", ""),
        )


@dataclass(frozen=True)
class LabeledInstance:
    item_id: str
    text: str
    context_before: str
    context_after: str
    matches: tuple[TermMatch, ...]
    label: BinaryLabel
    resolution: str = "direct"  # direct | reannotated | expert

    def to_record(self) -> dict:
        return {
            "item_id": self.item_id,
            "text": self.text,
            "context_before": self.context_before,
            "context_after": self.context_after,
            "matches": [m.to_record() for m in self.matches],
            "label": int(self.label),
            "resolution": self.resolution,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "LabeledInstance":
        return cls(
            item_id=rec["item_id"],
            text=rec["text"],
            context_before=rec.get("context_before", ""),
            context_after=rec.get("context_after", ""),
            matches=tuple(TermMatch.from_record(m) for m in rec.get("matches", [])),
            label=BinaryLabel(int(rec["label"])),
            resolution=rec.get("resolution", "direct"),
        )


def extract_candidates(sentences: Iterable[ContextSentence], lexicon: Lexicon) -> list[CandidateItem]:
    """Sentences with at least one lexicon match become candidate items."""
    out: list[CandidateItem] = []
    for s in sentences:
        matches = match_terms(s.text, lexicon)
        if matches:
            out.append(CandidateItem(item_id=s.sentence_id, sentence=s, matches=tuple(matches)))
    return out


def sample_batch(
    candidates: Sequence[CandidateItem],
    strategy: str,
    n: int,
    seed: int,
    already_labeled: set[str] | None = None,
    seen_terms: set[str] | None = None,
) -> list[CandidateItem]:
    """Draw an annotation batch without replacement.

    ``random`` samples uniformly from all unlabeled candidates;
    ``term_diversity`` first restricts the pool to candidates carrying at
    least one term not yet in ``seen_terms``.
    """
    if strategy not in ("random", "term_diversity"):
        raise ValueError(f"unknown sampling strategy {strategy!r}")
    already = already_labeled or set()
    pool = [c for c in candidates if c.item_id not in already]
    if strategy == "term_diversity":
        seen = seen_terms or set()
        pool = [c for c in pool if any(m.term.surface not in seen for m in c.matches)]
    if n > len(pool):
        raise PoolExhausted(f"requested {n} items but only {len(pool)} eligible")
    rng = random.Random(seed)
    return rng.sample(pool, n)


def prohibited_rule_suggest(item: CandidateItem) -> BinaryLabel | None:
    """Advisory label: Biased when any match is a prohibited-class term."""
    if any(m.term.term_class is TermClass.PROHIBITED for m in item.matches):
        return BinaryLabel.BIASED
    return None


@dataclass
class ResolutionPolicy:
    """How conflicting and unsure annotations resolve.

    disagreement: "expert" queues 0/1 conflicts for an expert;
    "majority" takes a strict majority and queues only ties.
    """

    disagreement: str = "expert"
    expert_annotator_id: str | None = None
    max_reannotation_rounds: int = 2


@dataclass
class ResolutionResult:
    instances: list[LabeledInstance]
    requeue: list[str]
    expert_queue: list[str]
    dropped: list[tuple[str, str]]  # (item_id, reason)


def _round_order_key(records: list[AnnotationRecord]) -> tuple:
    return (min(r.timestamp for r in records), records[0].session_id)


def resolve_labels(
    annotations: Sequence[AnnotationRecord],
    items: Mapping[str, CandidateItem],
    policy: ResolutionPolicy | None = None,
) -> ResolutionResult:
    """Resolve per-item annotation records into binary labeled instances.

    Deterministic and insensitive to input order: records are canonically
    sorted before resolution. Rounds are annotation sessions ordered by their
    earliest timestamp (session id as tie-break); only the latest round of an
    item is current, earlier rounds having been superseded by re-annotation.
    """
    policy = policy or ResolutionPolicy()
    records = sorted(annotations, key=lambda r: (r.item_id, r.session_id, r.annotator_id))
    seen_keys: set[tuple[str, str, str]] = set()
    by_item: dict[str, dict[str, list[AnnotationRecord]]] = {}
    for rec in records:
        if rec.item_id not in items:
            raise UnknownItem(rec.item_id)
        key = (rec.item_id, rec.annotator_id, rec.session_id)
        if key in seen_keys:
            raise MalformedAnnotations(f"duplicate annotation {key}")
        seen_keys.add(key)
        by_item.setdefault(rec.item_id, {}).setdefault(rec.session_id, []).append(rec)

    result = ResolutionResult(instances=[], requeue=[], expert_queue=[], dropped=[])

    def emit(item_id: str, label: AnnotationLabel, resolution: str) -> None:
        item = items[item_id]
        result.instances.append(
            LabeledInstance(
                item_id=item_id,
                text=item.sentence.text,
                context_before=item.sentence.context_before,
                context_after=item.sentence.context_after,
                matches=item.matches,
                label=BinaryLabel(int(label)),
                resolution=resolution,
            )
        )

    for item_id in sorted(by_item):
        sessions = by_item[item_id]
        rounds = sorted(sessions.values(), key=_round_order_key)
        all_records = [r for rnd in rounds for r in rnd]

        if any(r.label is AnnotationLabel.EXCLUDED for r in all_records):
            result.dropped.append((item_id, "excluded"))
            continue

        n_rounds = len(rounds)
        current = rounds[-1]
        base_resolution = "reannotated" if n_rounds > 1 else "direct"

        if policy.expert_annotator_id is not None:
            expert_records = [r for r in all_records if r.annotator_id == policy.expert_annotator_id]
            if expert_records:
                verdict = expert_records[-1].label
                if verdict is AnnotationLabel.UNSURE:
                    result.requeue.append(item_id)
                else:
                    emit(item_id, verdict, "expert")
                continue

        labels = [r.label for r in current]
        if AnnotationLabel.UNSURE in labels:
            if n_rounds > policy.max_reannotation_rounds:
                logger.info("dropping %s: still unsure after %d rounds", item_id, n_rounds)
                result.dropped.append((item_id, "unsure_exhausted"))
            else:
                result.requeue.append(item_id)
            continue

        zeros = sum(1 for l in labels if l is AnnotationLabel.NOT_BIASED)
        ones = sum(1 for l in labels if l is AnnotationLabel.BIASED)
        if zeros == 0 or ones == 0:
            emit(item_id, AnnotationLabel.BIASED if ones else AnnotationLabel.NOT_BIASED, base_resolution)
        elif policy.disagreement == "majority" and zeros != ones:
            emit(item_id, AnnotationLabel.BIASED if ones > zeros else AnnotationLabel.NOT_BIASED, base_resolution)
        else:
            result.expert_queue.append(item_id)

    return result


@dataclass
class StatsReport:
    total: int
    biased: int
    biased_fraction: float
    distinct_terms: int
    per_term: dict[str, int]
    per_category: dict[str, int]

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "biased": self.biased,
            "biased_fraction": self.biased_fraction,
            "distinct_terms": self.distinct_terms,
            "per_term": dict(sorted(self.per_term.items())),
            "per_category": dict(sorted(self.per_category.items())),
        }

    def to_table(self) -> str:
        lines = [
            f"instances        {self.total}",
            f"biased           {self.biased} ({self.biased_fraction:.1%})",
            f"distinct terms   {self.distinct_terms}",
            "",
            "term occurrences by category",
        ]
        for cat, n in sorted(self.per_category.items(), key=lambda kv: (-kv[1], kv[0])):
            lines.append(f"  {cat:<16} {n}")
        lines.append("")
        lines.append("top terms")
        top = sorted(self.per_term.items(), key=lambda kv: (-kv[1], kv[0]))[:15]
        for term, n in top:
            lines.append(f"  {term:<24} {n}")
        return "\n".join(lines)


def dataset_stats(instances: Sequence[LabeledInstance], lexicon: Lexicon | None = None) -> StatsReport:
    """Count labels, per-term and per-category match occurrences.

    Every match contributes to its term and category counter, so a sentence
    with k matches adds k counts; category totals therefore always equal the
    sum of term totals.
    """
    per_term: dict[str, int] = {}
    per_category: dict[str, int] = {}
    biased = 0
    for inst in instances:
        if inst.label is BinaryLabel.BIASED:
            biased += 1
        for m in inst.matches:
            per_term[m.term.surface] = per_term.get(m.term.surface, 0) + 1
            cat = m.term.category.value
            per_category[cat] = per_category.get(cat, 0) + 1
    total = len(instances)
    return StatsReport(
        total=total,
        biased=biased,
        biased_fraction=(biased / total) if total else 0.0,
        distinct_terms=len(per_term),
        per_term=per_term,
        per_category=per_category,
    )


def write_dataset_jsonl(path: str | Path, instances: Iterable[LabeledInstance]) -> int:
    return write_jsonl(path, (i.to_record() for i in instances))


def read_dataset_jsonl(path: str | Path) -> list[LabeledInstance]:
    return [LabeledInstance.from_record(rec) for rec in read_jsonl(path)]


def write_dataset_csv(path: str | Path, instances: Iterable[LabeledInstance]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["item_id", "text", "label"])
        for inst in instances:
            writer.writerow([inst.item_id, inst.text, int(inst.label)])
            n += 1
    return n


def export_dataset(
    result: ResolutionResult, jsonl_path: str | Path, csv_path: str | Path | None = None
) -> int:
    """Write resolved instances; refuses while expert decisions are pending."""
    if result.expert_queue:
        raise UnresolvedExpertItem(
            f"{len(result.expert_queue)} items await expert resolution: "
            + ", ".join(result.expert_queue[:5])
        )
    n = write_dataset_jsonl(jsonl_path, result.instances)
    if csv_path is not None:
        write_dataset_csv(csv_path, result.instances)
    return n


def write_candidates_jsonl(path: str | Path, candidates: Iterable[CandidateItem]) -> int:
    return write_jsonl(path, (c.to_record() for c in candidates))


def read_candidates_jsonl(path: str | Path) -> list[CandidateItem]:
    return [CandidateItem.from_record(rec) for rec in read_jsonl(path)]
