"""Multi-annotator labeling sessions with durable storage.

A session assigns a batch of candidate items to annotators: a seeded random
fraction of items goes to every annotator (the overlap panel used for
agreement measurement), the rest are round-robin assigned to single
annotators. State persists as an append-only JSONL event log with periodic
snapshots; replaying the log reconstructs the exact session state, which
keeps the full annotation trail auditable.
"""

from __future__ import annotations

import json
import random
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from biascorpus.agreement import AgreementReport, fleiss_kappa
from biascorpus.dataset import AnnotationLabel, AnnotationRecord, CandidateItem
from biascorpus.errors import (
    AlreadyLabeled,
    EmptyBatch,
    InvalidLabel,
    NotAssigned,
    UnknownAnnotator,
    UnknownItem,
    UnknownSession,
)


def _utcnow() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


@dataclass
class Session:
    session_id: str
    items: list[CandidateItem]
    annotators: list[str]
    assignment: dict[str, tuple[str, ...]]  # item_id -> annotator ids
    overlap_item_ids: list[str]
    done: set[tuple[str, str]] = field(default_factory=set)  # (item_id, annotator)

    @property
    def item_order(self) -> list[str]:
        return [it.item_id for it in self.items]

    def item(self, item_id: str) -> CandidateItem:
        for it in self.items:
            if it.item_id == item_id:
                return it
        raise UnknownItem(item_id)

    def to_record(self) -> dict:
        return {
            "session_id": self.session_id,
            "items": [it.to_record() for it in self.items],
            "annotators": list(self.annotators),
            "assignment": {k: list(v) for k, v in self.assignment.items()},
            "overlap_item_ids": list(self.overlap_item_ids),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Session":
        return cls(
            session_id=rec["session_id"],
            items=[CandidateItem.from_record(r) for r in rec["items"]],
            annotators=list(rec["annotators"]),
            assignment={k: tuple(v) for k, v in rec["assignment"].items()},
            overlap_item_ids=list(rec["overlap_item_ids"]),
        )


def open_session(
    batch: Sequence[CandidateItem],
    annotators: Sequence[str],
    overlap_fraction: float,
    seed: int,
    session_id: str | None = None,
) -> Session:
    """Assign a batch: a seeded overlap panel to all annotators, the rest round-robin."""
    if not batch:
        raise EmptyBatch("cannot open a session over an empty batch")
    if not annotators:
        raise ValueError("need at least one annotator")
    if not 0.0 <= overlap_fraction <= 1.0:
        raise ValueError(f"overlap_fraction must be in [0, 1], got {overlap_fraction}")
    ids = [it.item_id for it in batch]
    if len(set(ids)) != len(ids):
        raise ValueError("batch contains duplicate item ids")

    rng = random.Random(seed)
    n_overlap = int(overlap_fraction * len(batch) + 0.5)
    overlap = sorted(rng.sample(ids, n_overlap)) if n_overlap else []
    overlap_set = set(overlap)

    assignment: dict[str, tuple[str, ...]] = {}
    single = [i for i in ids if i not in overlap_set]
    for pos, item_id in enumerate(single):
        assignment[item_id] = (annotators[pos % len(annotators)],)
    for item_id in overlap:
        assignment[item_id] = tuple(annotators)

    if session_id is None:
        session_id = f"session-{seed}-{len(batch)}"
    return Session(
        session_id=session_id,
        items=list(batch),
        annotators=list(annotators),
        assignment=assignment,
        overlap_item_ids=overlap,
    )


class AnnotationStore:
    """Event-sourced store for sessions and annotation records.

    All mutation goes through a single lock so concurrent submissions
    serialize onto the event log; the first write for an (item, annotator)
    pair wins and later ones get AlreadyLabeled.
    """

    SNAPSHOT_EVERY = 100

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.log_path = self.data_dir / "events.jsonl"
        self.snapshot_path = self.data_dir / "snapshot.json"
        self._lock = threading.Lock()
        self.sessions: dict[str, Session] = {}
        self.records: list[AnnotationRecord] = []
        self._events_since_snapshot = 0
        self._replay()

    # -- persistence ---------------------------------------------------

    def _replay(self) -> None:
        if self.snapshot_path.exists():
            snap = json.loads(self.snapshot_path.read_text(encoding="utf-8"))
            for rec in snap["sessions"]:
                self._apply_session(Session.from_record(rec))
            for rec in snap["records"]:
                self._apply_record(AnnotationRecord.from_record(rec))
            offset = snap["log_offset"]
        else:
            offset = 0
        if self.log_path.exists():
            with self.log_path.open("r", encoding="utf-8") as fh:
                for i, line in enumerate(fh):
                    if i < offset or not line.strip():
                        continue
                    event = json.loads(line)
                    if event["type"] == "session_opened":
                        self._apply_session(Session.from_record(event["session"]))
                    elif event["type"] == "label_submitted":
                        self._apply_record(AnnotationRecord.from_record(event["record"]))
                    self._events_since_snapshot += 1

    def _append_event(self, event: dict) -> None:
        with self.log_path.open("a", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n")
            fh.flush()
        self._events_since_snapshot += 1
        if self._events_since_snapshot >= self.SNAPSHOT_EVERY:
            self._write_snapshot()

    def _write_snapshot(self) -> None:
        log_lines = 0
        if self.log_path.exists():
            with self.log_path.open("r", encoding="utf-8") as fh:
                log_lines = sum(1 for _ in fh)
        snap = {
            "sessions": [s.to_record() for s in self.sessions.values()],
            "records": [r.to_record() for r in self.records],
            "log_offset": log_lines,
        }
        tmp = self.snapshot_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(snap, ensure_ascii=False, sort_keys=True), encoding="utf-8")
        tmp.replace(self.snapshot_path)
        self._events_since_snapshot = 0

    def _apply_session(self, session: Session) -> None:
        self.sessions[session.session_id] = session

    def _apply_record(self, record: AnnotationRecord) -> None:
        self.records.append(record)
        session = self.sessions.get(record.session_id)
        if session is not None:
            session.done.add((record.item_id, record.annotator_id))

    # -- operations ----------------------------------------------------

    def add_session(self, session: Session) -> Session:
        with self._lock:
            self._apply_session(session)
            self._append_event({"type": "session_opened", "session": session.to_record()})
        return session

    def open_session(
        self,
        batch: Sequence[CandidateItem],
        annotators: Sequence[str],
        overlap_fraction: float,
        seed: int,
        session_id: str | None = None,
    ) -> Session:
        return self.add_session(open_session(batch, annotators, overlap_fraction, seed, session_id))

    def session(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSession(session_id) from None

    def next_item(self, session_id: str, annotator: str) -> CandidateItem | None:
        """Lowest-index pending item for the annotator; None when done."""
        session = self.session(session_id)
        if annotator not in session.annotators:
            raise UnknownAnnotator(annotator)
        for item in session.items:
            assigned = session.assignment.get(item.item_id, ())
            if annotator in assigned and (item.item_id, annotator) not in session.done:
                return item
        return None

    def submit_label(
        self,
        session_id: str,
        annotator: str,
        item_id: str,
        label: int,
        guideline_ack: bool = False,
    ) -> AnnotationRecord:
        try:
            parsed = AnnotationLabel(int(label))
        except ValueError:
            raise InvalidLabel(f"label must be one of 0/1/2/3, got {label!r}") from None
        with self._lock:
            session = self.session(session_id)
            if annotator not in session.annotators:
                raise UnknownAnnotator(annotator)
            assigned = session.assignment.get(item_id)
            if assigned is None:
                raise UnknownItem(item_id)
            if annotator not in assigned:
                raise NotAssigned(f"{item_id} is not assigned to {annotator}")
            if (item_id, annotator) in session.done:
                raise AlreadyLabeled(f"{annotator} already labeled {item_id}")
            record = AnnotationRecord(
                item_id=item_id,
                annotator_id=annotator,
                session_id=session_id,
                label=parsed,
                timestamp=_utcnow(),
            )
            self._apply_record(record)
            self._append_event(
                {"type": "label_submitted", "record": record.to_record(), "guideline_ack": bool(guideline_ack)}
            )
        return record

    def records_for(
        self, session_id: str | None = None, annotator: str | None = None, item_id: str | None = None
    ) -> list[AnnotationRecord]:
        out = self.records
        if session_id is not None:
            out = [r for r in out if r.session_id == session_id]
        if annotator is not None:
            out = [r for r in out if r.annotator_id == annotator]
        if item_id is not None:
            out = [r for r in out if r.item_id == item_id]
        return list(out)

    def progress(self, session_id: str) -> dict:
        session = self.session(session_id)
        per_annotator = {}
        for a in session.annotators:
            assigned = sum(1 for ids in session.assignment.values() if a in ids)
            done = sum(1 for (i, ann) in session.done if ann == a)
            per_annotator[a] = {"assigned": assigned, "done": done}
        label_tallies = {str(l.value): 0 for l in AnnotationLabel}
        for r in self.records_for(session_id=session_id):
            label_tallies[str(int(r.label))] += 1
        total_assignments = sum(len(ids) for ids in session.assignment.values())
        overlap_done = all(
            (item_id, a) in session.done
            for item_id in session.overlap_item_ids
            for a in session.annotators
        )
        return {
            "session_id": session_id,
            "items": len(session.items),
            "annotators": per_annotator,
            "assignments": total_assignments,
            "completed": len(session.done),
            "label_tallies": label_tallies,
            "overlap_items": len(session.overlap_item_ids),
            "overlap_complete": overlap_done,
        }

    def iaa_matrix(self, session_id: str, label_space: str = "four_way") -> tuple[list[list[int]], int]:
        """Count matrix over completed overlap-panel items.

        four_way uses labels 0..3 as categories; binary keeps only items
        where every rater answered 0 or 1.
        """
        session = self.session(session_id)
        n_raters = len(session.annotators)
        by_item: dict[str, list[AnnotationRecord]] = {}
        for r in self.records_for(session_id=session_id):
            if r.item_id in session.overlap_item_ids:
                by_item.setdefault(r.item_id, []).append(r)

        rows: list[list[int]] = []
        if label_space == "binary":
            categories = [AnnotationLabel.NOT_BIASED, AnnotationLabel.BIASED]
        else:
            categories = list(AnnotationLabel)
        for item_id in session.overlap_item_ids:
            recs = by_item.get(item_id, [])
            if len(recs) != n_raters:
                continue
            if label_space == "binary" and any(r.label not in categories for r in recs):
                continue
            row = [sum(1 for r in recs if r.label is c) for c in categories]
            rows.append(row)
        return rows, n_raters

    def iaa_report(self, session_id: str, label_space: str = "four_way") -> AgreementReport:
        rows, n_raters = self.iaa_matrix(session_id, label_space)
        session = self.session(session_id)
        interpretation = (
            f"{len(rows)} overlap items x {n_raters} raters "
            f"({len(rows) * n_raters} annotation records), label space {label_space}"
        )
        report = fleiss_kappa(rows, n_raters, label_space=label_space, interpretation=interpretation)
        return report
