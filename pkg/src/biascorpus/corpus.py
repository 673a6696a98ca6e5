"""Document ingestion: fetch, normalize, sentence-segment, deduplicate.

Documents come from either a local directory of pre-extracted text or a
generic paginated query endpoint. Bodies are normalized (NFC, lowercase,
collapsed whitespace), split into sentences with a rule-based splitter, and
emitted as :class:`ContextSentence` records that keep the neighboring
sentences and source provenance.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from biascorpus.errors import MalformedDocument, SourceUnreachable
from biascorpus.lexicon import Lexicon, contains_any_term

logger = logging.getLogger(__name__)

# Dutch abbreviations that end with a period but do not end a sentence.
ABBREVIATIONS = frozenset({"o.a.", "bijv.", "art.", "nr.", "dhr.", "mevr.", "e.d."})

_TERMINATORS = ".!?"

# Whitespace-class control characters survive until the collapse step; all
# other C0/C1 controls are dropped outright.
_WS_CONTROLS = "\t\n\r\x0b\x0c"


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    doc_type: str
    published: date
    body: str
    source_uri: str = ""

    def to_record(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "title": self.title,
            "doc_type": self.doc_type,
            "published": self.published.isoformat(),
            "body": self.body,
            "source_uri": self.source_uri,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Document":
        try:
            published = date.fromisoformat(str(rec["published"]))
            return cls(
                doc_id=str(rec["doc_id"]),
                title=str(rec.get("title", "")),
                doc_type=str(rec.get("doc_type", "")),
                published=published,
                body=str(rec["body"]),
                source_uri=str(rec.get("source_uri", "")),
            )
        except (KeyError, ValueError) as exc:
            raise MalformedDocument(f"bad document record: {exc}") from exc


@dataclass(frozen=True)
class ContextSentence:
    """A normalized sentence plus its immediate neighbors and provenance."""

    sentence_id: str
    text: str
    context_before: str
    context_after: str
    doc_id: str
    index: int

    def to_record(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "text": self.text,
            "context_before": self.context_before,
            "context_after": self.context_after,
            "doc_id": self.doc_id,
            "index": self.index,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "ContextSentence":
        return cls(
            sentence_id=rec["sentence_id"],
            text=rec["text"],
            context_before=rec.get("context_before", ""),
            context_after=rec.get("context_after", ""),
            doc_id=rec["doc_id"],
            index=int(rec["index"]),
        )


@dataclass(frozen=True)
class DateWindow:
    """Half-open publication window [start, end); end=None means open-ended."""

    start: date = date(2010, 1, 1)
    end: date | None = None

    def contains(self, d: date) -> bool:
        if d < self.start:
            return False
        return self.end is None or d < self.end

    @classmethod
    def parse(cls, start: str | None, end: str | None) -> "DateWindow":
        return cls(
            start=date.fromisoformat(start) if start else date(2010, 1, 1),
            end=date.fromisoformat(end) if end else None,
        )


@dataclass
class SourceConfig:
    """Where and how to fetch documents.

    Exactly one of local_dir / base_url should be set. The remote side is a
    generic paginated query endpoint: parameter names are configurable, the
    response is JSON ``{"documents": [...], "next_page": <int or null>}``.
    """

    local_dir: str | None = None
    base_url: str | None = None
    query_param: str = "q"
    date_from_param: str = "from"
    date_to_param: str = "to"
    page_param: str = "page"
    page_size_param: str = "page_size"
    page_size: int = 100
    timeout: float = 10.0
    max_retries: int = 3
    concurrency: int = 4

    @classmethod
    def from_mapping(cls, cfg: dict) -> "SourceConfig":
        kwargs = {}
        for f in ("local_dir", "base_url", "query_param", "date_from_param",
                  "date_to_param", "page_param", "page_size_param"):
            if f in cfg:
                kwargs[f] = cfg[f]
        for f in ("page_size", "max_retries", "concurrency"):
            if f in cfg:
                kwargs[f] = int(cfg[f])
        if "timeout" in cfg:
            kwargs["timeout"] = float(cfg["timeout"])
        return cls(**kwargs)


@dataclass
class FetchStats:
    fetched: int = 0
    skipped_malformed: int = 0
    excluded_date: int = 0
    excluded_no_match: int = 0


def normalize_text(text: str) -> str:
    """NFC, lowercase, control characters stripped, whitespace collapsed."""
    text = unicodedata.normalize("NFC", text)
    text = text.lower()
    text = "".join(ch for ch in text if unicodedata.category(ch) != "Cc" or ch in _WS_CONTROLS)
    return " ".join(text.split())


def normalize_document(doc: Document) -> str:
    return normalize_text(doc.body)


def sentence_id_for(text: str, doc_id: str, index: int) -> str:
    digest = hashlib.sha256(f"{doc_id}\x1f{index}\x1f{text}".encode("utf-8")).hexdigest()
    return digest[:16]


def _split_points(body: str) -> list[int]:
    """Indices just past each sentence terminator that ends a sentence."""
    points: list[int] = []
    n = len(body)
    for i, ch in enumerate(body):
        if ch not in _TERMINATORS:
            continue
        if i + 2 >= n or body[i + 1] != " " or not body[i + 2].isalpha():
            continue
        if ch == ".":
            # token ending at this period, e.g. "o.a." -> no split
            start = body.rfind(" ", 0, i) + 1
            word = body[start : i + 1]
            if word in ABBREVIATIONS:
                continue
        points.append(i + 1)
    return points


def split_sentences(body: str) -> list[str]:
    """Rule-based sentence split of a normalized body.

    Terminators {., !, ?} end a sentence when followed by a space and a
    letter, except after a known abbreviation. Joining the result with single
    spaces reproduces the body.
    """
    if not body:
        return []
    points = _split_points(body)
    sentences: list[str] = []
    prev = 0
    for p in points:
        sentences.append(body[prev:p])
        prev = p + 1  # skip the single separating space
    tail = body[prev:]
    if tail:
        sentences.append(tail)
    return sentences


def segment_sentences(body: str, doc_id: str) -> list[ContextSentence]:
    """Split a normalized body into sentences with neighbor context attached."""
    parts = split_sentences(body)
    out: list[ContextSentence] = []
    for idx, text in enumerate(parts):
        out.append(
            ContextSentence(
                sentence_id=sentence_id_for(text, doc_id, idx),
                text=text,
                context_before=parts[idx - 1] if idx > 0 else "",
                context_after=parts[idx + 1] if idx + 1 < len(parts) else "",
                doc_id=doc_id,
                index=idx,
            )
        )
    return out


def deduplicate(sentences: Iterable[ContextSentence]) -> list[ContextSentence]:
    """Keep the first occurrence per exact sentence text, preserving order."""
    seen: set[str] = set()
    out: list[ContextSentence] = []
    for s in sentences:
        if s.text in seen:
            continue
        seen.add(s.text)
        out.append(s)
    return out


def _iter_local_documents(root: Path, stats: FetchStats) -> Iterable[Document]:
    if not root.is_dir():
        raise SourceUnreachable(f"local source {root} is not a directory")
    for path in sorted(root.glob("*.jsonl")):
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except UnicodeDecodeError:
            logger.warning("skipping undecodable file %s", path)
            stats.skipped_malformed += 1
            continue
        for line in lines:
            if not line.strip():
                continue
            try:
                yield Document.from_record(json.loads(line))
            except (json.JSONDecodeError, MalformedDocument) as exc:
                logger.warning("skipping malformed record in %s: %s", path, exc)
                stats.skipped_malformed += 1
    for path in sorted(root.glob("*.txt")):
        sidecar = path.with_suffix(".json")
        try:
            body = path.read_text(encoding="utf-8")
            meta = json.loads(sidecar.read_text(encoding="utf-8")) if sidecar.exists() else {}
            rec = {
                "doc_id": meta.get("doc_id", path.stem),
                "title": meta.get("title", path.stem),
                "doc_type": meta.get("doc_type", ""),
                "published": meta.get("published"),
                "body": body,
                "source_uri": meta.get("source_uri", path.as_uri()),
            }
            yield Document.from_record(rec)
        except (UnicodeDecodeError, json.JSONDecodeError, MalformedDocument) as exc:
            logger.warning("skipping malformed document %s: %s", path, exc)
            stats.skipped_malformed += 1


def _fetch_remote_page(session, config: SourceConfig, params: dict) -> dict:
    last_error: Exception | None = None
    for attempt in range(config.max_retries):
        try:
            resp = session.get(config.base_url, params=params, timeout=config.timeout)
            if resp.status_code >= 500:
                last_error = SourceUnreachable(f"server error {resp.status_code}")
            elif resp.status_code >= 400:
                raise SourceUnreachable(f"query rejected with status {resp.status_code}")
            else:
                return resp.json()
        except SourceUnreachable:
            raise
        except Exception as exc:  # connection errors, bad JSON, timeouts
            last_error = exc
        time.sleep(min(0.1 * (attempt + 1), 1.0))
    raise SourceUnreachable(f"{config.base_url}: {last_error}")


def _iter_remote_documents(
    query: Sequence[str], window: DateWindow, config: SourceConfig, stats: FetchStats, session=None
) -> Iterable[Document]:
    if session is None:
        import requests

        session = requests.Session()

    def pages_for(keyword: str) -> list[Document]:
        docs: list[Document] = []
        page = 1
        while True:
            params = {
                config.query_param: keyword,
                config.date_from_param: window.start.isoformat(),
                config.page_param: page,
                config.page_size_param: config.page_size,
            }
            if window.end is not None:
                params[config.date_to_param] = window.end.isoformat()
            payload = _fetch_remote_page(session, config, params)
            for rec in payload.get("documents", []):
                try:
                    docs.append(Document.from_record(rec))
                except MalformedDocument as exc:
                    logger.warning("skipping malformed remote record: %s", exc)
                    stats.skipped_malformed += 1
            next_page = payload.get("next_page")
            if not next_page:
                break
            page = next_page
        return docs

    workers = max(1, config.concurrency)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for docs in pool.map(pages_for, list(query)):
            yield from docs


def fetch_documents(
    query: Sequence[str],
    window: DateWindow,
    source: SourceConfig,
    query_lexicon: Lexicon | None = None,
    stats: FetchStats | None = None,
    session=None,
) -> list[Document]:
    """Fetch documents that fall inside the window and contain a query keyword.

    The keyword pre-filter applies whole-token matching over the normalized
    body, through ``query_lexicon`` when given, otherwise by plain token-
    sequence containment of the query keywords. Results are deduplicated by
    doc_id and sorted by doc_id, so the stream order is deterministic.
    """
    if stats is None:
        stats = FetchStats()
    if source.local_dir:
        raw = _iter_local_documents(Path(source.local_dir), stats)
    elif source.base_url:
        raw = _iter_remote_documents(query, window, source, stats, session=session)
    else:
        raise SourceUnreachable("source config has neither local_dir nor base_url")

    keyword_lexicon = query_lexicon
    if keyword_lexicon is None:
        from biascorpus.lexicon import make_lexicon

        keyword_lexicon = make_lexicon(
            [(kw, "algemeen", "context_sensitive") for kw in dict.fromkeys(k.lower() for k in query)],
            source_id="query",
        )

    kept: dict[str, Document] = {}
    for doc in raw:
        if doc.doc_id in kept:
            continue
        if not window.contains(doc.published):
            stats.excluded_date += 1
            continue
        if not contains_any_term(normalize_text(doc.body), keyword_lexicon):
            stats.excluded_no_match += 1
            continue
        kept[doc.doc_id] = doc
    stats.fetched = len(kept)
    return [kept[k] for k in sorted(kept)]


def ingest(
    documents: Iterable[Document],
) -> list[ContextSentence]:
    """Normalize, segment, and deduplicate a document stream."""
    sentences: list[ContextSentence] = []
    for doc in documents:
        body = normalize_document(doc)
        sentences.extend(segment_sentences(body, doc.doc_id))
    return deduplicate(sentences)


def fixture_corpus_path() -> Path:
    """Path of the bundled synthetic corpus used for offline runs and tests."""
    ref = resources.files("biascorpus").joinpath("data/fixture_corpus.jsonl")
    with resources.as_file(ref) as p:
        return Path(p)
