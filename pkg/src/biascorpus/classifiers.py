"""Uniform classifier abstraction and the adapter wire protocol.

Native classifiers (the prohibited-term rule, a deterministic hash mock) run
in process. External models plug in through two transports speaking the same
schema:

  subprocess: newline-delimited JSON on stdin/stdout.
      request  {"id": ..., "text": ..., "context_before": ..., "context_after": ...}
      response {"id": ..., "score": 0.0-1.0}  or  {"id": ..., "error": ...}
      One response line per request line; responses may arrive in any order
      and are matched by id.
  remote: POST /classify with a JSON array of requests, JSON array of
      responses back, same schemas.

Generative models are reached through a generic chat-completion client: the
prompt template is rendered per sentence and the reply must be exactly "0" or
"1" after trimming; anything else counts as an abstention.
"""

from __future__ import annotations

import hashlib
import json
import queue
import subprocess
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from biascorpus.dataset import BinaryLabel, CandidateItem, LabeledInstance
from biascorpus.errors import AdapterUnavailable, MissingPlaceholder
from biascorpus.lexicon import Lexicon, TermClass, match_terms

PLACEHOLDER = "[item]"

# Default zero-shot prompt (Dutch). The sentence replaces [item].
DEFAULT_PROMPT_NL = (
    "Je bent een expert op het gebied van bias, stereotypering en discriminatie. "
    "Je taak is om zinnen te classificeren volgens de volgende definitie: een zin "
    "bevat bias als de zin een stereotype, uitsluiting, machtsverhoudingen of "
    "vooroordelen bevat, die impliciet of expliciet kunnen zijn, en die gaan over "
    "een af te bakenen groep personen, OF als een zin een woord bevat wat moet "
    "worden vermeden omdat het bias bevat. Geef de volgende zin een label, "
    "antwoord alleen met 0 of 1. Geef de zin het label 0 voor niet-biased en 1 "
    "voor biased. De zin is: [item]."
)

DEFAULT_PROMPT_EN = (
    "You are an expert in bias, stereotyping, and discrimination. Your task is to "
    "classify sentences according to the following definition: a sentence contains "
    "bias if it includes stereotypes, exclusion, power dynamics, or prejudices—"
    "which can be implicit or explicit—about a specific group of people, OR if the "
    "sentence contains a word that should be avoided because it is biased. Label "
    "the following sentence by answering only with 0 or 1. Assign the label 0 for "
    "not biased and 1 for biased. The sentence is: [item]."
)


@dataclass(frozen=True)
class PromptTemplate:
    text: str
    language: str = "nl"

    def __post_init__(self) -> None:
        n = self.text.count(PLACEHOLDER)
        if n == 0:
            raise MissingPlaceholder(f"template has no {PLACEHOLDER} placeholder")
        if n > 1:
            raise ValueError(f"template has {n} {PLACEHOLDER} placeholders, expected exactly 1")


def default_prompt(language: str = "nl") -> PromptTemplate:
    text = DEFAULT_PROMPT_NL if language == "nl" else DEFAULT_PROMPT_EN
    return PromptTemplate(text=text, language=language)


def render_prompt(template: PromptTemplate, item: CandidateItem | LabeledInstance | str) -> str:
    """Substitute the sentence into the template's single placeholder."""
    text = item if isinstance(item, str) else item.text
    return template.text.replace(PLACEHOLDER, text, 1)


_TRIM_CHARS = " \t\r\n\f\v.,;:!?\"'`()[]{}<>*_-"


def parse_generative_response(text: str) -> BinaryLabel | None:
    """Strict 0/1 reply grammar; None means the model abstained."""
    trimmed = text.strip(_TRIM_CHARS)
    if trimmed == "0":
        return BinaryLabel.NOT_BIASED
    if trimmed == "1":
        return BinaryLabel.BIASED
    return None


@dataclass(frozen=True)
class Prediction:
    item_id: str
    label: BinaryLabel
    score: float
    model_id: str
    latency_ms: float = 0.0
    abstained: bool = False

    def to_record(self) -> dict:
        return {
            "item_id": self.item_id,
            "label": int(self.label),
            "score": self.score,
            "model_id": self.model_id,
            "latency_ms": self.latency_ms,
            "abstained": self.abstained,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Prediction":
        return cls(
            item_id=rec["item_id"],
            label=BinaryLabel(int(rec["label"])),
            score=float(rec["score"]),
            model_id=rec.get("model_id", ""),
            latency_ms=float(rec.get("latency_ms", 0.0)),
            abstained=bool(rec.get("abstained", False)),
        )


@dataclass(frozen=True)
class ItemFailure:
    item_id: str
    error: str
    model_id: str = ""


@dataclass(frozen=True)
class AdapterRequest:
    id: str
    text: str
    context_before: str = ""
    context_after: str = ""

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "context_before": self.context_before,
            "context_after": self.context_after,
        }


def rule_baseline_classify(item: CandidateItem | LabeledInstance) -> Prediction:
    """Biased iff any recorded match is a prohibited-class term."""
    item_id = item.item_id
    hit = any(m.term.term_class is TermClass.PROHIBITED for m in item.matches)
    return Prediction(
        item_id=item_id,
        label=BinaryLabel.BIASED if hit else BinaryLabel.NOT_BIASED,
        score=1.0 if hit else 0.0,
        model_id="rule-prohibited",
    )


class ScoreAdapter(Protocol):
    """Anything that can score a batch of requests."""

    model_id: str

    def score_batch(self, requests: Sequence[AdapterRequest]) -> dict[str, float | Exception]:
        """Map request id -> score, or an Exception for per-item failures."""
        ...


class RuleAdapter:
    """Prohibited-term rule over raw text, via lexicon matching."""

    def __init__(self, lexicon: Lexicon):
        self.lexicon = lexicon
        self.model_id = "rule-prohibited"

    def score_batch(self, requests: Sequence[AdapterRequest]) -> dict[str, float | Exception]:
        out: dict[str, float | Exception] = {}
        for req in requests:
            matches = match_terms(req.text, self.lexicon)
            hit = any(m.term.term_class is TermClass.PROHIBITED for m in matches)
            out[req.id] = 1.0 if hit else 0.0
        return out


def hash_score(text: str) -> float:
    """Deterministic pseudo-score in [0, 1] derived from the text digest."""
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big") / 0xFFFFFFFF


class MockAdapter:
    """In-process stand-in that scores by text hash; 'kapot' triggers an error."""

    model_id = "mock-hash"

    def score_batch(self, requests: Sequence[AdapterRequest]) -> dict[str, float | Exception]:
        out: dict[str, float | Exception] = {}
        for req in requests:
            if "kapot" in req.text:
                out[req.id] = RuntimeError("simulated inference failure")
            else:
                out[req.id] = hash_score(req.text)
        return out


class SubprocessAdapter:
    """Long-lived worker process speaking the NDJSON transport.

    A daemon thread drains the worker's stdout into a queue, so response
    waits can time out instead of blocking forever on a misbehaving worker.
    """

    def __init__(self, command: Sequence[str], model_id: str | None = None, timeout: float = 60.0):
        self.command = list(command)
        self.model_id = model_id or f"subprocess:{self.command[0]}"
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._lock = threading.Lock()

    def _ensure(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    bufsize=1,
                )
            except OSError as exc:
                raise AdapterUnavailable(f"cannot start {self.command}: {exc}") from exc
            self._lines = queue.Queue()
            reader = threading.Thread(
                target=self._drain, args=(self._proc, self._lines), daemon=True
            )
            reader.start()
        return self._proc

    @staticmethod
    def _drain(proc: subprocess.Popen, lines: "queue.Queue[str | None]") -> None:
        for line in proc.stdout:
            lines.put(line)
        lines.put(None)  # EOF marker

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=5)
        self._proc = None

    def __enter__(self) -> "SubprocessAdapter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _next_line(self, deadline: float) -> str:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise AdapterUnavailable(f"adapter response timed out after {self.timeout}s")
        try:
            line = self._lines.get(timeout=remaining)
        except queue.Empty:
            raise AdapterUnavailable(f"adapter response timed out after {self.timeout}s") from None
        if line is None:
            raise AdapterUnavailable("adapter process closed its output stream")
        return line

    def score_batch(self, requests: Sequence[AdapterRequest]) -> dict[str, float | Exception]:
        with self._lock:
            proc = self._ensure()
            deadline = time.monotonic() + self.timeout
            try:
                for req in requests:
                    proc.stdin.write(json.dumps(req.to_record(), ensure_ascii=False) + "\n")
                proc.stdin.flush()
                out: dict[str, float | Exception] = {}
                pending = {req.id for req in requests}
                while pending:
                    resp = json.loads(self._next_line(deadline))
                    rid = resp.get("id")
                    if rid not in pending:
                        continue  # stale or duplicate response line
                    pending.discard(rid)
                    if "error" in resp and resp["error"]:
                        out[rid] = RuntimeError(str(resp["error"]))
                    else:
                        score = float(resp["score"])
                        if not 0.0 <= score <= 1.0:
                            out[rid] = ValueError(f"score {score} outside [0, 1]")
                        else:
                            out[rid] = score
                return out
            except (BrokenPipeError, OSError) as exc:
                raise AdapterUnavailable(f"adapter process failed: {exc}") from exc


class RemoteAdapter:
    """POST /classify transport."""

    def __init__(self, url: str, model_id: str | None = None, timeout: float = 30.0, session=None):
        self.url = url
        self.model_id = model_id or f"remote:{url}"
        self.timeout = timeout
        if session is None:
            import requests

            session = requests.Session()
        self.session = session

    def score_batch(self, requests_: Sequence[AdapterRequest]) -> dict[str, float | Exception]:
        payload = [r.to_record() for r in requests_]
        try:
            resp = self.session.post(self.url, json=payload, timeout=self.timeout)
        except Exception as exc:
            raise AdapterUnavailable(f"{self.url}: {exc}") from exc
        if resp.status_code != 200:
            raise AdapterUnavailable(f"{self.url} returned status {resp.status_code}")
        out: dict[str, float | Exception] = {}
        for item in resp.json():
            rid = item.get("id")
            if item.get("error"):
                out[rid] = RuntimeError(str(item["error"]))
            else:
                out[rid] = float(item["score"])
        return out


@dataclass
class ChatClientConfig:
    endpoint: str
    model: str
    auth_token_env: str = "BIASCORPUS_API_TOKEN"
    temperature: float = 0.0
    max_tokens: int = 4
    timeout: float = 60.0


class ChatCompletionAdapter:
    """Zero-shot generative classification through a chat-completion endpoint.

    Replies outside the strict 0/1 grammar score as abstentions (score None),
    which classify_batch converts per its abstain policy.
    """

    def __init__(self, config: ChatClientConfig, template: PromptTemplate | None = None, session=None):
        self.config = config
        self.template = template or default_prompt("nl")
        self.model_id = f"chat:{config.model}"
        if session is None:
            import requests

            session = requests.Session()
        self.session = session

    def _headers(self) -> dict:
        import os

        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.config.auth_token_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, prompt: str) -> str:
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        try:
            resp = self.session.post(
                self.config.endpoint, json=body, headers=self._headers(), timeout=self.config.timeout
            )
        except Exception as exc:
            raise AdapterUnavailable(f"{self.config.endpoint}: {exc}") from exc
        if resp.status_code != 200:
            raise AdapterUnavailable(f"chat endpoint returned status {resp.status_code}")
        payload = resp.json()
        return payload["choices"][0]["message"]["content"]

    def score_batch(self, requests_: Sequence[AdapterRequest]) -> dict[str, float | Exception]:
        out: dict[str, float | Exception] = {}
        for req in requests_:
            reply = self.complete(render_prompt(self.template, req.text))
            label = parse_generative_response(reply)
            out[req.id] = None if label is None else float(int(label))  # type: ignore[assignment]
        return out


@dataclass
class BatchConfig:
    retries: int = 2
    in_flight: int = 8
    chunk_size: int = 32
    threshold: float = 0.5
    abstain_policy: str = "not_biased"  # or "drop"


def _requests_for(items: Sequence[CandidateItem | LabeledInstance]) -> list[AdapterRequest]:
    reqs = []
    for item in items:
        if isinstance(item, CandidateItem):
            reqs.append(
                AdapterRequest(
                    id=item.item_id,
                    text=item.sentence.text,
                    context_before=item.sentence.context_before,
                    context_after=item.sentence.context_after,
                )
            )
        else:
            reqs.append(
                AdapterRequest(
                    id=item.item_id,
                    text=item.text,
                    context_before=item.context_before,
                    context_after=item.context_after,
                )
            )
    return reqs


def classify_batch(
    adapter: ScoreAdapter,
    items: Sequence[CandidateItem | LabeledInstance],
    config: BatchConfig | None = None,
) -> list[Prediction | ItemFailure]:
    """Score a batch, one outcome per item in input order.

    Per-item failures become ItemFailure entries after ``retries`` attempts;
    the rest of the batch is unaffected. Abstentions (score None from
    generative adapters) map to NotBiased with the abstained flag by default.
    """
    config = config or BatchConfig()
    requests_ = _requests_for(items)
    ids = [r.id for r in requests_]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate item ids in batch")

    chunks = [requests_[i : i + config.chunk_size] for i in range(0, len(requests_), config.chunk_size)]
    scores: dict[str, float | None | Exception] = {}
    latencies: dict[str, float] = {}

    def run_chunk(chunk: list[AdapterRequest]) -> None:
        t0 = time.monotonic()
        result = adapter.score_batch(chunk)
        elapsed_ms = (time.monotonic() - t0) * 1000 / max(len(chunk), 1)
        for req in chunk:
            value = result.get(req.id, KeyError(f"adapter returned no response for {req.id}"))
            attempts = 0
            while isinstance(value, Exception) and attempts < config.retries:
                attempts += 1
                retry_result = adapter.score_batch([req])
                value = retry_result.get(req.id, value)
            scores[req.id] = value
            latencies[req.id] = elapsed_ms
    if len(chunks) > 1 and config.in_flight > 1:
        with ThreadPoolExecutor(max_workers=config.in_flight) as pool:
            list(pool.map(run_chunk, chunks))
    else:
        for chunk in chunks:
            run_chunk(chunk)

    outcomes: list[Prediction | ItemFailure] = []
    for req in requests_:
        value = scores.get(req.id)
        if isinstance(value, Exception):
            outcomes.append(ItemFailure(item_id=req.id, error=str(value), model_id=adapter.model_id))
        elif value is None:
            outcomes.append(
                Prediction(
                    item_id=req.id,
                    label=BinaryLabel.NOT_BIASED,
                    score=0.0,
                    model_id=adapter.model_id,
                    latency_ms=latencies.get(req.id, 0.0),
                    abstained=True,
                )
            )
        else:
            label = BinaryLabel.BIASED if value >= config.threshold else BinaryLabel.NOT_BIASED
            outcomes.append(
                Prediction(
                    item_id=req.id,
                    label=label,
                    score=float(value),
                    model_id=adapter.model_id,
                    latency_ms=latencies.get(req.id, 0.0),
                )
            )
    return outcomes


def predictions_only(outcomes: Sequence[Prediction | ItemFailure]) -> list[Prediction]:
    return [o for o in outcomes if isinstance(o, Prediction)]


def failures_only(outcomes: Sequence[Prediction | ItemFailure]) -> list[ItemFailure]:
    return [o for o in outcomes if isinstance(o, ItemFailure)]


def mock_adapter_main(argv: Sequence[str] | None = None) -> int:
    """Console entry point: NDJSON worker with the mock hash scorer.

    --shuffle-window N buffers N requests and answers them in reverse order,
    which exercises the client's order-free id matching.
    """
    import argparse

    parser = argparse.ArgumentParser(prog="biascorpus-mock-adapter")
    parser.add_argument("--shuffle-window", type=int, default=1)
    args = parser.parse_args(argv)

    def respond(req: dict) -> dict:
        text = req.get("text", "")
        if "kapot" in text:
            return {"id": req.get("id"), "error": "simulated inference failure"}
        return {"id": req.get("id"), "score": hash_score(text)}

    window: list[dict] = []

    def flush() -> None:
        for resp in reversed(window):
            sys.stdout.write(json.dumps(resp, ensure_ascii=False) + "\n")
        sys.stdout.flush()
        window.clear()

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
        except json.JSONDecodeError:
            sys.stdout.write(json.dumps({"id": None, "error": "invalid json"}) + "\n")
            sys.stdout.flush()
            continue
        window.append(respond(req))
        if len(window) >= max(args.shuffle_window, 1):
            flush()
    flush()
    return 0


if __name__ == "__main__":
    sys.exit(mock_adapter_main())
