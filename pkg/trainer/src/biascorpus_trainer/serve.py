"""Serve a trained artifact over the adapter wire protocol.

Subprocess transport: NDJSON requests on stdin, one response per line on
stdout, matched by id. Remote transport: POST /classify taking a JSON array
of requests. Scores are the positive-class softmax probability.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import torch


class ArtifactScorer:
    def __init__(self, artifact_dir: str | Path):
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        model_dir = Path(artifact_dir) / "model"
        if not model_dir.exists():
            model_dir = Path(artifact_dir)
        self.tokenizer = AutoTokenizer.from_pretrained(str(model_dir))
        self.model = AutoModelForSequenceClassification.from_pretrained(str(model_dir))
        self.model.eval()
        self.device = torch.device("cuda" if torch.cuda.is_available() else "cpu")
        self.model.to(self.device)

    @torch.no_grad()
    def score(self, texts: list[str], max_length: int = 128, batch_size: int = 16) -> list[float]:
        out: list[float] = []
        for start in range(0, len(texts), batch_size):
            chunk = texts[start : start + batch_size]
            enc = self.tokenizer(
                chunk, truncation=True, padding=True, max_length=max_length, return_tensors="pt"
            )
            logits = self.model(
                enc["input_ids"].to(self.device),
                attention_mask=enc["attention_mask"].to(self.device),
            ).logits
            probs = torch.softmax(logits, dim=-1)[:, 1]
            out.extend(float(p) for p in probs)
        return out


def respond(scorer: ArtifactScorer, request: dict) -> dict:
    rid = request.get("id")
    try:
        text = request["text"]
        [score] = scorer.score([text])
        return {"id": rid, "score": score}
    except Exception as exc:  # per-item failure, never crash the worker
        return {"id": rid, "error": f"{type(exc).__name__}: {exc}"}


def serve_stdio(artifact_dir: str | Path) -> int:
    scorer = ArtifactScorer(artifact_dir)
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError:
            sys.stdout.write(json.dumps({"id": None, "error": "invalid json"}) + "\n")
            sys.stdout.flush()
            continue
        sys.stdout.write(json.dumps(respond(scorer, request), ensure_ascii=False) + "\n")
        sys.stdout.flush()
    return 0


def serve_http(artifact_dir: str | Path, host: str = "127.0.0.1", port: int = 8500) -> None:
    from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

    scorer = ArtifactScorer(artifact_dir)

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):  # noqa: N802 (stdlib naming)
            if self.path != "/classify":
                self.send_error(404)
                return
            length = int(self.headers.get("Content-Length", 0))
            try:
                requests_ = json.loads(self.rfile.read(length))
                payload = [respond(scorer, r) for r in requests_]
            except (json.JSONDecodeError, TypeError) as exc:
                self.send_error(400, str(exc))
                return
            body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, *args):  # quiet
            pass

    server = ThreadingHTTPServer((host, port), Handler)
    print(f"serving /classify on http://{host}:{port}", file=sys.stderr)
    server.serve_forever()
