"""Reading the toolkit's labeled-instance JSONL split files."""

from __future__ import annotations

import json
from pathlib import Path


class BadSplitFile(Exception):
    pass


def read_split(path: str | Path) -> tuple[list[str], list[int]]:
    """(texts, labels) from a split file; labels must be binary."""
    texts: list[str] = []
    labels: list[int] = []
    path = Path(path)
    if not path.exists():
        raise BadSplitFile(f"{path} does not exist")
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            text = rec["text"]
            label = int(rec["label"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise BadSplitFile(f"{path}:{lineno}: {exc}") from exc
        if label not in (0, 1):
            raise BadSplitFile(f"{path}:{lineno}: label must be 0 or 1, got {label}")
        texts.append(text)
        labels.append(label)
    if not texts:
        raise BadSplitFile(f"{path}: no instances")
    return texts, labels
