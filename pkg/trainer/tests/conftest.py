from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

WORDS = (
    "beleid overheid aanpak gemeente kamer wet regeling voorstel kosten budget "
    "zorg onderzoek rapport cijfers periode regio aanvraag procedure termijn advies"
).split()


def toy_split(path: Path, n: int, seed: int, signal_token: str = "markeer") -> None:
    """Binary toy data where the positive class is a planted token."""
    rng = random.Random(seed)
    with path.open("w", encoding="utf-8") as fh:
        for i in range(n):
            label = i % 2
            tokens = [rng.choice(WORDS) for _ in range(8)]
            if label == 1:
                tokens[rng.randrange(8)] = signal_token
            rec = {
                "item_id": f"t{i:04d}",
                "text": " ".join(tokens),
                "context_before": "",
                "context_after": "",
                "matches": [],
                "label": label,
                "resolution": "direct",
            }
            fh.write(json.dumps(rec) + "\n")


@pytest.fixture()
def toy_files(tmp_path):
    train = tmp_path / "train.jsonl"
    val = tmp_path / "val.jsonl"
    toy_split(train, 50, seed=1)
    toy_split(val, 20, seed=2)
    return train, val


@pytest.fixture(scope="session")
def toy_split_writer():
    return toy_split
