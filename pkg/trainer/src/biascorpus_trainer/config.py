"""Training configuration with the published fine-tuning defaults."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path


@dataclass
class TrainerConfig:
    base_model: str = "tiny-random"
    beta1: float = 0.9
    beta2: float = 0.999
    batch_size: int = 8
    dropout: float = 0.1
    learning_rate: float = 2e-5
    epochs: int = 4
    seed: int = 0
    max_length: int = 128

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "TrainerConfig":
        return cls(**{k: v for k, v in data.items() if k in cls.__dataclass_fields__})

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "TrainerConfig":
        return cls.from_json(json.loads(Path(path).read_text()))
