"""Run manifests: reproducibility envelope around every CLI command.

Each output file gets a sibling ``<out>.manifest.json`` recording the
command, its config snapshot, the seed and derived stage seeds, and sha256
digests of all inputs and outputs. Manifests are deterministic by default
(no wall clock) so re-running a pure stage reproduces them byte for byte;
``--stamp`` opts into a wall-clock timestamp at the cost of that property.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from biascorpus import __version__
from biascorpus.errors import ManifestDrift
from biascorpus.io import read_json, write_json

MANIFEST_SCHEMA = 1
ENV_PREFIX = "BIASCORPUS_"


def stage_seed(seed: int, stage: str) -> int:
    """Derive a named sub-seed; all stage randomness flows from one knob."""
    digest = hashlib.sha256(f"{seed}:{stage}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int
    sub_seeds: dict[str, int] = field(default_factory=dict)
    inputs: dict[str, str] = field(default_factory=dict)  # path -> sha256
    outputs: dict[str, str] = field(default_factory=dict)
    timestamp: str | None = None
    tool_version: str = __version__

    def add_input(self, path: str | Path) -> None:
        self.inputs[str(path)] = sha256_file(path)

    def add_output(self, path: str | Path) -> None:
        self.outputs[str(path)] = sha256_file(path)

    def stamp(self) -> None:
        self.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")

    def to_json(self) -> dict:
        return {
            "schema": MANIFEST_SCHEMA,
            "tool_version": self.tool_version,
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "sub_seeds": self.sub_seeds,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "timestamp": self.timestamp,
        }

    def write(self, out_path: str | Path) -> Path:
        path = manifest_path_for(out_path)
        write_json(path, self.to_json())
        return path


def manifest_path_for(out_path: str | Path) -> Path:
    p = Path(out_path)
    return p.with_name(p.name + ".manifest.json")


def verify_against_manifest(out_path: str | Path) -> None:
    """Refuse to run when recorded input digests no longer match on disk."""
    path = manifest_path_for(out_path)
    if not path.exists():
        return
    recorded = read_json(path)
    drifted = []
    for input_path, digest in recorded.get("inputs", {}).items():
        if not Path(input_path).exists():
            drifted.append(f"{input_path} (missing)")
        elif sha256_file(input_path) != digest:
            drifted.append(input_path)
    if drifted:
        raise ManifestDrift("inputs changed since last run: " + ", ".join(drifted))


def load_config_file(path: str | Path) -> dict[str, str]:
    """Simple key=value config format; '#' lines are comments."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def apply_env_overrides(config: dict[str, str]) -> dict[str, str]:
    """Environment variables BIASCORPUS_<KEY> override config file values."""
    merged = dict(config)
    for key, value in os.environ.items():
        if key.startswith(ENV_PREFIX):
            merged[key[len(ENV_PREFIX) :].lower()] = value
    return merged
