"""Train/validation/test splits, rare-term holdout, and class resampling.

Two evaluation regimes: in-domain (plain proportional split) and
out-of-domain (terms occurring at most ``threshold`` times are held out, and
every instance containing one moves to the test set, so held-out surfaces
never appear in training or validation text). Resampling rebalances a
training set to an exact size and biased ratio by duplicating biased
instances and/or subsampling unbiased ones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import floor
from typing import Sequence

from biascorpus.dataset import BinaryLabel, LabeledInstance
from biascorpus.errors import InfeasibleTarget, TooSmall
from biascorpus.lexicon import Lexicon, scan_term_hits


class Regime(str, Enum):
    IN_DOMAIN = "in_domain"
    OUT_OF_DOMAIN = "out_of_domain"


@dataclass(frozen=True)
class SplitConfig:
    proportions: tuple[float, float, float] = (0.6, 0.2, 0.2)
    seed: int = 0
    stratify: bool = False

    def __post_init__(self) -> None:
        if any(not 0.0 < p < 1.0 for p in self.proportions):
            raise ValueError(f"each proportion must be in (0, 1): {self.proportions}")
        if abs(sum(self.proportions) - 1.0) > 1e-9:
            raise ValueError(f"proportions must sum to 1: {self.proportions}")


@dataclass
class RegimeSplits:
    regime: Regime
    train: list[LabeledInstance]
    val: list[LabeledInstance]
    test: list[LabeledInstance]
    held_out_terms: list[str] = field(default_factory=list)
    rare_threshold: int = 0
    nothing_held_out: bool = False
    seed: int = 0

    def manifest(self) -> dict:
        return {
            "schema": 1,
            "regime": self.regime.value,
            "seed": self.seed,
            "held_out_terms": list(self.held_out_terms),
            "rare_threshold": self.rare_threshold,
            "nothing_held_out": self.nothing_held_out,
            "item_ids": {
                "train": [i.item_id for i in self.train],
                "val": [i.item_id for i in self.val],
                "test": [i.item_id for i in self.test],
            },
        }


def _cut_sizes(n: int, proportions: tuple[float, float, float]) -> tuple[int, int, int]:
    # floor the val/test shares; train absorbs the remainder
    n_val = floor(proportions[1] * n)
    n_test = floor(proportions[2] * n)
    return n - n_val - n_test, n_val, n_test


def split_dataset(dataset: Sequence[LabeledInstance], config: SplitConfig) -> RegimeSplits:
    """Seeded shuffle, then contiguous train/val/test cut at floor boundaries."""
    if len(dataset) < 5:
        raise TooSmall(f"need at least 5 instances to split, got {len(dataset)}")
    rng = random.Random(config.seed)

    def cut(items: list[LabeledInstance]) -> tuple[list, list, list]:
        shuffled = list(items)
        rng.shuffle(shuffled)
        n_train, n_val, n_test = _cut_sizes(len(shuffled), config.proportions)
        return (
            shuffled[:n_train],
            shuffled[n_train : n_train + n_val],
            shuffled[n_train + n_val :],
        )

    if config.stratify:
        train: list[LabeledInstance] = []
        val: list[LabeledInstance] = []
        test: list[LabeledInstance] = []
        for label in (BinaryLabel.NOT_BIASED, BinaryLabel.BIASED):
            group = [i for i in dataset if i.label is label]
            if not group:
                continue
            t, v, s = cut(group)
            train.extend(t)
            val.extend(v)
            test.extend(s)
        rng.shuffle(train)
        rng.shuffle(val)
        rng.shuffle(test)
    else:
        train, val, test = cut(list(dataset))

    return RegimeSplits(
        regime=Regime.IN_DOMAIN, train=train, val=val, test=test, seed=config.seed
    )


def term_occurrence_counts(dataset: Sequence[LabeledInstance], lexicon: Lexicon) -> dict[str, int]:
    """Whole-token occurrence count per term over all instance texts.

    Counts every surface/variant hit independently of overlap resolution, so
    a term shadowed by a longer overlapping term still counts; this is what
    makes the holdout leakage guarantee airtight.
    """
    counts: dict[str, int] = {}
    for inst in dataset:
        for surface, n in scan_term_hits(inst.text, lexicon).items():
            counts[surface] = counts.get(surface, 0) + n
    return counts


def holdout_rare_terms(
    dataset: Sequence[LabeledInstance],
    lexicon: Lexicon,
    threshold: int,
    proportions: tuple[float, float, float] = (0.6, 0.2, 0.2),
    seed: int = 0,
    test_mode: str = "excluded_only",
) -> RegimeSplits:
    """Hold out terms occurring at most ``threshold`` times; their instances
    form the out-of-domain test set.

    test_mode "excluded_only" (default) keeps the test set to exactly the
    excluded instances; "mixed" additionally routes the remaining pool's test
    share into the test set. Train/val always come from instances free of
    held-out terms, split by the renormalized train:val proportions.
    """
    if threshold < 1:
        raise ValueError(f"threshold must be >= 1, got {threshold}")
    if test_mode not in ("excluded_only", "mixed"):
        raise ValueError(f"unknown test_mode {test_mode!r}")

    counts = term_occurrence_counts(dataset, lexicon)
    held_out = sorted(t for t, n in counts.items() if n <= threshold)
    held_out_lexicon = None
    if held_out:
        sub_terms = [lexicon.by_surface(s) for s in held_out]
        held_out_lexicon = Lexicon(terms=sub_terms, source_id="held_out")

    if not held_out:
        rng = random.Random(seed)
        remaining = list(dataset)
        rng.shuffle(remaining)
        n_val = floor(len(remaining) * proportions[1] / (proportions[0] + proportions[1]))
        return RegimeSplits(
            regime=Regime.OUT_OF_DOMAIN,
            train=remaining[: len(remaining) - n_val],
            val=remaining[len(remaining) - n_val :],
            test=[],
            held_out_terms=[],
            rare_threshold=threshold,
            nothing_held_out=True,
            seed=seed,
        )

    excluded: list[LabeledInstance] = []
    remaining: list[LabeledInstance] = []
    for inst in dataset:
        if scan_term_hits(inst.text, held_out_lexicon):
            excluded.append(inst)
        else:
            remaining.append(inst)

    rng = random.Random(seed)
    rng.shuffle(remaining)
    if test_mode == "mixed":
        n_train, n_val, n_test = _cut_sizes(len(remaining), proportions)
        train = remaining[:n_train]
        val = remaining[n_train : n_train + n_val]
        test = excluded + remaining[n_train + n_val :]
    else:
        # renormalized train:val, val floored so train keeps the remainder
        val_share = proportions[1] / (proportions[0] + proportions[1])
        n_val = floor(len(remaining) * val_share)
        train = remaining[: len(remaining) - n_val]
        val = remaining[len(remaining) - n_val :]
        test = list(excluded)

    return RegimeSplits(
        regime=Regime.OUT_OF_DOMAIN,
        train=train,
        val=val,
        test=test,
        held_out_terms=held_out,
        rare_threshold=threshold,
        seed=seed,
    )


class ResampleStrategy(str, Enum):
    NONE = "none"
    UNDERSAMPLE = "undersample"
    OVERSAMPLE = "oversample"
    BALANCED = "balanced"


@dataclass(frozen=True)
class ResampleConfig:
    strategy: ResampleStrategy
    target_biased_ratio: float
    target_size: int
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.target_biased_ratio <= 1.0:
            raise ValueError(f"ratio must be in [0, 1]: {self.target_biased_ratio}")
        if self.target_size < 1:
            raise ValueError(f"size must be >= 1: {self.target_size}")


# Named presets with the exact published targets.
RESAMPLE_PRESETS: dict[str, tuple[float, int]] = {
    "undersample": (0.310, 1_649),
    "oversample": (0.386, 2_648),
    "balanced": (0.500, 2_137),
}


def preset_config(name: str, seed: int = 0) -> ResampleConfig:
    ratio, size = RESAMPLE_PRESETS[name]
    return ResampleConfig(
        strategy=ResampleStrategy(name), target_biased_ratio=ratio, target_size=size, seed=seed
    )


def round_half_up(ratio: float, size: int) -> int:
    """floor(ratio*size + 1/2) in exact decimal arithmetic."""
    return int(Fraction(str(ratio)) * size + Fraction(1, 2))


def resample(train: Sequence[LabeledInstance], config: ResampleConfig) -> list[LabeledInstance]:
    """Rebalance to exactly target_size with round-half-up(ratio*size) biased.

    undersample draws both classes without replacement; oversample keeps each
    distinct biased instance and duplicates with replacement to the target,
    sampling unbiased without replacement; balanced combines the two. The
    output is shuffled with the config seed.
    """
    if config.strategy is ResampleStrategy.NONE:
        return list(train)

    biased = [i for i in train if i.label is BinaryLabel.BIASED]
    unbiased = [i for i in train if i.label is BinaryLabel.NOT_BIASED]
    if not biased or not unbiased:
        raise InfeasibleTarget("resampling needs both classes present in the input")

    n_biased_target = round_half_up(config.target_biased_ratio, config.target_size)
    n_unbiased_target = config.target_size - n_biased_target
    rng = random.Random(config.seed)

    def without_replacement(pool: list[LabeledInstance], k: int, cls: str) -> list[LabeledInstance]:
        if k > len(pool):
            raise InfeasibleTarget(
                f"target needs {k} unique {cls} instances but only {len(pool)} exist"
            )
        return rng.sample(pool, k)

    def with_replacement(pool: list[LabeledInstance], k: int) -> list[LabeledInstance]:
        if k <= len(pool):
            return rng.sample(pool, k)
        return list(pool) + rng.choices(pool, k=k - len(pool))

    if config.strategy is ResampleStrategy.UNDERSAMPLE:
        chosen_biased = without_replacement(biased, n_biased_target, "biased")
        chosen_unbiased = without_replacement(unbiased, n_unbiased_target, "unbiased")
    elif config.strategy is ResampleStrategy.OVERSAMPLE:
        chosen_biased = with_replacement(biased, n_biased_target)
        chosen_unbiased = without_replacement(unbiased, n_unbiased_target, "unbiased")
    elif config.strategy is ResampleStrategy.BALANCED:
        chosen_biased = with_replacement(biased, n_biased_target)
        chosen_unbiased = without_replacement(unbiased, n_unbiased_target, "unbiased")
    else:  # pragma: no cover
        raise ValueError(config.strategy)

    out = chosen_biased + chosen_unbiased
    rng.shuffle(out)
    return out
