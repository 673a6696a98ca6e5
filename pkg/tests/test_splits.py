from __future__ import annotations

import random
from collections import Counter
from decimal import ROUND_HALF_UP, Decimal

import pytest

from biascorpus.dataset import BinaryLabel
from biascorpus.errors import InfeasibleTarget, TooSmall
from biascorpus.lexicon import make_lexicon, scan_term_hits
from biascorpus.splits import (
    RESAMPLE_PRESETS,
    Regime,
    ResampleConfig,
    ResampleStrategy,
    SplitConfig,
    holdout_rare_terms,
    preset_config,
    resample,
    round_half_up,
    split_dataset,
)
from tests.conftest import make_instances, random_filler_sentence


@pytest.fixture()
def holdout_lexicon():
    return make_lexicon(
        [
            ("stroom", "migratie", "context_sensitive"),
            ("migranten", "migratie", "conditionally_biased", ["migrant"]),
            ("zeldzaam", "algemeen", "context_sensitive", ["zeldzame"]),
            ("islam", "geloof", "conditionally_biased"),
        ]
    )


def dataset_of(lexicon, n=40, rare_term="zeldzaam", rare_count=3, seed=2):
    rng = random.Random(seed)
    rows = []
    common = ["stroom", "migranten", "islam"]
    for i in range(n - rare_count):
        text = f"{random_filler_sentence(rng, 5)} {common[i % 3]}"
        rows.append((text, i % 4 == 0))
    for i in range(rare_count):
        form = rare_term if i % 2 == 0 else "zeldzame"
        rows.append((f"{random_filler_sentence(rng, 4)} {form} geval", True))
    return make_instances(lexicon, [(t, int(l)) for t, l in rows])


class TestSplitSizes:
    def test_n10_sizes(self, holdout_lexicon):
        data = dataset_of(holdout_lexicon, n=10, rare_count=0)
        splits = split_dataset(data, SplitConfig(seed=1))
        assert (len(splits.train), len(splits.val), len(splits.test)) == (6, 2, 2)

    def test_n5_minimum(self, holdout_lexicon):
        data = dataset_of(holdout_lexicon, n=5, rare_count=0)
        splits = split_dataset(data, SplitConfig(seed=1))
        assert (len(splits.train), len(splits.val), len(splits.test)) == (3, 1, 1)

    def test_too_small(self, holdout_lexicon):
        with pytest.raises(TooSmall):
            split_dataset(dataset_of(holdout_lexicon, n=4, rare_count=0), SplitConfig())

    def test_partition_property(self, holdout_lexicon):
        data = dataset_of(holdout_lexicon, n=83, rare_count=0)
        splits = split_dataset(data, SplitConfig(seed=9))
        ids = [i.item_id for part in (splits.train, splits.val, splits.test) for i in part]
        assert sorted(ids) == sorted(i.item_id for i in data)
        assert len(set(ids)) == len(ids)

    def test_floor_remainder_rule_many_sizes(self, holdout_lexicon):
        for n in (5, 7, 11, 23, 50, 99):
            data = dataset_of(holdout_lexicon, n=n, rare_count=0)
            splits = split_dataset(data, SplitConfig(seed=n))
            n_val = int(0.2 * n)
            n_test = int(0.2 * n)
            assert len(splits.val) == n_val
            assert len(splits.test) == n_test
            assert len(splits.train) == n - n_val - n_test

    def test_stratified_preserves_ratio_within_one(self, holdout_lexicon):
        data = dataset_of(holdout_lexicon, n=80, rare_count=0)
        splits = split_dataset(data, SplitConfig(seed=3, stratify=True))
        n_biased = sum(1 for i in data if i.label is BinaryLabel.BIASED)
        for part, share in ((splits.train, 0.6), (splits.val, 0.2), (splits.test, 0.2)):
            got = sum(1 for i in part if i.label is BinaryLabel.BIASED)
            assert abs(got - share * n_biased) <= 1

    def test_same_seed_same_split(self, holdout_lexicon):
        data = dataset_of(holdout_lexicon, n=30, rare_count=0)
        a = split_dataset(data, SplitConfig(seed=4))
        b = split_dataset(data, SplitConfig(seed=4))
        assert a.manifest() == b.manifest()
        c = split_dataset(data, SplitConfig(seed=5))
        assert a.manifest() != c.manifest()


class TestHoldout:
    def test_planted_rare_term_all_in_test(self, holdout_lexicon):
        data = dataset_of(holdout_lexicon, n=40, rare_count=3)
        splits = holdout_rare_terms(data, holdout_lexicon, threshold=3, seed=1)
        assert splits.regime is Regime.OUT_OF_DOMAIN
        assert splits.held_out_terms == ["zeldzaam"]
        assert len(splits.test) == 3
        # membership oracle: every test instance contains the rare term
        for inst in splits.test:
            assert "zeldza" in inst.text

    def test_no_leakage_into_train_or_val(self, holdout_lexicon):
        data = dataset_of(holdout_lexicon, n=60, rare_count=5)
        splits = holdout_rare_terms(data, holdout_lexicon, threshold=5, seed=1)
        held = set(splits.held_out_terms)
        sub = make_lexicon(
            [(t.surface, t.category.value, t.term_class.value, list(t.variants))
             for t in holdout_lexicon.terms if t.surface in held]
        )
        for inst in splits.train + splits.val:
            assert scan_term_hits(inst.text, sub) == {}

    def test_nothing_held_out_flag(self, holdout_lexicon):
        data = dataset_of(holdout_lexicon, n=40, rare_count=0)
        splits = holdout_rare_terms(data, holdout_lexicon, threshold=1, seed=1)
        assert splits.nothing_held_out
        assert splits.test == []
        assert splits.held_out_terms == []
        assert len(splits.train) + len(splits.val) == 40

    def test_train_val_renormalized(self, holdout_lexicon):
        data = dataset_of(holdout_lexicon, n=43, rare_count=3)
        splits = holdout_rare_terms(data, holdout_lexicon, threshold=3, seed=1)
        remaining = 40
        assert len(splits.val) == int(remaining * 0.25)
        assert len(splits.train) == remaining - len(splits.val)

    def test_mixed_test_mode(self, holdout_lexicon):
        data = dataset_of(holdout_lexicon, n=43, rare_count=3)
        splits = holdout_rare_terms(data, holdout_lexicon, threshold=3, seed=1, test_mode="mixed")
        assert len(splits.test) > 3
        held = set(splits.held_out_terms)
        sub = make_lexicon(
            [(t.surface, t.category.value, t.term_class.value, list(t.variants))
             for t in holdout_lexicon.terms if t.surface in held]
        )
        for inst in splits.train + splits.val:
            assert scan_term_hits(inst.text, sub) == {}


def label_counts(instances):
    return Counter(int(i.label) for i in instances)


def big_train(lexicon, n_biased=600, n_unbiased=1700):
    rng = random.Random(8)
    rows = [(f"{random_filler_sentence(rng, 5)} stroom {i}", 1) for i in range(n_biased)]
    rows += [(f"{random_filler_sentence(rng, 5)} islam {i}", 0) for i in range(n_unbiased)]
    return make_instances(lexicon, rows)


class TestResample:
    def test_round_half_up_against_decimal_oracle(self):
        rng = random.Random(3)
        for _ in range(300):
            ratio = round(rng.uniform(0, 1), 3)
            size = rng.randint(1, 5000)
            oracle = int(
                (Decimal(str(ratio)) * size).quantize(Decimal("1"), rounding=ROUND_HALF_UP)
            )
            assert round_half_up(ratio, size) == oracle

    def test_balanced_example(self, holdout_lexicon):
        train = big_train(holdout_lexicon, n_biased=10, n_unbiased=30)
        cfg = ResampleConfig(ResampleStrategy.BALANCED, 0.5, 20, seed=1)
        out = resample(train, cfg)
        assert label_counts(out) == {1: 10, 0: 10}

    def test_none_is_identity(self, holdout_lexicon):
        train = big_train(holdout_lexicon, n_biased=5, n_unbiased=10)
        cfg = ResampleConfig(ResampleStrategy.NONE, 0.5, 7, seed=1)
        assert resample(train, cfg) == list(train)

    def test_presets_produce_published_sizes(self, holdout_lexicon):
        train = big_train(holdout_lexicon)
        for name, (ratio, size) in RESAMPLE_PRESETS.items():
            out = resample(train, preset_config(name, seed=2))
            assert len(out) == size
            counts = label_counts(out)
            assert counts[1] == round_half_up(ratio, size)
        assert [RESAMPLE_PRESETS[k][1] for k in ("undersample", "oversample", "balanced")] == [
            1649, 2648, 2137,
        ]

    def test_undersample_is_submultiset(self, holdout_lexicon):
        train = big_train(holdout_lexicon, n_biased=40, n_unbiased=100)
        cfg = ResampleConfig(ResampleStrategy.UNDERSAMPLE, 0.4, 80, seed=5)
        out = resample(train, cfg)
        pool = Counter(i.item_id for i in train)
        got = Counter(i.item_id for i in out)
        assert all(got[k] <= pool[k] for k in got)

    def test_oversample_only_duplicates_never_invents(self, holdout_lexicon):
        train = big_train(holdout_lexicon, n_biased=10, n_unbiased=50)
        cfg = ResampleConfig(ResampleStrategy.OVERSAMPLE, 0.5, 80, seed=5)
        out = resample(train, cfg)
        assert set(i.item_id for i in out) <= set(i.item_id for i in train)
        # every distinct biased instance appears at least once
        biased_in = {i.item_id for i in train if i.label is BinaryLabel.BIASED}
        biased_out = {i.item_id for i in out if i.label is BinaryLabel.BIASED}
        assert biased_out == biased_in

    def test_infeasible_undersample(self, holdout_lexicon):
        train = big_train(holdout_lexicon, n_biased=5, n_unbiased=10)
        cfg = ResampleConfig(ResampleStrategy.UNDERSAMPLE, 0.9, 100, seed=1)
        with pytest.raises(InfeasibleTarget):
            resample(train, cfg)

    def test_infeasible_needs_both_classes(self, holdout_lexicon):
        rng = random.Random(1)
        train = make_instances(
            holdout_lexicon, [(f"{random_filler_sentence(rng, 4)} stroom", 1) for _ in range(10)]
        )
        with pytest.raises(InfeasibleTarget):
            resample(train, ResampleConfig(ResampleStrategy.UNDERSAMPLE, 0.5, 4, seed=1))

    def test_seed_determinism_and_variation(self, holdout_lexicon):
        train = big_train(holdout_lexicon, n_biased=50, n_unbiased=100)
        cfg = ResampleConfig(ResampleStrategy.UNDERSAMPLE, 0.4, 100, seed=11)
        a = resample(train, cfg)
        b = resample(train, cfg)
        assert [i.item_id for i in a] == [i.item_id for i in b]
        seen = set()
        for seed in range(10):
            cfg_s = ResampleConfig(ResampleStrategy.UNDERSAMPLE, 0.4, 100, seed=seed)
            seen.add(tuple(i.item_id for i in resample(train, cfg_s)))
        assert len(seen) > 1
