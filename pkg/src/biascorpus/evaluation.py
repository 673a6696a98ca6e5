"""Scoring predictions against gold labels.

Reports the confusion matrix with Biased as the positive class, four metric
variants (positive-class F1, macro F1, micro F1, accuracy), and per-term
accuracy over the instances each lexicon term occurs in. For binary
single-label classification micro-F1 pooled over both classes reduces to
accuracy; both are still reported separately so nothing rests on the
identity.
"""

from __future__ import annotations

import csv
import io as _io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from biascorpus.classifiers import Prediction
from biascorpus.dataset import BinaryLabel, LabeledInstance
from biascorpus.errors import Misaligned

REPORT_SCHEMA = 1


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
        )

    def to_json(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass
class F1Scores:
    f1_positive: float
    f1_macro: float
    f1_micro: float
    accuracy: float
    zero_support_positive: bool = False
    zero_support_negative: bool = False


def gold_labels(instances: Sequence[LabeledInstance]) -> dict[str, BinaryLabel]:
    return {i.item_id: i.label for i in instances}


def confusion(preds: Sequence[Prediction], gold: Mapping[str, BinaryLabel]) -> ConfusionMatrix:
    """Counts with Biased as the positive class; ids must align exactly."""
    pred_ids = [p.item_id for p in preds]
    if len(set(pred_ids)) != len(pred_ids):
        raise Misaligned("duplicate prediction ids")
    if set(pred_ids) != set(gold):
        missing = set(gold) - set(pred_ids)
        extra = set(pred_ids) - set(gold)
        raise Misaligned(f"id mismatch: {len(missing)} missing, {len(extra)} extra")
    tp = fp = fn = tn = 0
    for p in preds:
        actual = gold[p.item_id]
        if p.label is BinaryLabel.BIASED:
            if actual is BinaryLabel.BIASED:
                tp += 1
            else:
                fp += 1
        else:
            if actual is BinaryLabel.BIASED:
                fn += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def f1_scores(cm: ConfusionMatrix) -> F1Scores:
    """Positive/negative class F1, their macro mean, pooled micro F1, accuracy.

    Zero-denominator cases score 0 and set the matching zero-support flag.
    """
    if cm.total == 0:
        raise ValueError("empty confusion matrix")

    pos_denom = 2 * cm.tp + cm.fp + cm.fn
    neg_denom = 2 * cm.tn + cm.fn + cm.fp
    f1_pos = (2 * cm.tp / pos_denom) if pos_denom else 0.0
    f1_neg = (2 * cm.tn / neg_denom) if neg_denom else 0.0
    f1_macro = (f1_pos + f1_neg) / 2

    # pooled over both classes: TP' = tp + tn, FP' = FN' = fp + fn
    pooled_tp = cm.tp + cm.tn
    pooled_fp = cm.fp + cm.fn
    micro_denom = 2 * pooled_tp + 2 * pooled_fp
    f1_micro = (2 * pooled_tp / micro_denom) if micro_denom else 0.0
    accuracy = pooled_tp / cm.total

    return F1Scores(
        f1_positive=f1_pos,
        f1_macro=f1_macro,
        f1_micro=f1_micro,
        accuracy=accuracy,
        zero_support_positive=(cm.tp + cm.fn) == 0,
        zero_support_negative=(cm.tn + cm.fp) == 0,
    )


def per_term_accuracy(
    preds: Sequence[Prediction],
    gold: Mapping[str, BinaryLabel],
    instances: Sequence[LabeledInstance],
) -> dict[str, tuple[int, float]]:
    """term -> (n, accuracy) over test instances whose matches include the term.

    An instance with k distinct matched terms contributes to all k entries;
    terms matched nowhere are omitted.
    """
    by_id = {p.item_id: p for p in preds}
    if set(by_id) != set(gold):
        raise Misaligned("prediction and gold ids differ")
    tallies: dict[str, list[int]] = {}
    for inst in instances:
        if inst.item_id not in by_id:
            continue
        correct = by_id[inst.item_id].label is gold[inst.item_id]
        for surface in sorted({m.term.surface for m in inst.matches}):
            bucket = tallies.setdefault(surface, [0, 0])
            bucket[0] += 1
            bucket[1] += int(correct)
    return {t: (n, ok / n) for t, (n, ok) in tallies.items()}


@dataclass
class EvalReport:
    model_id: str
    regime: str
    strategy: str
    confusion: ConfusionMatrix
    f1_positive: float
    f1_macro: float
    f1_micro: float
    accuracy: float
    per_term: dict[str, tuple[int, float]] = field(default_factory=dict)
    abstain_count: int = 0
    zero_support_positive: bool = False
    zero_support_negative: bool = False

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "model_id": self.model_id,
            "regime": self.regime,
            "strategy": self.strategy,
            "confusion": self.confusion.to_json(),
            "f1_positive": self.f1_positive,
            "f1_macro": self.f1_macro,
            "f1_micro": self.f1_micro,
            "accuracy": self.accuracy,
            "per_term": {t: {"n": n, "accuracy": a} for t, (n, a) in sorted(self.per_term.items())},
            "abstain_count": self.abstain_count,
            "zero_support_positive": self.zero_support_positive,
            "zero_support_negative": self.zero_support_negative,
        }


def evaluate(
    preds: Sequence[Prediction],
    instances: Sequence[LabeledInstance],
    model_id: str | None = None,
    regime: str = "in_domain",
    strategy: str = "none",
    drop_abstained: bool = False,
) -> EvalReport:
    """Full report for one prediction run against its gold instances."""
    abstain_count = sum(1 for p in preds if p.abstained)
    scored = [p for p in preds if not (drop_abstained and p.abstained)]
    gold = gold_labels(instances)
    if drop_abstained:
        kept = {p.item_id for p in scored}
        gold = {k: v for k, v in gold.items() if k in kept}
    cm = confusion(scored, gold)
    scores = f1_scores(cm)
    per_term = per_term_accuracy(scored, gold, [i for i in instances if i.item_id in gold])
    return EvalReport(
        model_id=model_id or (preds[0].model_id if preds else "unknown"),
        regime=regime,
        strategy=strategy,
        confusion=cm,
        f1_positive=scores.f1_positive,
        f1_macro=scores.f1_macro,
        f1_micro=scores.f1_micro,
        accuracy=scores.accuracy,
        per_term=per_term,
        abstain_count=abstain_count,
        zero_support_positive=scores.zero_support_positive,
        zero_support_negative=scores.zero_support_negative,
    )


def build_report(
    runs: Sequence[tuple[str, str, str, Sequence[Prediction], Sequence[LabeledInstance]]],
    metric: str = "f1_positive",
    drop_abstained: bool = False,
) -> tuple[list[EvalReport], dict[str, tuple[str, str]]]:
    """Evaluate (model, regime, strategy, preds, gold) runs together.

    Returns the per-run reports plus two pivots, each as (aligned text, CSV):
    models x regimes and strategies x regimes. Per-run errors propagate.
    """
    reports = [
        evaluate(preds, instances, model_id=model, regime=regime, strategy=strategy,
                 drop_abstained=drop_abstained)
        for model, regime, strategy, preds, instances in runs
    ]
    tables = {
        "models_by_regime": comparison_table(reports, rows="model_id", metric=metric),
        "strategies_by_regime": comparison_table(reports, rows="strategy", metric=metric),
    }
    return reports, tables


def comparison_table(
    reports: Sequence[EvalReport], rows: str = "model_id", metric: str = "f1_positive"
) -> tuple[str, str]:
    """(fixed-width text, CSV) pivot of reports: rows x regime columns."""
    row_keys = sorted({getattr(r, rows) for r in reports})
    col_keys = sorted({r.regime for r in reports})
    cells: dict[tuple[str, str], str] = {}
    for r in reports:
        key = (getattr(r, rows), r.regime)
        cells[key] = f"{getattr(r, metric):.3f}"

    header = [rows] + col_keys
    table_rows = [[rk] + [cells.get((rk, ck), "-") for ck in col_keys] for rk in row_keys]

    widths = [max(len(str(row[i])) for row in [header] + table_rows) for i in range(len(header))]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in table_rows:
        lines.append("  ".join(str(c).ljust(w) for c, w in zip(row, widths)))
    text = "\n".join(lines)

    buf = _io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in table_rows:
        writer.writerow(row)
    return text, buf.getvalue()


def write_predictions_jsonl(path: str | Path, preds: Sequence[Prediction]) -> int:
    from biascorpus.io import write_jsonl

    return write_jsonl(path, (p.to_record() for p in preds))


def read_predictions_jsonl(path: str | Path) -> list[Prediction]:
    from biascorpus.io import read_jsonl

    return [Prediction.from_record(rec) for rec in read_jsonl(path)]
