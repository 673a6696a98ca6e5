"""Chance-corrected multi-rater agreement (Fleiss' kappa).

Input is an items x categories count matrix where every row sums to the
common rater count. kappa = (Pbar - Pe) / (1 - Pe), with Pbar the mean
per-item observed agreement and Pe the sum of squared category marginals.
When one category holds all the mass, Pe = 1 and kappa is undefined; the
report carries a degenerate flag instead of a value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from biascorpus.errors import RowSumMismatch


@dataclass
class AgreementReport:
    kappa: float | None
    n_items: int
    n_raters: int
    category_marginals: list[float]
    degenerate: bool = False
    label_space: str = "four_way"
    interpretation: str | None = None

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa,
            "n_items": self.n_items,
            "n_raters": self.n_raters,
            "category_marginals": self.category_marginals,
            "degenerate": self.degenerate,
            "label_space": self.label_space,
            "interpretation": self.interpretation,
        }


def fleiss_kappa(
    matrix: Sequence[Sequence[int]],
    n_raters: int,
    label_space: str = "four_way",
    interpretation: str | None = None,
) -> AgreementReport:
    """Fleiss' kappa over an items x categories count matrix."""
    if len(matrix) < 2:
        raise RowSumMismatch(f"need at least 2 items, got {len(matrix)}")
    if n_raters < 2:
        raise RowSumMismatch(f"need at least 2 raters, got {n_raters}")
    n_categories = len(matrix[0])
    for i, row in enumerate(matrix):
        if len(row) != n_categories:
            raise RowSumMismatch(f"row {i} has {len(row)} categories, expected {n_categories}")
        if sum(row) != n_raters:
            raise RowSumMismatch(f"row {i} sums to {sum(row)}, expected {n_raters}")

    n_items = len(matrix)
    totals = [0] * n_categories
    p_bar = 0.0
    for row in matrix:
        agree = (sum(c * c for c in row) - n_raters) / (n_raters * (n_raters - 1))
        p_bar += agree
        for j, c in enumerate(row):
            totals[j] += c
    p_bar /= n_items
    marginals = [t / (n_items * n_raters) for t in totals]
    p_e = sum(p * p for p in marginals)

    if abs(1.0 - p_e) < 1e-15:
        return AgreementReport(
            kappa=None,
            n_items=n_items,
            n_raters=n_raters,
            category_marginals=marginals,
            degenerate=True,
            label_space=label_space,
            interpretation=interpretation,
        )

    kappa = (p_bar - p_e) / (1.0 - p_e)
    return AgreementReport(
        kappa=kappa,
        n_items=n_items,
        n_raters=n_raters,
        category_marginals=marginals,
        label_space=label_space,
        interpretation=interpretation,
    )
