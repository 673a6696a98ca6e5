"""Local explanation of single predictions by token-masking perturbation.

The sentence is tokenized, random token subsets are dropped, the classifier
scores every masked variant, and a proximity-weighted ridge regression from
mask features to scores yields one signed weight per token position
(positive pushes toward Biased). Standard local-surrogate recipe; everything
is seeded and deterministic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from html import escape
from typing import Callable, Sequence

import numpy as np

from biascorpus.lexicon import tokenize

RIDGE_DAMPING = 1e-3


@dataclass(frozen=True)
class ExplainConfig:
    n_samples: int = 1000
    kernel_width: float | None = None  # default 0.75 * sqrt(token_count)
    top_k: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_samples < 10:
            raise ValueError(f"n_samples must be >= 10, got {self.n_samples}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")


@dataclass
class Explanation:
    item_id: str
    token_weights: list[tuple[str, tuple[int, int], float]]
    intercept: float
    local_fit_r2: float
    degenerate: bool = False

    def to_json(self) -> dict:
        return {
            "item_id": self.item_id,
            "token_weights": [
                {"token": t, "span": list(span), "weight": w} for t, span, w in self.token_weights
            ],
            "intercept": self.intercept,
            "local_fit_r2": self.local_fit_r2,
            "degenerate": self.degenerate,
        }


def perturb_samples(n_tokens: int, n_samples: int, seed: int) -> list[tuple[int, ...]]:
    """Binary keep-masks; the first is all-ones (the unperturbed sentence).

    Each subsequent mask drops a uniformly chosen number of positions, then a
    uniform subset of that size.
    """
    if n_tokens < 1:
        raise ValueError("need at least one token")
    rng = random.Random(seed)
    masks: list[tuple[int, ...]] = [tuple([1] * n_tokens)]
    for _ in range(n_samples - 1):
        n_drop = rng.randint(0, n_tokens)
        dropped = set(rng.sample(range(n_tokens), n_drop))
        masks.append(tuple(0 if i in dropped else 1 for i in range(n_tokens)))
    return masks


def _masked_text(tokens: Sequence[tuple[str, int, int]], mask: Sequence[int]) -> str:
    return " ".join(tok for (tok, _s, _e), keep in zip(tokens, mask) if keep)


def _mask_distance(mask: Sequence[int]) -> float:
    """Cosine distance between the mask and the all-ones vector."""
    kept = sum(mask)
    if kept == 0:
        return 1.0
    return 1.0 - math.sqrt(kept / len(mask))


def explain_instance(
    item_id: str,
    text: str,
    scorer: Callable[[Sequence[str]], Sequence[float]] | Callable[[str], float],
    config: ExplainConfig | None = None,
) -> Explanation:
    """Fit a weighted linear surrogate over token-mask perturbations.

    ``scorer`` either scores a list of texts at once or a single text; it
    must return real scores. Returns the top_k tokens by absolute weight.
    A classifier that is constant over all samples yields all-zero weights
    with the degenerate flag set.
    """
    config = config or ExplainConfig()
    tokens = tokenize(text)
    if not tokens:
        return Explanation(item_id=item_id, token_weights=[], intercept=0.0, local_fit_r2=0.0, degenerate=True)

    masks = perturb_samples(len(tokens), config.n_samples, config.seed)
    texts = [_masked_text(tokens, m) for m in masks]
    scores = _score_texts(scorer, texts)
    y = np.asarray(scores, dtype=float)
    if y.shape != (len(masks),):
        raise ValueError("scorer returned the wrong number of scores")

    kernel_width = config.kernel_width
    if kernel_width is None:
        kernel_width = 0.75 * math.sqrt(len(tokens))
    distances = np.array([_mask_distance(m) for m in masks])
    weights = np.exp(-(distances**2) / (kernel_width**2))

    if float(np.ptp(y)) == 0.0:
        token_weights = [(tok, (s, e), 0.0) for tok, s, e in tokens][: config.top_k]
        return Explanation(
            item_id=item_id,
            token_weights=token_weights,
            intercept=float(y[0]),
            local_fit_r2=0.0,
            degenerate=True,
        )

    # weighted ridge via normal equations; intercept column is damped too,
    # which is negligible at 1e-3
    X = np.hstack([np.asarray(masks, dtype=float), np.ones((len(masks), 1))])
    W = weights[:, None]
    A = X.T @ (W * X) + RIDGE_DAMPING * np.eye(X.shape[1])
    b = X.T @ (weights * y)
    beta = np.linalg.solve(A, b)
    coef, intercept = beta[:-1], float(beta[-1])

    fitted = X @ beta
    total = float(np.sum(weights * (y - np.average(y, weights=weights)) ** 2))
    residual = float(np.sum(weights * (y - fitted) ** 2))
    r2 = 1.0 - residual / total if total > 0 else 0.0

    order = sorted(range(len(tokens)), key=lambda i: (-abs(coef[i]), i))[: config.top_k]
    token_weights = [(tokens[i][0], (tokens[i][1], tokens[i][2]), float(coef[i])) for i in sorted(order)]
    token_weights.sort(key=lambda tw: -abs(tw[2]))
    return Explanation(
        item_id=item_id,
        token_weights=token_weights,
        intercept=intercept,
        local_fit_r2=r2,
    )


def _score_texts(scorer, texts: list[str]) -> list[float]:
    try:
        result = scorer(texts)
        if isinstance(result, (int, float)):
            raise TypeError("scalar result means a single-text scorer")
        return [float(v) for v in result]
    except (TypeError, AttributeError):
        return [float(scorer(t)) for t in texts]


def render_html(text: str, explanation: Explanation) -> str:
    """Self-contained HTML: tokens colored by weight sign and magnitude."""
    by_span = {tuple(span): w for _tok, span, w in explanation.token_weights}
    max_abs = max((abs(w) for w in by_span.values()), default=0.0) or 1.0
    pieces: list[str] = []
    cursor = 0
    for tok, s, e in tokenize(text):
        pieces.append(escape(text[cursor:s]))
        w = by_span.get((s, e))
        if w is None or w == 0.0:
            pieces.append(escape(tok))
        else:
            hue = 210 if w > 0 else 10  # blue pushes Biased, red pushes NotBiased
            alpha = min(abs(w) / max_abs, 1.0)
            pieces.append(
                f'<span title="{w:+.4f}" style="background:hsla({hue},80%,50%,{alpha:.2f});'
                f'padding:1px 2px;border-radius:3px">{escape(tok)}</span>'
            )
        cursor = e
    pieces.append(escape(text[cursor:]))
    body = "".join(pieces)
    rows = "".join(
        f"<tr><td>{escape(tok)}</td><td>{span[0]}:{span[1]}</td><td>{w:+.4f}</td></tr>"
        for tok, span, w in explanation.token_weights
    )
    flag = "<p><em>classifier constant over all perturbations; weights are zero</em></p>" if explanation.degenerate else ""
    return f"""<!doctype html>
<html><head><meta charset="utf-8"><title>explanation {escape(explanation.item_id)}</title>
<style>body{{font-family:sans-serif;max-width:46rem;margin:2rem auto;line-height:1.8}}
table{{border-collapse:collapse}}td,th{{border:1px solid #ccc;padding:2px 8px;font-size:.9rem}}</style>
</head><body>
<h2>Explanation for item {escape(explanation.item_id)}</h2>
<p>{body}</p>{flag}
<p>intercept {explanation.intercept:+.4f}, local fit R&#178; {explanation.local_fit_r2:.3f}</p>
<table><tr><th>token</th><th>span</th><th>weight</th></tr>{rows}</table>
</body></html>
"""
