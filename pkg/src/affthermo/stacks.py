"""Vectorized helpers on stacks of 2x2 matrices, shape (m, 2, 2).

Level-by-level product expansion drives both the pressure sums and the
joint spectral radius bounds, so these run on whole levels at once.
"""

from __future__ import annotations

from typing import Iterator, Optional, Tuple

import numpy as np


def operator_norms(stack: np.ndarray) -> np.ndarray:
    """Largest singular value of each matrix in the stack (closed form)."""
    t = np.einsum("nij,nij->n", stack, stack)
    det = stack[:, 0, 0] * stack[:, 1, 1] - stack[:, 0, 1] * stack[:, 1, 0]
    disc = np.maximum(t * t - 4.0 * det * det, 0.0)
    lam1 = 0.5 * (t + np.sqrt(disc))
    return np.sqrt(np.maximum(lam1, 0.0))


def singular_value_pairs(stack: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    alpha1 = operator_norms(stack)
    det = stack[:, 0, 0] * stack[:, 1, 1] - stack[:, 0, 1] * stack[:, 1, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha2 = np.where(alpha1 > 0.0, np.abs(det) / np.where(alpha1 > 0, alpha1, 1.0), 0.0)
    return alpha1, np.minimum(alpha2, alpha1)


def spectral_radii(stack: np.ndarray) -> np.ndarray:
    tr = stack[:, 0, 0] + stack[:, 1, 1]
    det = stack[:, 0, 0] * stack[:, 1, 1] - stack[:, 0, 1] * stack[:, 1, 0]
    disc = tr * tr - 4.0 * det
    real = disc >= 0.0
    sq = np.sqrt(np.maximum(disc, 0.0))
    real_radius = np.maximum(np.abs(0.5 * (tr + sq)), np.abs(0.5 * (tr - sq)))
    complex_radius = np.sqrt(np.maximum(det, 0.0))
    return np.where(real, real_radius, complex_radius)


def phi_values(stack: np.ndarray, s: float) -> np.ndarray:
    """Singular value function applied to every matrix in the stack."""
    if s == 0.0:
        return np.ones(len(stack))
    alpha1, alpha2 = singular_value_pairs(stack)
    if s <= 1.0:
        return alpha1**s
    if s <= 2.0:
        out = np.zeros(len(stack))
        pos = alpha2 > 0.0
        out[pos] = alpha1[pos] * alpha2[pos] ** (s - 1.0)
        return out
    det = stack[:, 0, 0] * stack[:, 1, 1] - stack[:, 0, 1] * stack[:, 1, 0]
    return np.abs(det) ** (s / 2.0)


def expand_level(prods: np.ndarray, letters: np.ndarray) -> np.ndarray:
    """All one-letter extensions: (m,2,2) x (L,2,2) -> (m*L,2,2).

    Extension multiplies on the right, matching word concatenation."""
    out = np.einsum("mij,ljk->mlik", prods, letters)
    return out.reshape(-1, 2, 2)


def iter_product_levels(
    letters: np.ndarray,
    n: int,
    prune_below: Optional[float] = None,
    budget: Optional[int] = None,
) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield (depth, products) for depth = 1..n, optionally pruning rows
    whose operator norm falls below prune_below * (max letter norm)^depth."""
    max_norm = float(np.max(operator_norms(letters))) if len(letters) else 0.0
    prods = letters.copy()
    total = 0
    for depth in range(1, n + 1):
        if depth > 1:
            prods = expand_level(prods, letters)
        if prune_below is not None and len(prods):
            keep = operator_norms(prods) > prune_below * max(max_norm, 1e-300) ** depth
            prods = prods[keep]
        total += len(prods)
        if budget is not None and total > budget:
            from .errors import BudgetExceeded

            raise BudgetExceeded(
                f"level products exceeded node budget {budget}",
                nodes=total,
                budget=budget,
            )
        yield depth, prods
        if len(prods) == 0:
            return
