"""Entropy primitives and the depolarizing error vector.

All logarithms are base 2; entropies are in bits.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidDistribution, OutOfRange
from .qudit_algebra import Dim

ENTRY_SLACK = 1e-12
SUM_SLACK = 1e-9


def as_prob_vector(values) -> np.ndarray:
    """Validate a probability vector and return it as a float array.

    Entries may undershoot 0 or overshoot 1 by at most 1e-12 (they are
    clipped back); the total must be within 1e-9 of 1. The vector is not
    renormalized.
    """
    p = np.asarray(values, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise InvalidDistribution(f"expected a nonempty 1-d vector, got shape {p.shape}")
    if np.any(p < -ENTRY_SLACK) or np.any(p > 1.0 + ENTRY_SLACK):
        raise InvalidDistribution(f"entries outside [0, 1]: {p!r}")
    total = float(p.sum())
    if abs(total - 1.0) > SUM_SLACK:
        raise InvalidDistribution(f"probabilities sum to {total!r}, not 1")
    return np.clip(p, 0.0, 1.0)


def shannon_entropy(p) -> float:
    """H(p) = -sum_i p_i log2 p_i with the 0 log 0 = 0 convention."""
    v = as_prob_vector(p)
    nz = v[v > 0.0]
    return float(-(nz * np.log2(nz)).sum()) + 0.0  # avoid -0.0


def depolarizing_vector(dim: Dim, q: float) -> np.ndarray:
    """Error vector (1-Q, Q/(d-1), ..., Q/(d-1)) of a depolarizing channel.

    Q above (d-1)/d would put more weight on each wrong outcome than the
    right one, which is outside the regime treated here.
    """
    d = dim.d
    if not (-ENTRY_SLACK <= q <= (d - 1) / d + ENTRY_SLACK):
        raise OutOfRange(f"Q={q!r} outside [0, {(d - 1) / d}] for d={d}")
    q = min(max(q, 0.0), (d - 1) / d)
    vec = np.full(d, q / (d - 1))
    vec[0] = 1.0 - q
    return vec
