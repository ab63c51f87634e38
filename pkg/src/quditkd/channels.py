"""Maps between Bell-diagonal spectra and per-basis error vectors.

A Bell-diagonal state is described by weights lam[j, k] on the generalized
Bell basis. Measuring both halves in a protocol basis gives a distribution
over the outcome difference t = (a - b) mod d; the vector q^(t) of those
probabilities is the error vector of that basis. For the protocol bases the
map is linear:

    q_01^(t)  = sum_k lam[t, k]
    q_1kb^(t) = sum_j lam[j, (kb*j - t) mod d]      (kb = 0..d-1)

and for prime d the stacked system inverts entrywise:

    lam[j, k] = (sum_s q_1s^((s*j - k) mod d) + q_01^(j) - 1) / d.

The U_1k map with k != 0 sums every row over a distinct line only when d is
prime, hence the primality gates below.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    IncompleteStatistics,
    InvalidDistribution,
    NegativeSpectrum,
    NonPrimeDimension,
    OutOfRange,
)
from .info_theory import ENTRY_SLACK, SUM_SLACK, as_prob_vector
from .protocol import ProtocolSpec
from .qudit_algebra import Dim, WeylIndex


@dataclass(frozen=True)
class ErrorVector:
    """Outcome-difference distribution observed in one protocol basis."""

    basis: WeylIndex
    q: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", as_prob_vector(self.q))

    @property
    def d(self) -> int:
        return self.q.size


@dataclass(frozen=True)
class BellSpectrum:
    """Weights lam[j, k] of a Bell-diagonal state."""

    lam: np.ndarray

    def __post_init__(self) -> None:
        lam = np.asarray(self.lam, dtype=np.float64)
        if lam.ndim != 2 or lam.shape[0] != lam.shape[1]:
            raise InvalidDistribution(f"spectrum must be a square matrix, got {lam.shape}")
        if np.any(lam < -ENTRY_SLACK):
            raise NegativeSpectrum(f"spectrum entries below -{ENTRY_SLACK}: min={lam.min()!r}")
        lam = np.clip(lam, 0.0, None)
        total = float(lam.sum())
        if abs(total - 1.0) > SUM_SLACK:
            raise InvalidDistribution(f"spectrum sums to {total!r}, not 1")
        object.__setattr__(self, "lam", lam)

    @property
    def d(self) -> int:
        return self.lam.shape[0]


def _q_for_basis(lam: np.ndarray, idx: WeylIndex) -> np.ndarray:
    d = lam.shape[0]
    j, k = idx
    if (j, k) == (0, 1):
        return lam.sum(axis=1)
    if j == 1:
        rows = np.arange(d)
        return np.array([lam[rows, (k * rows - t) % d].sum() for t in range(d)])
    raise ValueError(f"U_{{{j}{k}}} is not a protocol basis")


def q_from_lambda(spec: ProtocolSpec, spectrum: BellSpectrum) -> list[ErrorVector]:
    """Error vectors for every basis of `spec`, in protocol order."""
    d = spec.dim.d
    if spectrum.d != d:
        raise InvalidDistribution(f"spectrum is {spectrum.d}-dimensional, protocol wants {d}")
    return [ErrorVector(idx, _q_for_basis(spectrum.lam, idx)) for idx in spec.basis_indices]


@lru_cache(maxsize=None)
def _reconstruction_index(d: int) -> np.ndarray:
    """idx[s, j, k] = (s*j - k) mod d, cached per dimension."""
    s = np.arange(d)
    return (s[:, None, None] * s[None, :, None] - s[None, None, :]) % d


def lambda_entries_from_q(q01: np.ndarray, q1: np.ndarray) -> np.ndarray:
    """Raw inverse map; q1 stacks the U_1s vectors as rows, s = 0..d-1.

    Returns the unvalidated lam matrix; callers decide how to treat
    negative entries.
    """
    d = q01.size
    idx = _reconstruction_index(d)
    s_grid = np.arange(d)[:, None, None]
    gathered = q1[np.broadcast_to(s_grid, idx.shape), idx].sum(axis=0)
    return (gathered + q01[:, None] - 1.0) / d


NEGATIVE_TOL = 1e-9


def lambda_from_q(dim: Dim, qs: list[ErrorVector]) -> BellSpectrum:
    """Reconstruct the Bell spectrum from all d+1 basis error vectors.

    Requires prime d and exactly the bases (0,1) and (1,s) for s = 0..d-1.
    Entries more negative than -1e-9 mean the vectors are mutually
    inconsistent and raise NegativeSpectrum; tiny negatives are clamped.
    """
    d = dim.d
    if not dim.prime:
        raise NonPrimeDimension(f"spectrum reconstruction needs prime d, got {d}")
    by_basis: dict[WeylIndex, np.ndarray] = {}
    for ev in qs:
        if ev.d != d:
            raise IncompleteStatistics(f"error vector for {ev.basis} has length {ev.d}, want {d}")
        if ev.basis in by_basis:
            raise IncompleteStatistics(f"duplicate error vector for basis {ev.basis}")
        by_basis[WeylIndex(*ev.basis)] = ev.q
    wanted = [WeylIndex(0, 1)] + [WeylIndex(1, s) for s in range(d)]
    missing = [idx for idx in wanted if idx not in by_basis]
    if missing or len(by_basis) != len(wanted):
        raise IncompleteStatistics(
            f"need exactly bases {wanted}, missing {missing}, got {sorted(by_basis)}"
        )
    q01 = by_basis[WeylIndex(0, 1)]
    q1 = np.stack([by_basis[WeylIndex(1, s)] for s in range(d)])
    lam = lambda_entries_from_q(q01, q1)
    if np.any(lam < -NEGATIVE_TOL):
        raise NegativeSpectrum(
            f"inconsistent statistics: reconstructed weight {lam.min()!r} below -{NEGATIVE_TOL}"
        )
    return BellSpectrum(np.clip(lam, 0.0, None))


def depolarizing_spectrum(dim: Dim, q: float) -> BellSpectrum:
    """Bell spectrum of the depolarizing channel at error rate Q.

    lam[0,0] = 1 - (d+1)Q/d and every other weight is Q/(d(d-1)); lam[0,0]
    stays nonnegative for Q up to d/(d+1).
    """
    d = dim.d
    if not (-ENTRY_SLACK <= q <= d / (d + 1) + ENTRY_SLACK):
        raise OutOfRange(f"Q={q!r} outside [0, {d / (d + 1)}] for d={d}")
    q = min(max(q, 0.0), d / (d + 1))
    lam = np.full((d, d), q / (d * (d - 1)))
    lam[0, 0] = 1.0 - (d + 1) * q / d
    return BellSpectrum(lam)
