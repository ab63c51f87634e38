"""Weyl operators, generalized Bell states, and protocol measurement bases.

Conventions used throughout the package:

* omega = exp(2*pi*i/d) is the principal d-th root of unity.
* U_{jk} = sum_s omega^{s k} |s+j><s|  (indices mod d), so U_{01} is the
  clock operator and U_{10} the cyclic shift.
* |Phi_{jk}> = (1 x U_{jk}) |Phi_00> with |Phi_00> the normalized maximally
  entangled state; amplitudes are stored row-major, index a*d + b for |a>|b>.
* Measurement outcome `a` in the eigenbasis of U_{jk} labels the eigenvector
  with eigenvalue g * omega^a, where g is a fixed global phase (g != 1 only
  when k*(d-1) is odd, e.g. d=2, k=1) chosen so the residual spectrum is
  exactly {omega^a}. Eigenvectors are normalized with their first nonzero
  amplitude real positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


def is_prime(n: int) -> bool:
    """Trial-division primality test; dimensions here are small."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Dim:
    """Qudit dimension with cached primality."""

    d: int
    prime: bool = field(init=False)

    def __post_init__(self) -> None:
        if not isinstance(self.d, int) or self.d < 2:
            raise ValueError(f"qudit dimension must be an integer >= 2, got {self.d!r}")
        object.__setattr__(self, "prime", is_prime(self.d))


class WeylIndex(NamedTuple):
    """Displacement index (j, k) of a Weyl operator: j shifts, k phases."""

    j: int
    k: int


def _check_index(dim: Dim, idx: WeylIndex) -> WeylIndex:
    j, k = idx
    if not (0 <= j < dim.d and 0 <= k < dim.d):
        raise ValueError(f"Weyl index {idx} out of range for d={dim.d}")
    return WeylIndex(j, k)


def _omega_pow(d: int, exponents: np.ndarray) -> np.ndarray:
    """omega^e elementwise, with the exponent reduced mod d first so large
    integer exponents do not lose precision in the complex exponential."""
    e = np.asarray(exponents, dtype=np.int64) % d
    return np.exp(2j * np.pi * e / d)


def weyl_operator(dim: Dim, idx: WeylIndex) -> np.ndarray:
    """Matrix of U_{jk} = sum_s omega^{sk} |s+j><s| as a (d, d) complex array."""
    j, k = _check_index(dim, idx)
    d = dim.d
    s = np.arange(d)
    u = np.zeros((d, d), dtype=np.complex128)
    u[(s + j) % d, s] = _omega_pow(d, s * k)
    return u


def commutator_phase(dim: Dim, a: WeylIndex, b: WeylIndex) -> int:
    """Exponent c with U_a U_b = omega^c U_b U_a, namely (a.k*b.j - a.j*b.k) mod d."""
    a = _check_index(dim, a)
    b = _check_index(dim, b)
    return (a.k * b.j - a.j * b.k) % dim.d


def bell_matrix(dim: Dim, idx: WeylIndex) -> np.ndarray:
    """|Phi_{jk}> reshaped to (d, d): entry [a, b] is the amplitude of |a>|b>."""
    j, k = _check_index(dim, idx)
    d = dim.d
    s = np.arange(d)
    f = np.zeros((d, d), dtype=np.complex128)
    f[s, (s + j) % d] = _omega_pow(d, s * k) / np.sqrt(d)
    return f


def bell_state(dim: Dim, idx: WeylIndex) -> np.ndarray:
    """Normalized generalized Bell state as a flat (d*d,) vector."""
    return bell_matrix(dim, idx).reshape(-1)


@dataclass(frozen=True)
class Basis:
    """Orthonormal measurement basis.

    `vectors` holds one eigenvector per column; column a carries outcome
    label a. `conjugated` marks the receiver-side (entrywise conjugated)
    copy of a sender basis.
    """

    label: WeylIndex
    vectors: np.ndarray
    conjugated: bool = False

    @property
    def d(self) -> int:
        return self.vectors.shape[0]

    @property
    def outcome_labels(self) -> tuple[int, ...]:
        return tuple(range(self.d))


def _shift_family_phase(d: int, k: int) -> complex:
    """Global phase g with spectrum(U_{1k}) = g * {omega^a}.

    (U_{1k})^d = omega^{k d(d-1)/2} * 1, which is 1 unless k*(d-1) is odd
    (only possible for even d). In that case the spectrum sits on the
    half-step grid and g = exp(i*pi*k*(d-1)/d) absorbs the offset.
    """
    if (k * (d - 1)) % 2 == 0:
        return 1.0 + 0.0j
    return complex(np.exp(1j * np.pi * k * (d - 1) / d))


def basis_for(dim: Dim, idx: WeylIndex) -> Basis:
    """Closed-form eigenbasis of a protocol operator U_{01} or U_{1k}.

    The clock eigenbasis is the computational basis. For U_{1k} the
    eigenvector with label a has amplitudes

        v_a[s] = omega^{k s(s-1)/2 - a s} * conj(g)^s / sqrt(d),

    which satisfies U_{1k} v_a = g omega^a v_a; the quadratic phase comes
    from unrolling the one-step recursion v[s] = omega^{(s-1)k} v[s-1] / mu.
    No generic eigensolver is involved.
    """
    j, k = _check_index(dim, idx)
    d = dim.d
    if (j, k) == (0, 1):
        return Basis(WeylIndex(0, 1), np.eye(d, dtype=np.complex128))
    if j != 1:
        raise ValueError(
            f"no closed-form labeled eigenbasis for U_{{{j}{k}}}; "
            "protocol bases are U_01 and the U_1k family"
        )
    s = np.arange(d)
    a = np.arange(d)
    expo = k * (s * (s - 1) // 2)[:, None] - s[:, None] * a[None, :]
    vectors = _omega_pow(d, expo) / np.sqrt(d)
    g = _shift_family_phase(d, k)
    if g != 1.0:
        vectors = vectors * (np.conj(g) ** s)[:, None]
    return Basis(WeylIndex(1, k), vectors)


def basis_eigenvalues(dim: Dim, idx: WeylIndex) -> np.ndarray:
    """Eigenvalues g * omega^a of the protocol operator, ordered by label a."""
    j, k = _check_index(dim, idx)
    d = dim.d
    if (j, k) == (0, 1):
        return _omega_pow(d, np.arange(d))
    if j != 1:
        raise ValueError(f"U_{{{j}{k}}} is not a protocol operator")
    return _shift_family_phase(d, k) * _omega_pow(d, np.arange(d))


def conjugate_basis(basis: Basis) -> Basis:
    """Receiver-side partner basis: entrywise conjugate, same outcome labels.

    Column b is then the eigenvector of conj(U) with eigenvalue
    conj(g) omega^{-b}, which makes measuring |Phi_00> in the pair
    (basis, conjugate_basis(basis)) give a = b with probability 1.
    """
    return Basis(basis.label, np.conj(basis.vectors), conjugated=not basis.conjugated)
