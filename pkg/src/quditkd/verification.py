"""Self-check suite for the operator algebra and the statistics maps.

Each check sweeps one identity over a dimension and reports the worst
deviation found. Enumeration is exhaustive up to FULL_ENUM_CAP and switches
to seeded sampling above it, so the suite stays fast for d up to ~20.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .channels import BellSpectrum, lambda_from_q, q_from_lambda
from .protocol import Family, ProtocolSpec
from .qudit_algebra import (
    Dim,
    WeylIndex,
    basis_for,
    bell_matrix,
    commutator_phase,
    weyl_operator,
)

FULL_ENUM_CAP = 7
SAMPLE_COUNT = 200
SAMPLE_SEED = 20260815

UNITARITY_TOL = 1e-12
COMMUTATION_TOL = 1e-12
ORTHONORMALITY_TOL = 1e-10
EIGENSTATE_TOL = 1e-10
MUB_TOL = 1e-10
ROUNDTRIP_TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    d: int
    passed: bool
    max_err: float

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.name:20s} d={self.d:<3d} {verdict}  max_err={self.max_err:.3e}"


def _all_indices(d: int) -> list[WeylIndex]:
    return [WeylIndex(j, k) for j in range(d) for k in range(d)]


def _index_pairs(d: int) -> list[tuple[WeylIndex, WeylIndex]]:
    idx = _all_indices(d)
    if d <= FULL_ENUM_CAP:
        return [(a, b) for a in idx for b in idx]
    rng = np.random.default_rng(SAMPLE_SEED + d)
    picks = rng.integers(0, d, size=(SAMPLE_COUNT, 4))
    return [(WeylIndex(int(r[0]), int(r[1])), WeylIndex(int(r[2]), int(r[3]))) for r in picks]


def check_unitarity(dim: Dim) -> CheckResult:
    eye = np.eye(dim.d)
    worst = 0.0
    for idx in _all_indices(dim.d):
        u = weyl_operator(dim, idx)
        worst = max(worst, float(np.abs(u.conj().T @ u - eye).max()))
    return CheckResult("unitarity", dim.d, worst <= UNITARITY_TOL, worst)


def check_commutation(dim: Dim) -> CheckResult:
    """U_a U_b must equal omega^phase U_b U_a with the closed-form phase."""
    omega = np.exp(2j * np.pi / dim.d)
    worst = 0.0
    for a, b in _index_pairs(dim.d):
        ua, ub = weyl_operator(dim, a), weyl_operator(dim, b)
        phase = omega ** commutator_phase(dim, a, b)
        worst = max(worst, float(np.abs(ua @ ub - phase * (ub @ ua)).max()))
    return CheckResult("commutation", dim.d, worst <= COMMUTATION_TOL, worst)


def check_bell_orthonormality(dim: Dim) -> CheckResult:
    d = dim.d
    vecs = np.stack([bell_matrix(dim, idx).ravel() for idx in _all_indices(d)])
    gram = vecs.conj() @ vecs.T
    worst = float(np.abs(gram - np.eye(d * d)).max())
    return CheckResult("bell_orthonormality", d, worst <= ORTHONORMALITY_TOL, worst)


def check_bell_eigenstates(dim: Dim) -> CheckResult:
    """Every Bell state is a phase eigenstate of U (x) U*.

    In amplitude-matrix form (A (x) B)|v_F> has matrix A F B^T, so the claim
    is U F U^dagger = c F with |c| = 1.
    """
    d = dim.d
    worst = 0.0
    for op_idx, state_idx in _index_pairs(d):
        u = weyl_operator(dim, op_idx)
        f = bell_matrix(dim, state_idx)
        rotated = u @ f @ u.conj().T
        anchor = np.unravel_index(np.abs(f).argmax(), f.shape)
        c = rotated[anchor] / f[anchor]
        worst = max(worst, abs(abs(c) - 1.0), float(np.abs(rotated - c * f).max()))
    return CheckResult("bell_eigenstate", d, worst <= EIGENSTATE_TOL, worst)


def check_mub_overlaps(dim: Dim) -> CheckResult:
    """All protocol-basis pairs are mutually unbiased.

    Prime d exercises the full (d+1)-basis set; composite d only has the
    two-basis pair.
    """
    d = dim.d
    family = Family.DPLUS1 if dim.prime else Family.TWO_BASIS
    spec = ProtocolSpec(family, dim)
    mats = [basis_for(dim, idx).vectors for idx in spec.basis_indices]
    worst = 0.0
    for i, e in enumerate(mats):
        for f in mats[i + 1 :]:
            overlaps = np.abs(e.conj().T @ f) ** 2
            worst = max(worst, float(np.abs(overlaps - 1.0 / d).max()))
    return CheckResult("mub_overlaps", d, worst <= MUB_TOL, worst)


def check_roundtrip(dim: Dim) -> CheckResult:
    """lambda -> q -> lambda is the identity on random spectra (prime d)."""
    d = dim.d
    spec = ProtocolSpec(Family.DPLUS1, dim)
    rng = np.random.default_rng(SAMPLE_SEED + 7 * d)
    worst = 0.0
    for _ in range(20):
        lam = BellSpectrum(rng.dirichlet(np.ones(d * d)).reshape(d, d))
        back = lambda_from_q(dim, q_from_lambda(spec, lam))
        worst = max(worst, float(np.abs(back.lam - lam.lam).max()))
    return CheckResult("lambda_q_roundtrip", d, worst <= ROUNDTRIP_TOL, worst)


def run_suite(dims: Iterable[int]) -> list[CheckResult]:
    """Run every applicable check for each dimension, in a stable order."""
    results: list[CheckResult] = []
    for d in dims:
        dim = Dim(d)
        results.append(check_unitarity(dim))
        results.append(check_commutation(dim))
        results.append(check_bell_orthonormality(dim))
        results.append(check_bell_eigenstates(dim))
        results.append(check_mub_overlaps(dim))
        if dim.prime:
            results.append(check_roundtrip(dim))
    return results
