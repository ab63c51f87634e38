"""Asymptotic secret-key rates and critical noise thresholds.

The rate against collective attacks on a depolarizing channel with error
rate Q is

    r_inf = log2(d) - H(q_key) - I_E(Q),

where H(q_key) is the error-correction cost in the key basis and I_E the
eavesdropper information. For the (d+1)-basis family the observed
statistics fix the whole Bell spectrum, so I_E is the Holevo quantity
H(lam) - H(q_01); for the two-basis family the spectrum is only partially
constrained and maximizing over the compatible set gives I_E = H(q_10)
(rows proportional to q_10 are feasible and Jensen's inequality makes them
optimal, see the grid oracle in the tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channels import BellSpectrum, depolarizing_spectrum
from .errors import NoRoot, OutOfRange
from .info_theory import depolarizing_vector, shannon_entropy
from .protocol import Family, ProtocolSpec

BISECTION_TOL = 1e-9  # interval width; spec'd accuracy is 1e-6
BISECTION_MAX_ITER = 200


@dataclass(frozen=True)
class RateReport:
    q: float
    i_e: float
    h_ab: float
    r_inf: float  # floored at 0
    r_inf_raw: float


def holevo_general(spec: ProtocolSpec, spectrum: BellSpectrum) -> float:
    """chi = H(lam) - H(q_01) for an arbitrary Bell-diagonal state.

    The key-basis error vector is the row marginal of the spectrum, so the
    difference is a conditional entropy and never negative; tiny float
    undershoot is clamped.
    """
    if spectrum.d != spec.dim.d:
        raise OutOfRange(f"spectrum is {spectrum.d}-dimensional, protocol wants {spec.dim.d}")
    h_lam = shannon_entropy(spectrum.lam.reshape(-1))
    h_q01 = shannon_entropy(spectrum.lam.sum(axis=1))
    return max(h_lam - h_q01, 0.0)


def ie_two_basis(q01, q10) -> float:
    """Maximum eavesdropper information compatible with two-basis statistics.

    Equals the Shannon entropy of the check-basis error vector; q01 only
    enters through feasibility and is validated but not used numerically.
    """
    shannon_entropy(getattr(q01, "q", q01))
    return shannon_entropy(getattr(q10, "q", q10))


def ie_depolarizing(spec: ProtocolSpec, q: float) -> float:
    """Closed-form I_E(Q) on the depolarizing channel for either family."""
    d = spec.dim.d
    if spec.family is Family.TWO_BASIS:
        # identical to the entropy of the check-basis error vector
        return shannon_entropy(depolarizing_vector(spec.dim, q))
    if not (0.0 <= q <= d / (d + 1) + 1e-12):
        raise OutOfRange(f"Q={q!r} outside [0, {d / (d + 1)}] for d={d}")
    if q == 0.0:
        return 0.0
    lam00 = 1.0 - (d + 1) * q / d
    log_1mq = math.log2(1.0 - q)
    total = -q * math.log2(1.0 / d)
    if lam00 > 0.0:
        total -= lam00 * (math.log2(lam00) - log_1mq)
    total -= (q / d) * (math.log2(q / (d * d - d)) - log_1mq)
    return total


def r_infinity(spec: ProtocolSpec, q: float) -> RateReport:
    """Asymptotic rate report at depolarizing error rate Q."""
    i_e = ie_depolarizing(spec, q)
    h_ab = shannon_entropy(depolarizing_vector(spec.dim, q))
    raw = math.log2(spec.dim.d) - h_ab - i_e
    return RateReport(q=q, i_e=i_e, h_ab=h_ab, r_inf=max(raw, 0.0), r_inf_raw=raw)


def critical_q(spec: ProtocolSpec) -> float:
    """Largest depolarizing error rate with positive asymptotic rate.

    Plain bisection on the raw rate over (0, (d-1)/d); the rate is strictly
    decreasing in Q so the bracket is sound.
    """
    d = spec.dim.d
    lo, hi = 1e-6, (d - 1) / d - 1e-6
    f_lo = r_infinity(spec, lo).r_inf_raw
    f_hi = r_infinity(spec, hi).r_inf_raw
    if f_lo <= 0.0 or f_hi >= 0.0:
        raise NoRoot(f"no sign change on [{lo}, {hi}] for {spec.family.value}, d={d}")
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if r_infinity(spec, mid).r_inf_raw > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < BISECTION_TOL:
            break
    return 0.5 * (lo + hi)
