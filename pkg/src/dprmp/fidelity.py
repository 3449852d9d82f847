"""Basis dependence of the pseudo-photon source and the phase-error penalty."""
import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

from .core_math import s_k

DEGENERATE_DENOMINATOR = 1e-300


class DegenerateFidelityError(ArithmeticError):
    """|S_k(mu) S_k(2 mu)| underflowed: mu is too small for this k at this D."""


@dataclass(frozen=True)
class FidelityReport:
    k: int
    per_theta: list
    overall: float


class Balance(NamedTuple):
    delta: float
    raw: float
    clamped: bool


def alignment_angles(cfg):
    """The D/2 alignment angles 2*pi*n/D, n = 0 .. D/2 - 1."""
    return [2 * math.pi * n / cfg.D for n in range(cfg.D // 2)]


def fidelity_theta(mu, k, theta, cfg):
    """Lower bound on the Z/X_theta fidelity for pseudo-photon pair (k, k), clamped to [0, 1]."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    s_mu = s_k(mu, k, cfg)
    denom = abs(s_mu * s_k(2 * mu, k, cfg))
    if denom < DEGENERATE_DENOMINATOR:
        raise DegenerateFidelityError(f"|S_k(mu) S_k(2mu)| = {denom:.3g} at mu={mu}, k={k}, D={cfg.D}")
    rot = cmath.exp(1j * theta)
    num = abs(2 * rot * s_mu + s_k(mu * rot, k, cfg) - s_k(-mu * rot, k, cfg)) ** 2
    return min(max(num / (8 * denom), 0.0), 1.0)


def fidelity_overall(mu, k, cfg):
    """Average of :func:`fidelity_theta` over uniformly chosen alignment angles."""
    weight = 2 / cfg.D
    per_theta = [(theta, fidelity_theta(mu, k, theta, cfg)) for theta in alignment_angles(cfg)]
    overall = sum(weight * f for _, f in per_theta)
    return FidelityReport(k=k, per_theta=per_theta, overall=min(overall, 1.0))


def delta_balance(F_overall, Y_kk):
    """Basis-imbalance parameter (1 - F) / (2 Y), clamped to [0, 1/2].

    ``clamped`` is set when the raw value exceeded 1/2; callers treat that
    as "no key".
    """
    if not Y_kk > 0:
        raise ValueError(f"yield must be positive, got {Y_kk}")
    raw = (1 - F_overall) / (2 * Y_kk)
    delta = min(max(raw, 0.0), 0.5)
    return Balance(delta, raw, raw > 0.5)


def phase_error_bound(e_bit, delta):
    """Upper bound on the phase error rate given the X-basis bit error and imbalance."""
    d = delta * (1 - delta)
    bound = e_bit + 4 * d * (1 - 2 * e_bit) + 4 * (1 - 2 * delta) * math.sqrt(d * e_bit * (1 - e_bit))
    return min(bound, 1.0)
