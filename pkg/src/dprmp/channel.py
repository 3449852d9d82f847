"""Analytic model of the symmetric lossy channel and the pairing/sifting statistics.

Round settings are 2-bit vectors z = [z_a, z_b] with z in {0, 1} selecting
vacuum or intensity mu for Alice and Bob. A signal pair has z_i XOR z_j = 11;
the error configurations are [00, 11] and [11, 00].
"""
import math
from dataclasses import dataclass, fields

from .core_math import expected_photon_number, pseudo_photon_prob, deviation_mu_one

# [z_i, z_j] combinations with z_i XOR z_j = 11, as (z_i^a + z_i^b, z_j^a + z_j^b) photon loads
SIGNAL_CONFIGS = (((0, 0), (1, 1)), ((0, 1), (1, 0)), ((1, 0), (0, 1)), ((1, 1), (0, 0)))
ERROR_CONFIGS = (((0, 0), (1, 1)), ((1, 1), (0, 0)))
VACUUM_ERROR_RATE = 0.5


@dataclass(frozen=True)
class ChannelParams:
    """Detector and fiber parameters; defaults are the standard simulation values."""

    p_d: float = 1.2e-8
    eta_d: float = 0.2
    e_d: float = 0.04
    f: float = 1.15
    alpha_db: float = 0.2
    L_km: float = 0.0

    def __post_init__(self):
        if not 0 <= self.p_d < 1e-3:
            raise ValueError(f"p_d must lie in [0, 1e-3), got {self.p_d}")
        if not 0 < self.eta_d <= 1:
            raise ValueError(f"eta_d must lie in (0, 1], got {self.eta_d}")
        if not 0 <= self.e_d < 0.5:
            raise ValueError(f"e_d must lie in [0, 0.5), got {self.e_d}")
        if not self.f >= 1:
            raise ValueError(f"f must be >= 1, got {self.f}")
        if not self.alpha_db > 0:
            raise ValueError(f"alpha_db must be positive, got {self.alpha_db}")
        if not (self.L_km >= 0 and math.isfinite(self.L_km)):
            raise ValueError(f"L_km must be finite and >= 0, got {self.L_km}")

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class LinkBudget:
    eta_s: float


def link_budget(ch):
    """Single-arm transmittance (detector efficiency included), L/2 of fiber per arm."""
    return LinkBudget(ch.eta_d * 10 ** (-ch.alpha_db * (ch.L_km / 2) / 10))


def click_prob_given_intensity(z_a, z_b, mu, lb, ch):
    """Pr(C = 1 | z): exactly one detector fires."""
    return 1 - (1 - 2 * ch.p_d) * math.exp(-lb.eta_s * mu * (z_a + z_b))


def _click_table(mu, lb, ch):
    # indexed by the number of non-vacuum pulses in the round
    return [click_prob_given_intensity(n, 0, mu, lb, ch) for n in range(3)]


def mean_click_prob(mu, lb, ch):
    c = _click_table(mu, lb, ch)
    return (c[0] + 2 * c[1] + c[2]) / 4


def click_prob_given_pseudo_photons(k_a, k_b, mu, lb, ch, cfg):
    """Pr(C = 1 | k) with the (real-valued) mean photon numbers of the two pseudo states."""
    n = expected_photon_number(mu, k_a, cfg) + expected_photon_number(mu, k_b, cfg)
    return 1 - (1 - 2 * ch.p_d) * (1 - lb.eta_s) ** n


def pairing_rate(p, l):
    """Mean pairs per round for click probability p and maximal pairing interval l.

    Equal to [1/(p s) + 1/p]^-1 with s = 1 - (1 - p)**l, rewritten as p s / (1 + s).
    """
    if l < 1:
        raise ValueError(f"pairing interval must be >= 1, got {l}")
    if not 0 <= p <= 1:
        raise ValueError(f"click probability must lie in [0, 1], got {p}")
    if p == 0:
        return 0.0
    s = 1.0 if p == 1 else -math.expm1(l * math.log1p(-p))
    return p * s / (1 + s)


def _pair_sums(c):
    signal = sum(c[sum(zi)] * c[sum(zj)] for zi, zj in SIGNAL_CONFIGS)
    error = sum(c[sum(zi)] * c[sum(zj)] for zi, zj in ERROR_CONFIGS)
    return signal, error


def signal_pair_ratio(mu, lb, ch):
    """Fraction r_s of clicked pairs whose settings form a Z-basis signal pair (0 when nothing clicks)."""
    p = mean_click_prob(mu, lb, ch)
    if p == 0:
        return 0.0
    signal, _ = _pair_sums(_click_table(mu, lb, ch))
    return signal / (16 * p * p)


def qber_z(mu, lb, ch):
    """Expected Z-basis bit error rate of signal pairs (0 when nothing clicks)."""
    signal, error = _pair_sums(_click_table(mu, lb, ch))
    if signal == 0:
        return 0.0
    return error / signal


def pseudo_single_pair_fraction(mu, lb, ch, cfg=None):
    """Fraction q11 of signal pairs in which both parties emitted a pseudo single photon.

    A vacuum pulse (z = 0) carries no photons; a z = 1 pulse is taken as the
    pseudo single-photon state at intensity mu. ``cfg=None`` uses the
    continuous-phase limit (Poisson weights, Fock state |1>).
    """
    p = mean_click_prob(mu, lb, ch)
    if p == 0 or mu == 0:
        return 0.0
    r_s = signal_pair_ratio(mu, lb, ch)
    if cfg is None:
        p1, n1 = mu * math.exp(-mu), 1.0
    else:
        p1, n1 = pseudo_photon_prob(mu, 1, cfg), expected_photon_number(mu, 1, cfg)

    def click(z):
        return 1 - (1 - 2 * ch.p_d) * (1 - lb.eta_s) ** (n1 * (z[0] + z[1]))

    total = sum(click(zi) * click(zj) for zi, zj in SIGNAL_CONFIGS)
    return min(p1 * p1 * total / (16 * r_s * p * p), 1.0)


def mdi_single_photon_yield_error(lb, ch):
    """Single-photon-pair yield and bit error rate of the X basis, symmetric arms."""
    eta = lb.eta_s
    pd = ch.p_d
    y = (1 - pd ** 2) * (eta * eta / 2 + (4 * eta - 3 * eta * eta) * pd + 4 * (1 - eta) ** 2 * pd ** 2)
    ey = VACUUM_ERROR_RATE * y - (VACUUM_ERROR_RATE - ch.e_d) * (1 - pd ** 2) * eta * eta / 2
    return y, ey / y


def apply_deviation(Y11, e11, mu, cfg=None):
    """Widen (Y, eY) by the discrete-phase deviation sqrt(1 - F_mu1**2), clipped to [0, 1].

    Returns ``(Y_lo, Y_hi, eY_lo, eY_hi)``; ``cfg=None`` means no deviation.
    """
    eps = 0.0 if cfg is None else deviation_mu_one(mu, cfg)
    ey = e11 * Y11

    def clip(v):
        return min(max(v, 0.0), 1.0)

    return clip(Y11 - eps), clip(Y11 + eps), clip(ey - eps), clip(ey + eps)
