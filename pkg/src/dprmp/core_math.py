"""Series and special functions behind the pseudo-photon decomposition.

A D-phase randomized coherent state splits into D "pseudo photon number"
components, each a superposition of Fock states |mD + k>. Everything here
reduces to lattice sums of the form ``sum_m x**(mD+p) / (mD+q)!`` which are
evaluated incrementally (no explicit factorials) by
:func:`dprmp.kernels.lattice_series`.
"""
import cmath
import math
from dataclasses import dataclass

import numpy as np

from .kernels import lattice_series


@dataclass(frozen=True)
class PhaseConfig:
    """Number of discrete phases ``D`` and the series truncation tolerance."""

    D: int
    tol: float = 1e-15

    def __post_init__(self):
        if isinstance(self.D, bool) or not isinstance(self.D, (int, np.integer)):
            raise TypeError(f"D must be an integer, got {self.D!r}")
        if self.D < 2 or self.D % 2:
            raise ValueError(f"D must be an even integer >= 2, got {self.D}")
        if not 0 < self.tol < 1e-6:
            raise ValueError(f"tol must lie in (0, 1e-6), got {self.tol}")


def _check_intensity(mu, name="mu"):
    if not math.isfinite(mu) or mu < 0:
        raise ValueError(f"{name} must be a finite non-negative intensity, got {mu}")


def _check_k(k, cfg):
    if not 0 <= k < cfg.D:
        raise ValueError(f"k must lie in [0, {cfg.D - 1}], got {k}")


def _min_terms(x):
    return math.ceil(4 * max(1.0, x))


def _series(x, cfg, p, q, m0=0):
    return lattice_series(x, cfg.D, p, q, m0, cfg.tol, _min_terms(x))[0]


def series_term_count(x, cfg, p=0, q=0):
    """Number of terms the truncation rule needs for ``sum x**(mD+p)/(mD+q)!``."""
    return lattice_series(x, cfg.D, p, q, 0, cfg.tol, _min_terms(x))[1]


def pseudo_photon_prob(mu, k, cfg):
    """Probability P_k of the pseudo k-photon component at intensity ``mu``."""
    _check_intensity(mu)
    _check_k(k, cfg)
    return math.exp(-mu) * _series(mu, cfg, k, k)


def pseudo_photon_probs(mu, cfg):
    """All D pseudo-photon probabilities as an array."""
    _check_intensity(mu)
    return np.array([math.exp(-mu) * _series(mu, cfg, k, k) for k in range(cfg.D)])


def poisson_prob(mu, k):
    """Continuous-phase limit of :func:`pseudo_photon_prob`."""
    _check_intensity(mu)
    if mu == 0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(mu) - mu - math.lgamma(k + 1))


def s_k(alpha, k, cfg):
    """Phase sum ``sum_n exp(2 pi i n k / D) * exp(alpha * exp(-2 pi i n / D))``.

    Evaluated through the equivalent lattice series
    ``D * sum_m alpha**(mD+k) / (mD+k)!``: the D-term form cancels to rounding
    noise once |alpha|**k is small, the series keeps full relative accuracy.
    """
    D = cfg.D
    k %= D
    alpha = complex(alpha)
    if alpha == 0:
        return complex(D) if k == 0 else 0j
    r = abs(alpha)
    # first term alpha**k / k!, built in log space so tiny |alpha| underflows cleanly
    log_mag = k * math.log(r) - math.lgamma(k + 1)
    if log_mag < -745:
        return 0j
    term = math.exp(log_mag) * cmath.exp(1j * k * cmath.phase(alpha))
    step = alpha**D
    total = term
    n = k
    need = _min_terms(r)
    count = 1
    while True:
        denom = 1.0
        for j in range(1, D + 1):
            denom *= n + j
        n += D
        term = term * step / denom
        total += term
        count += 1
        if (abs(term) <= cfg.tol * abs(total) and count >= need) or count > 100000:
            break
    return D * total


def fidelity_mu_nu(mu, nu, cfg):
    """Fidelity lower bound between pseudo-photon states at intensities mu and nu."""
    _check_intensity(mu)
    _check_intensity(nu, "nu")
    num = _series(math.sqrt(mu * nu), cfg, 0, 0)
    return num / math.sqrt(_series(mu, cfg, 0, 0) * _series(nu, cfg, 0, 0))


def deviation_mu_nu(mu, nu, cfg):
    """``sqrt(1 - F_mu_nu**2)`` without the cancellation of the direct form.

    With A = 1 + a, B = 1 + b, N = 1 + n (a, b, n the m >= 1 tails),
    1 - N**2/(AB) = (a + b + ab - 2n - n**2) / (AB).
    """
    _check_intensity(mu)
    _check_intensity(nu, "nu")
    a = _series(mu, cfg, 0, 0, m0=1) if mu > 0 else 0.0
    b = _series(nu, cfg, 0, 0, m0=1) if nu > 0 else 0.0
    x = math.sqrt(mu * nu)
    n = _series(x, cfg, 0, 0, m0=1) if x > 0 else 0.0
    gap = a + b + a * b - 2 * n - n * n
    return math.sqrt(max(gap, 0.0) / ((1 + a) * (1 + b)))


def fidelity_mu_one(mu, cfg):
    """Fidelity between the pseudo single-photon state at 2*mu and the Fock state |1>."""
    _check_intensity(mu)
    return 1.0 / math.sqrt(_series(2 * mu, cfg, 0, 1))


def deviation_mu_one(mu, cfg):
    """``sqrt(1 - F_mu1**2)``, computed from the series tail t as sqrt(t / (1 + t))."""
    _check_intensity(mu)
    if mu == 0:
        return 0.0
    t = _series(2 * mu, cfg, 0, 1, m0=1)
    return math.sqrt(t / (1 + t))


def expected_photon_number(mu, k, cfg):
    """Mean photon number of the pseudo k-photon state (exact series ratio).

    Both sums are divided through by mu**k, so mu = 0 gives the limit k.
    """
    _check_intensity(mu)
    _check_k(k, cfg)
    # for k = 0 the kernel skips the m = 0 term (1/(-1)! == 0)
    num = _series(mu, cfg, 0, k - 1)
    return num / _series(mu, cfg, 0, k)


def binary_entropy(x):
    """Binary Shannon entropy in bits, with H(0) = H(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy needs x in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)
