"""Monte Carlo check of the pairing and sifting statistics.

Each round draws z_a, z_b uniformly from {0, 1}, clicks with
Pr(C = 1 | z), and clicks are paired greedily: a pending click pairs with
the next click if it is at most ``l`` rounds later, otherwise it is dropped
and the newer click becomes pending.
"""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import channel as chm
from . import kernels
from ._accel import backend_name

RNG_ALGORITHM = "numpy.random.Philox"
CHUNK = 1 << 20
Z_SCORE_LIMIT = 3.0


@dataclass(frozen=True)
class McConfig:
    n_rounds: int
    seed: int
    l: int
    mu: float
    ch: chm.ChannelParams = field(default_factory=chm.ChannelParams)

    def __post_init__(self):
        if self.n_rounds < 1:
            raise ValueError("n_rounds must be positive")
        if self.l < 1:
            raise ValueError("pairing interval must be >= 1")
        if self.mu < 0:
            raise ValueError("mu must be non-negative")


@dataclass
class McStats:
    pairs_per_round: float
    signal_pair_fraction: float
    z_error_fraction: float
    click_fraction: float
    pairs_per_round_stderr: float
    signal_pair_fraction_stderr: float
    z_error_fraction_stderr: float
    click_fraction_stderr: float
    n_rounds: int = 0
    n_clicks: int = 0
    n_pairs: int = 0
    n_signal: int = 0
    n_error: int = 0
    seed: int = 0
    rng: str = RNG_ALGORITHM
    backend: str = ""

    def to_json(self, **kwargs):
        return json.dumps(asdict(self), **kwargs)


def _fraction(k, n):
    """Empirical rate with a binomial standard error that never collapses to zero."""
    if n == 0:
        return 0.0, 0.5
    f = k / n
    g = (k + 0.5) / (n + 1)  # keeps the error positive when k is 0 or n
    return f, math.sqrt(g * (1 - g) / n)


def sample_clicks(cfg):
    """Positions and 2-bit settings (z_a*2 + z_b) of every clicked round."""
    lb = chm.link_budget(cfg.ch)
    load = np.array([chm.click_prob_given_intensity(n, 0, cfg.mu, lb, cfg.ch) for n in range(3)])
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    positions, codes = [], []
    done = 0
    while done < cfg.n_rounds:
        b = min(CHUNK, cfg.n_rounds - done)
        za = rng.integers(0, 2, b, dtype=np.int8)
        zb = rng.integers(0, 2, b, dtype=np.int8)
        u = rng.random(b)
        hit = np.flatnonzero(u < load[za + zb])
        positions.append(hit.astype(np.int64) + done)
        codes.append((za[hit] * 2 + zb[hit]).astype(np.int8))
        done += b
    return np.concatenate(positions), np.concatenate(codes)


def simulate(cfg, pair_fn=None):
    """Run one replica; identical (seed, config) gives identical statistics."""
    pair_fn = kernels.pair_clicks if pair_fn is None else pair_fn
    pos, code = sample_clicks(cfg)
    first, second = pair_fn(pos, cfg.l)
    first = np.asarray(first)
    second = np.asarray(second)
    if first.size:
        span = pos[second] - pos[first]
        assert np.all(span >= 1) and np.all(span <= cfg.l), "pair spans more than l rounds"
        assert np.all(second > first) and np.all(first[1:] > second[:-1]), "click reused across pairs"
    zi, zj = code[first], code[second]
    signal = (zi ^ zj) == 3
    error = signal & (zi != 1) & (zi != 2)  # [00,11] or [11,00]
    n = cfg.n_rounds
    n_clicks, n_pairs = int(pos.size), int(first.size)
    n_signal, n_error = int(signal.sum()), int(error.sum())
    c, c_se = _fraction(n_clicks, n)
    r, r_se = _fraction(n_pairs, n)
    s, s_se = _fraction(n_signal, n_pairs)
    e, e_se = _fraction(n_error, n_signal)
    return McStats(
        pairs_per_round=r,
        signal_pair_fraction=s,
        z_error_fraction=e,
        click_fraction=c,
        pairs_per_round_stderr=r_se,
        signal_pair_fraction_stderr=s_se,
        z_error_fraction_stderr=e_se,
        click_fraction_stderr=c_se,
        n_rounds=n,
        n_clicks=n_clicks,
        n_pairs=n_pairs,
        n_signal=n_signal,
        n_error=n_error,
        seed=cfg.seed,
        backend=backend_name() if pair_fn is kernels.pair_clicks else getattr(pair_fn, "__name__", ""),
    )


def analytic_stats(cfg):
    """Model values matching the MC statistics: p, r_p, r_s and E^Z."""
    lb = chm.link_budget(cfg.ch)
    p = chm.mean_click_prob(cfg.mu, lb, cfg.ch)
    return {
        "click_fraction": p,
        "pairs_per_round": chm.pairing_rate(p, cfg.l),
        "signal_pair_fraction": chm.signal_pair_ratio(cfg.mu, lb, cfg.ch),
        "z_error_fraction": chm.qber_z(cfg.mu, lb, cfg.ch),
    }


def compare_with_analytic(stats, analytic, limit=Z_SCORE_LIMIT):
    """z-score of each MC statistic against its analytic value; flags |z| > limit.

    ``analytic`` is a mapping keyed by McStats field names, or an
    ``(r_p, r_s, E_z)`` tuple.
    """
    if not isinstance(analytic, dict):
        r_p, r_s, e_z = analytic
        analytic = {"pairs_per_round": r_p, "signal_pair_fraction": r_s, "z_error_fraction": e_z}
    report = {}
    for name, expected in analytic.items():
        value = getattr(stats, name)
        se = getattr(stats, name + "_stderr")
        z = (value - expected) / se if se > 0 else (0.0 if value == expected else math.inf)
        report[name] = {"mc": value, "analytic": expected, "stderr": se, "z": z, "flagged": abs(z) > limit}
    return report
