"""Discrete-phase decoy-state estimation by two-stage linear programs.

Gains are indexed by the summed intensities of a pulse pair. Stage one
brackets Alice's marginal yields Y_{k_a}^{mu, mu_b} for every Bob column;
stage two turns those brackets into bounds on the pair yields
Y_{k_a, k_b}^{mu, mu}. Rows for an intensity other than the signal are
relaxed by the deviation slack sqrt(1 - F**2) between the two intensities.
The same programs applied to the gain*QBER column bound Y*e.
"""
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .core_math import PhaseConfig, deviation_mu_nu, pseudo_photon_prob, pseudo_photon_probs
from .lp import LpProblem, variable_range

COLUMNS = ("Q", "QE")


@dataclass(frozen=True)
class DecoyConfig:
    mu: float
    nu: float
    cfg: PhaseConfig
    s0: float = 1 / 3
    s_nu: float = 1 / 3
    s_mu: float = 1 / 3

    def __post_init__(self):
        if not 0 < self.nu < self.mu:
            raise ValueError(f"need 0 < nu < mu, got nu={self.nu}, mu={self.mu}")
        probs = (self.s0, self.s_nu, self.s_mu)
        if not all(0 < s < 1 for s in probs) or not math.isclose(sum(probs), 1.0, abs_tol=1e-12):
            raise ValueError(f"selection probabilities must lie in (0, 1) and sum to 1, got {probs}")

    def intensity_sums(self):
        """Summed pair intensities {0, nu, mu, 2nu, nu+mu, 2mu}, ascending."""
        mu, nu = self.mu, self.nu
        return sorted({0.0, nu, mu, 2 * nu, nu + mu, 2 * mu})


class GainTable(dict):
    """Mapping ``(mu_a, mu_b) -> (Q, QE)`` with CSV round-tripping."""

    def __setitem__(self, key, value):
        q, qe = (float(v) for v in value)
        if not (0 <= q <= 1 and 0 <= qe <= 1):
            raise ValueError(f"gain entries must lie in [0, 1], got {(q, qe)} at {key}")
        if qe > q * (1 + 1e-12) + 1e-15:
            raise ValueError(f"QE={qe} exceeds Q={q} at {key}")
        super().__setitem__((float(key[0]), float(key[1])), (q, qe))

    def value(self, mu_a, mu_b, column="Q"):
        return self[(mu_a, mu_b)][COLUMNS.index(column)]

    def alice_rows(self, mu_b):
        return sorted(a for a, b in self if b == mu_b)

    def bob_columns(self):
        return sorted({b for _, b in self})

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["mu_a", "mu_b", "Q", "QE"])
            for (a, b), (q, qe) in sorted(self.items()):
                w.writerow([repr(a), repr(b), repr(q), repr(qe)])

    @classmethod
    def from_csv(cls, path):
        table = cls()
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            missing = {"mu_a", "mu_b", "Q", "QE"} - set(reader.fieldnames or ())
            if missing:
                raise ValueError(f"gain CSV missing columns: {sorted(missing)}")
            for row in reader:
                table[(float(row["mu_a"]), float(row["mu_b"]))] = (float(row["Q"]), float(row["QE"]))
        return table


@dataclass
class YieldBounds:
    """Per ``(k_a, k_b)``: ``(Y_lo, Y_hi, eY_lo, eY_hi)``."""

    brackets: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.brackets[key]

    def __contains__(self, key):
        return key in self.brackets

    def __len__(self):
        return len(self.brackets)


def prob_k_given_mu_pair(k_a, k_b, mu_a, mu_b, cfg):
    return pseudo_photon_prob(mu_a, k_a, cfg) * pseudo_photon_prob(mu_b, k_b, cfg)


def epsilon_slack(dc):
    """Deviation slack sqrt(1 - F_{mu nu}**2) between signal and decoy intensity."""
    return deviation_mu_nu(dc.mu, dc.nu, dc.cfg)


def pair_slack(a, b, cfg):
    """Slack between any two intensities; zero when they coincide."""
    return 0.0 if a == b else deviation_mu_nu(a, b, cfg)


def _slack(a, dc, eps):
    if a == dc.mu:
        return 0.0
    return pair_slack(a, dc.mu, dc.cfg) if eps is None else eps


def _interval_rows(coef, lo, hi):
    # lo <= coef.x <= hi as two <= rows
    return [coef, -coef], [hi, -lo]


def stage1_bounds(gains, dc, k_a, mu_b_col, column="Q", eps=None):
    """Bracket Alice's marginal Y_{k_a}^{mu, mu_b_col} (or its error counterpart).

    ``eps=None`` uses the pairwise slack for each row; a number overrides it
    for every non-signal row.
    """
    cfg = dc.cfg
    if (dc.mu, mu_b_col) not in gains:
        raise KeyError(f"gain table has no signal row ({dc.mu}, {mu_b_col})")
    A_eq = [pseudo_photon_probs(dc.mu, cfg)]
    b_eq = [gains.value(dc.mu, mu_b_col, column)]
    A_ub, b_ub = [], []
    for a in gains.alice_rows(mu_b_col):
        if a == dc.mu:
            continue
        e = _slack(a, dc, eps)
        g = gains.value(a, mu_b_col, column)
        rows, rhs = _interval_rows(pseudo_photon_probs(a, cfg), g - e, g + e)
        A_ub += rows
        b_ub += rhs
    problem = LpProblem(np.zeros(cfg.D), A_ub or None, b_ub or None, A_eq, b_eq)
    return variable_range(problem, k_a)


def stage2_bounds(stage1, dc, k_b, eps=None):
    """Bracket the pair quantity for Bob index ``k_b`` from stage-one brackets.

    ``stage1`` maps each Bob column intensity to the ``(lo, hi)`` bracket of
    Alice's marginal for a fixed ``k_a``.
    """
    cfg = dc.cfg
    A_ub, b_ub = [], []
    for mu_b, (lo, hi) in sorted(stage1.items()):
        e = _slack(mu_b, dc, eps)
        rows, rhs = _interval_rows(pseudo_photon_probs(mu_b, cfg), lo - e, hi + e)
        A_ub += rows
        b_ub += rhs
    problem = LpProblem(np.zeros(cfg.D), A_ub or None, b_ub or None)
    return variable_range(problem, k_b)


def stage1_table(gains, dc, k_a, column="Q", eps=None):
    return {b: stage1_bounds(gains, dc, k_a, b, column, eps) for b in gains.bob_columns() if (dc.mu, b) in gains}


def error_bounds(gains, dc, k_a, k_b, eps=None):
    """Bracket Y*e for ``(k_a, k_b)`` by running both stages on the QE column."""
    return stage2_bounds(stage1_table(gains, dc, k_a, "QE", eps), dc, k_b, eps)


def estimate_yield_bounds(gains, dc, targets=None, eps=None):
    """Run both stages on both columns for each ``(k_a, k_b)`` in ``targets`` (default: all)."""
    D = dc.cfg.D
    if targets is None:
        targets = [(a, b) for a in range(D) for b in range(D)]
    out = YieldBounds()
    cache = {}
    for k_a, k_b in targets:
        for column in COLUMNS:
            if (k_a, column) not in cache:
                cache[(k_a, column)] = stage1_table(gains, dc, k_a, column, eps)
        y = stage2_bounds(cache[(k_a, "Q")], dc, k_b, eps)
        ey = stage2_bounds(cache[(k_a, "QE")], dc, k_b, eps)
        out.brackets[(k_a, k_b)] = (*y, *ey)
    return out


def q11_fraction(Y11_lo, gain_signal, mu, cfg):
    """Lower bound on the pseudo single-photon-pair fraction of signal gains."""
    if not gain_signal > 0:
        raise ZeroDivisionError("signal gain must be positive")
    p1 = pseudo_photon_prob(mu, 1, cfg)
    return min(max(p1 * p1 * Y11_lo / gain_signal, 0.0), 1.0)


@dataclass
class SyntheticInstance:
    """Forward-generated decoy data with known pair yields at the signal setting."""

    dc: DecoyConfig
    gains: GainTable
    truth_Y: np.ndarray
    truth_eY: np.ndarray
    eps_used: float = None


def synthesize_instance(rng, D, mu, nu, intensities=None, eps=None, max_error=0.5):
    """Generate gains from random pair yields perturbed within the deviation slack.

    Yields at the signal setting (mu, mu) are the truth. For any other Alice
    (Bob) intensity a, each pair yield is shifted by at most the slack between
    a and mu, so every constraint the estimator imposes holds for the truth.
    ``eps`` replaces the pairwise slack (``eps=0`` gives unperturbed yields).
    """
    cfg = PhaseConfig(D)
    dc = DecoyConfig(mu=mu, nu=nu, cfg=cfg)
    levels = dc.intensity_sums() if intensities is None else sorted({float(x) for x in intensities} | {mu})
    truth_Y = rng.uniform(0, 1, (D, D))
    truth_eY = truth_Y * rng.uniform(0, max_error, (D, D))

    def shifts(scale_of):
        out = {}
        for a in levels:
            e = 0.0 if a == mu else (scale_of(a) if eps is None else eps)
            out[a] = (rng.uniform(-e, e, (D, D)), rng.uniform(-e, e, (D, D)))
        return out

    slack = lambda a: pair_slack(a, mu, cfg)
    alice, bob = shifts(slack), shifts(slack)
    gains = GainTable()
    for a in levels:
        pa = pseudo_photon_probs(a, cfg)
        for b in levels:
            pb = pseudo_photon_probs(b, cfg)
            y = np.clip(truth_Y + alice[a][0] + bob[b][0], 0, 1)
            ey = np.clip(truth_eY + alice[a][1] + bob[b][1], 0, 1)
            ey = np.minimum(ey, y)
            q = float(pa @ y @ pb)
            qe = min(float(pa @ ey @ pb), q)
            gains[(a, b)] = (min(q, 1.0), min(qe, 1.0))
    return SyntheticInstance(dc, gains, truth_Y, truth_eY, eps)
