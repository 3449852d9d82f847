"""Asymptotic key rate, intensity optimisation and rate-distance sweeps."""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import channel as chm
from .core_math import PhaseConfig, binary_entropy
from .fidelity import delta_balance, fidelity_overall, phase_error_bound

CONTINUOUS = None  # D value selecting the continuous-phase limit


class KeyRateError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class KeyRatePoint:
    L_km: float
    D: object
    l: int
    mu_opt: float
    R: float
    plob: float
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SweepGrid:
    distances: tuple
    D_values: tuple
    l_values: tuple
    mu_grid: tuple = None

    def __post_init__(self):
        grid = self.mu_grid
        if grid is not None and any(not 0 <= m <= 0.5 for m in grid):
            raise ValueError("mu_grid must lie within [0, 0.5]")


@dataclass
class SweepResult:
    points: list
    errors: list = field(default_factory=list)


def default_mu_grid(n_log=30, n_lin=71):
    """101 intensities: log-spaced on [0.005, 0.05), linear on [0.05, 0.5]."""
    return tuple(np.concatenate([np.geomspace(0.005, 0.05, n_log, endpoint=False), np.linspace(0.05, 0.5, n_lin)]).tolist())


def plob_bound(ch):
    """Repeaterless capacity -log2(1 - eta) of the end-to-end fiber (detectors excluded)."""
    eta = 10 ** (-ch.alpha_db * ch.L_km / 10)
    if eta >= 1:
        return math.inf
    return -math.log1p(-eta) / math.log(2)


def key_rate(mu, D, l, ch):
    """Key rate per pulse position at intensity ``mu``; ``D=None`` is the continuous limit."""
    cfg = None if D is CONTINUOUS else PhaseConfig(int(D))
    diag = {}
    stage = "link_budget"
    try:
        lb = chm.link_budget(ch)
        stage = "mean_click_prob"
        p = chm.mean_click_prob(mu, lb, ch)
        stage = "pairing_rate"
        r_p = chm.pairing_rate(p, l)
        stage = "signal_pair_ratio"
        r_s = chm.signal_pair_ratio(mu, lb, ch)
        stage = "qber_z"
        E_z = chm.qber_z(mu, lb, ch)
        stage = "pseudo_single_pair_fraction"
        q11 = chm.pseudo_single_pair_fraction(mu, lb, ch, cfg)
        diag.update(p=p, r_p=r_p, r_s=r_s, q11=q11, E_z=E_z)

        stage = "single_photon_yield"
        y11, e11 = chm.mdi_single_photon_yield_error(lb, ch)
        y_lo, y_hi, ey_lo, ey_hi = chm.apply_deviation(y11, e11, mu, cfg)
        diag["Y11_bracket"] = (y_lo, y_hi)
        e_phase = 0.5
        F11 = 1.0
        reason = None
        if mu == 0 or q11 == 0:
            reason = "no pseudo single-photon pairs"
        elif y_lo <= 0:
            reason = "single-photon yield bracket reaches zero"
        else:
            e_hi = min(max(ey_hi / y_lo, 0.0), 0.5)
            stage = "fidelity"
            F11 = 1.0 if cfg is None else fidelity_overall(mu, 1, cfg).overall
            stage = "delta_balance"
            bal = delta_balance(F11, y_lo)
            if bal.clamped:
                reason = f"basis imbalance {bal.raw:.3g} exceeds 1/2"
            else:
                stage = "phase_error_bound"
                e_phase = phase_error_bound(e_hi, bal.delta)
                if e_phase >= 0.5:
                    e_phase = 0.5
                    reason = "phase error bound reaches 1/2"
        diag.update(e_phase=e_phase, F11=F11)

        stage = "key_rate"
        if reason is None:
            R = r_p * r_s * (q11 * (1 - binary_entropy(e_phase)) - ch.f * binary_entropy(E_z))
        else:
            R = 0.0
            diag["zero_reason"] = reason
        R = max(R, 0.0)
        stage = "plob_bound"
        plob = plob_bound(ch)
    except (ValueError, ArithmeticError) as exc:
        raise KeyRateError(stage, exc) from exc
    return KeyRatePoint(L_km=ch.L_km, D=D, l=l, mu_opt=mu, R=R, plob=plob, diagnostics=diag)


def optimize_mu(D, l, ch, mu_grid=None):
    """Grid search over intensities; ties go to the smallest mu."""
    grid = sorted(default_mu_grid() if mu_grid is None else mu_grid)
    if not grid:
        raise ValueError("mu_grid is empty")
    best = None
    for mu in grid:
        point = key_rate(mu, D, l, ch)
        if best is None or point.R > best.R:
            best = point
    return best


def _sweep_task(args):
    D, l, L, ch, mu_grid = args
    try:
        return optimize_mu(D, l, replace(ch, L_km=float(L)), mu_grid), None
    except KeyRateError as exc:
        return None, {"D": D, "l": l, "L_km": L, "stage": exc.stage, "error": str(exc.cause)}


def _order_key(D):
    # continuous limit sorts after every finite D
    return math.inf if D is CONTINUOUS else D


def sweep(grid, ch, workers=1):
    """Optimise mu at every (D, l, L) grid point, ordered by (D, l, L).

    Failed points are collected in ``errors``; the sweep keeps going.
    """
    tasks = [
        (D, l, L, ch, grid.mu_grid)
        for D in sorted(grid.D_values, key=_order_key)
        for l in sorted(grid.l_values)
        for L in sorted(grid.distances)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_sweep_task(t) for t in tasks]
    out = SweepResult(points=[])
    for point, err in results:
        if err is None:
            out.points.append(point)
        else:
            out.errors.append(err)
    return out
