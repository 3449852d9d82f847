"""Command line front end.

    dprmp run CONFIG.json [--mode sweep|mc_validate|decoy_validate]
                          [--set key=value ...] [--workers N]
    dprmp plot SWEEP.csv SCRIPT.py

Exit codes: 0 success, 1 validation check failed, 2 bad configuration,
3 numeric failure in a pipeline stage, 4 I/O error.
"""
import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import fields

import numpy as np

from . import pairing_mc
from .channel import ChannelParams
from .decoy import estimate_yield_bounds, synthesize_instance
from .keyrate import CONTINUOUS, SweepGrid, default_mu_grid, sweep
from .plotting import emit_plot_script

log = logging.getLogger("dprmp")

MODES = ("sweep", "mc_validate", "decoy_validate")
CSV_HEADER = ["distance_km", "D", "l", "mu_opt", "key_rate", "plob", "p", "r_p", "r_s", "q11", "E_z", "e_phase", "F11"]
CONTAINMENT_TOL = 1e-9

DEFAULT_MC_POINTS = [
    {"seed": 42, "l": 100, "mu": 0.1, "channel": {"L_km": 50}},
    {"seed": 7, "l": 1000, "mu": 0.2, "channel": {"p_d": 5e-4, "L_km": 100}},
    {"seed": 2024, "l": 3, "mu": 0.5, "channel": {"p_d": 1e-4, "L_km": 0}},
]


class ConfigError(ValueError):
    pass


class ValidationFailed(RuntimeError):
    pass


class StageError(RuntimeError):
    pass


def load_config(path, overrides=()):
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    for item in overrides:
        apply_override(cfg, item)
    return cfg


def apply_override(cfg, item):
    """Apply ``dotted.key=value``; the value is parsed as JSON when possible."""
    if "=" not in item:
        raise ConfigError(f"--set expects key=value, got {item!r}")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    parts = key.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set {key}: {part} is not an object")
    node[parts[-1]] = value


def channel_from(section, base=None):
    section = dict(section or {})
    unknown = set(section) - set(ChannelParams.field_names())
    if unknown:
        raise ConfigError(f"unknown channel keys: {sorted(unknown)}")
    params = {f.name: getattr(base, f.name) for f in fields(ChannelParams)} if base else {}
    params.update({k: float(v) for k, v in section.items()})
    try:
        return ChannelParams(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"channel: {exc}") from exc


def _distances(value):
    if isinstance(value, dict):
        try:
            start, stop, step = float(value["start"]), float(value["stop"]), float(value["step"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"grid.distances range needs numeric start/stop/step: {exc}") from exc
        if step <= 0:
            raise ConfigError("grid.distances step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 10) for i in range(max(n, 0)))
    if not isinstance(value, list):
        raise ConfigError("grid.distances must be a list or a {start, stop, step} object")
    return tuple(float(x) for x in value)


def _d_value(v):
    if isinstance(v, str) and v.lower() in ("continuous", "inf", "cont"):
        return CONTINUOUS
    if isinstance(v, bool) or not float(v).is_integer() or int(v) < 2 or int(v) % 2:
        raise ConfigError(f"D values must be even integers >= 2 or 'continuous', got {v!r}")
    return int(v)


def _int(v, name):
    try:
        f = float(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a number, got {v!r}") from exc
    if not f.is_integer() or f < 1:
        raise ConfigError(f"{name} must be a positive integer, got {v!r}")
    return int(f)


def grid_from(section):
    section = section or {}
    try:
        distances = _distances(section["distances"])
        D_values = tuple(_d_value(v) for v in section["D_values"])
        l_values = tuple(_int(v, "l") for v in section["l_values"])
    except KeyError as exc:
        raise ConfigError(f"grid is missing {exc}") from exc
    if not (distances and D_values and l_values):
        raise ConfigError("grid must be non-empty for sweep mode")
    if any(not (L > 0 and math.isfinite(L)) for L in distances):
        raise ConfigError("distances must be positive and finite (the PLOB bound diverges at 0 km)")
    mu_grid = section.get("mu_grid")
    try:
        return SweepGrid(distances, D_values, l_values, tuple(float(m) for m in mu_grid) if mu_grid else None)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _fmt(x):
    return repr(float(x))


def write_sweep_csv(points, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for pt in points:
            d = pt.diagnostics
            w.writerow([
                _fmt(pt.L_km), 0 if pt.D is CONTINUOUS else pt.D, pt.l, _fmt(pt.mu_opt), _fmt(pt.R), _fmt(pt.plob),
                _fmt(d["p"]), _fmt(d["r_p"]), _fmt(d["r_s"]), _fmt(d["q11"]), _fmt(d["E_z"]),
                _fmt(d["e_phase"]), _fmt(d["F11"]),
            ])


def run_sweep(cfg, workers):
    ch = channel_from(cfg.get("channel"))
    grid = grid_from(cfg.get("grid"))
    outputs = cfg.get("outputs") or {}
    if "csv_path" not in outputs:
        raise ConfigError("outputs.csv_path is required for sweep mode")
    result = sweep(grid, ch, workers=workers)
    write_sweep_csv(result.points, outputs["csv_path"])
    log.info("wrote %d rows to %s", len(result.points), outputs["csv_path"])
    if outputs.get("plot_path"):
        n = emit_plot_script(outputs["csv_path"], outputs["plot_path"])
        log.info("wrote plot script with %d series to %s", n, outputs["plot_path"])
    if result.errors:
        first = result.errors[0]
        raise StageError(f"{len(result.errors)} grid point(s) failed; first at stage {first['stage']}: {first}")


def run_mc_validate(cfg):
    section = cfg.get("mc") or {}
    base = channel_from(cfg.get("channel"))
    n_rounds = _int(section.get("n_rounds", 10**7), "mc.n_rounds")
    entries = []
    ok = True
    for point in section.get("points", DEFAULT_MC_POINTS):
        try:
            mc_cfg = pairing_mc.McConfig(
                n_rounds=n_rounds,
                seed=int(point["seed"]),
                l=_int(point["l"], "mc.points.l"),
                mu=float(point["mu"]),
                ch=channel_from(point.get("channel"), base),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad mc point {point!r}: {exc}") from exc
        stats = pairing_mc.simulate(mc_cfg)
        report = pairing_mc.compare_with_analytic(stats, pairing_mc.analytic_stats(mc_cfg))
        ok &= not any(r["flagged"] for r in report.values())
        entries.append({"point": point, "stats": json.loads(stats.to_json()), "z_scores": report})
    out = {"rng": pairing_mc.RNG_ALGORITHM, "n_rounds": n_rounds, "all_within_3_sigma": ok, "points": entries}
    _emit_report(out, cfg)
    if not ok:
        raise ValidationFailed("Monte Carlo statistics disagree with the analytic model")


def run_decoy_validate(cfg):
    section = cfg.get("decoy") or {}
    n = _int(section.get("n_instances", 100), "decoy.n_instances")
    rng = np.random.default_rng(int(section.get("seed", 0)))
    D_values = [_d_value(v) for v in section.get("D_values", [4, 8, 12])]
    cases = []
    failures = 0
    for i in range(n):
        D = D_values[i % len(D_values)]
        mu = float(rng.uniform(0.1, 0.5))
        nu = float(rng.uniform(0.02, 0.9) * mu)
        inst = synthesize_instance(rng, D, mu, nu)
        bounds = estimate_yield_bounds(inst.gains, inst.dc)
        missed = []
        for (a, b), (ylo, yhi, elo, ehi) in bounds.brackets.items():
            ty, te = inst.truth_Y[a, b], inst.truth_eY[a, b]
            if not (ylo - CONTAINMENT_TOL <= ty <= yhi + CONTAINMENT_TOL):
                missed.append(("Y", a, b))
            if not (elo - CONTAINMENT_TOL <= te <= ehi + CONTAINMENT_TOL):
                missed.append(("eY", a, b))
        failures += bool(missed)
        y11 = bounds[(1, 1)]
        cases.append({"D": D, "mu": mu, "nu": nu, "contained": not missed, "missed": missed,
                      "Y11_bracket": [y11[0], y11[1]], "Y11_truth": float(inst.truth_Y[1, 1])})
    out = {"n_instances": n, "contained": n - failures, "instances": cases}
    _emit_report(out, cfg)
    if failures:
        raise ValidationFailed(f"{failures} of {n} instances had a bracket missing the truth")


def _emit_report(report, cfg):
    text = json.dumps(report, indent=2, default=float)
    path = (cfg.get("outputs") or {}).get("report_path")
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def run(config_file, mode=None, overrides=(), workers=1):
    """Execute one configuration; returns the process exit status."""
    try:
        cfg = load_config(config_file, overrides)
        mode = mode or cfg.get("mode", "sweep")
        if mode not in MODES:
            raise ConfigError(f"unknown mode {mode!r}; expected one of {MODES}")
        if workers < 1:
            raise ConfigError("--workers must be >= 1")
        if mode == "sweep":
            run_sweep(cfg, workers)
        elif mode == "mc_validate":
            run_mc_validate(cfg)
        else:
            run_decoy_validate(cfg)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return 2
    except ValidationFailed as exc:
        log.error("validation failed: %s", exc)
        return 1
    except StageError as exc:
        log.error("numeric failure: %s", exc)
        return 3
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return 4
    except (ArithmeticError, ValueError) as exc:
        log.error("numeric failure: %s", exc)
        return 3
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="dprmp", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a JSON configuration")
    p_run.add_argument("config")
    p_run.add_argument("--mode", choices=MODES)
    p_run.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    p_run.add_argument("--workers", type=int, default=1)
    p_plot = sub.add_parser("plot", help="write a plotting script for a sweep CSV")
    p_plot.add_argument("csv_path")
    p_plot.add_argument("plot_path")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(message)s")
    if args.command == "run":
        return run(args.config, args.mode, args.overrides, args.workers)
    try:
        n = emit_plot_script(args.csv_path, args.plot_path)
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return 4
    log.info("wrote plot script with %d series", n)
    return 0


if __name__ == "__main__":
    sys.exit(main())
