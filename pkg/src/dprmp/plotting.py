"""Emit a standalone matplotlib script that redraws a sweep CSV."""
import csv

_TEMPLATE = '''#!/usr/bin/env python3
"""Key rate versus distance, one series per (D, l), dashed PLOB bound.

Generated by dprmp. Reads {csv_name!r}; pass an output image path as the
first argument (default: {png_name!r}).
"""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_PATH = {csv_path!r}
SERIES = {series!r}  # (D, l); D == 0 is continuous phase randomization
PLOB = {plob!r}


def load(path):
    curves = defaultdict(list)
    plob = {{}}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (int(row["D"]), int(float(row["l"])))
            L = float(row["distance_km"])
            curves[key].append((L, float(row["key_rate"])))
            plob[L] = float(row["plob"])
    return curves, sorted(plob.items())


def label(D, l):
    phase = "continuous" if D == 0 else f"D={{D}}"
    return f"{{phase}}, l={{l:.0e}}"


def main(out):
    curves, plob = load(CSV_PATH)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for key in SERIES:
        pts = sorted((L, r) for L, r in curves.get(tuple(key), []) if r > 0)
        if pts:
            style = "--" if key[0] == 0 else "-"
            ax.plot(*zip(*pts), style, label=label(*key))
    if PLOB and plob:
        ax.plot(*zip(*plob), "k-.", label="PLOB bound")
    ax.set_yscale("log")
    ax.set_xlabel("Distance (km)")
    ax.set_ylabel("Key rate (bits per pulse)")
    if SERIES:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    return ax


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else {png_name!r})
'''


def emit_plot_script(csv_path, plot_path):
    """Write the plotting script for ``csv_path``; returns the number of series drawn (PLOB included)."""
    series = []
    has_rows = False
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            has_rows = True
            key = (int(row["D"]), int(float(row["l"])))
            if key not in series:
                series.append(key)
    png = str(plot_path).rsplit(".", 1)[0] + ".png"
    text = _TEMPLATE.format(
        csv_path=str(csv_path), csv_name=str(csv_path), png_name=png, series=series, plob=has_rows
    )
    with open(plot_path, "w") as fh:
        fh.write(text)
    return len(series) + (1 if has_rows else 0)
