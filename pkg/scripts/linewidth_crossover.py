"""Fit the composite linewidth model to the two empirical ZPL-width laws.

Synthetic points follow the linear law below 20 K and the cubic law from
70 K up.  The script prints the fitted couplings, the log-log slopes of
the fitted curve and where its local slope passes 2, then writes the
curve and its components to ``linewidth.csv``.

    python3 scripts/linewidth_crossover.py --out-dir results
"""

from __future__ import annotations

import argparse
import math
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from phonolib import presets
from phonolib.fit import Dataset, fit_model, get_model
from phonolib.io import write_csv


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    ap.add_argument("--rel-sigma", type=float, default=0.05, help="relative weight of the synthetic points")
    args = ap.parse_args(argv)

    lo, hi = np.arange(4.0, 20.5, 1.0), np.arange(70.0, 351.0, 10.0)
    x = np.concatenate([lo, hi])
    y = np.concatenate([presets.linear_law(lo), presets.cubic_law(hi)])
    spec = get_model("linewidth")
    res = fit_model(spec, Dataset(x, y, args.rel_sigma * y))
    for name, v, e in zip(res.names, res.values, res.stderr.values()):
        print(f"{name:24s} {v:12.6g} +/- {e:.3g}")

    def gamma(t):
        return spec(np.atleast_1d(np.asarray(t, dtype=float)), res.values)

    def local_slope(t, h=1e-4):
        return float(np.log(gamma(t * (1 + h)) / gamma(t * (1 - h)))[0]) / (math.log1p(h) - math.log1p(-h))

    for a, b in ((5, 15), (100, 350)):
        t = np.linspace(a, b, 41)
        print(f"log-log slope {a}-{b} K: {np.polyfit(np.log(t), np.log(gamma(t)), 1)[0]:.4f}")
    print(f"local slope = 2 at {brentq(lambda t: local_slope(t) - 2, 5, 100):.2f} K")
    print(f"empirical laws intersect at {brentq(lambda t: presets.linear_law(t) - presets.cubic_law(t), 8, 20):.2f} K")

    grid = np.arange(1.0, 351.0, 1.0)
    floor = spec(grid, [res.values[0], 0.0, 0.0])
    single = spec(grid, [0.0, res.values[1], 0.0])
    deph = spec(grid, [0.0, 0.0, res.values[2]])
    out = args.out_dir / "linewidth.csv"
    write_csv(
        out,
        ["temperature_k", "linewidth_mhz", "floor_mhz", "single_phonon_mhz", "dephasing_mhz"],
        zip(grid, gamma(grid), floor, single, deph),
    )
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
