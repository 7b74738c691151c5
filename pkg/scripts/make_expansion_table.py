"""Regenerate the packaged diamond thermal-expansion table.

The bulk (volumetric) coefficient follows the Debye-Grueneisen form
e(T) ~ C_V(T / Theta_D) with a constant Grueneisen parameter, normalised
to three times the 1.0e-6 / K linear coefficient of diamond at 300 K.  Run from the repository root:

    python3 scripts/make_expansion_table.py
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np
from scipy.integrate import quad

DEBYE_TEMP_K = 2230.0
BULK_ALPHA_300K = 3.0e-6
OUT = Path(__file__).resolve().parents[1] / "src" / "phonolib" / "data" / "diamond_expansion.csv"


def debye_heat_capacity(t: float, theta: float = DEBYE_TEMP_K) -> float:
    """Debye C_V in units of 3 N k_B."""
    if t == 0:
        return 0.0
    xd = theta / t
    val, _ = quad(lambda x: x**4 * np.exp(-x) / (-np.expm1(-x)) ** 2, 0.0, xd, epsabs=0, epsrel=1e-13, limit=200)
    return 3.0 * val / xd**3


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=OUT)
    ap.add_argument("--t-max", type=float, default=500.0)
    ap.add_argument("--step", type=float, default=5.0)
    args = ap.parse_args(argv)

    temps = np.arange(0.0, args.t_max + 0.5 * args.step, args.step)
    scale = BULK_ALPHA_300K / debye_heat_capacity(300.0)
    alpha = [scale * debye_heat_capacity(t) for t in temps]
    lines = [
        "# Diamond bulk (volumetric) thermal-expansion coefficient e(T) in the alpha_per_k column.",
        f"# Debye-Grueneisen approximation, Theta_D = {DEBYE_TEMP_K:g} K, scaled to {BULK_ALPHA_300K:g} /K at 300 K.",
        "# Generated by scripts/make_expansion_table.py; replace with measured values if available.",
        "temperature_k,alpha_per_k",
    ]
    lines += [f"{t:.9g},{a:.9g}" for t, a in zip(temps, alpha)]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(temps)} rows to {args.out}")


if __name__ == "__main__":
    main()
