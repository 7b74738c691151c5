"""Resolvable fine-structure peaks versus temperature.

Counts peaks in synthesized A-D spectra from 4 to 350 K and writes the
counts plus spectra at a few temperatures.

    python3 scripts/peak_merging.py --out-dir results
"""

from __future__ import annotations

import argparse
import warnings
from pathlib import Path

import numpy as np

from phonolib import ValidityWarning
from phonolib.io import write_csv
from phonolib.spectra import DEFAULT_PROMINENCE, FineStructure, SpectralModels, count_resolvable_peaks, synthesize_spectrum


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    ap.add_argument("--prominence", type=float, default=DEFAULT_PROMINENCE)
    args = ap.parse_args(argv)

    fs, models = FineStructure(), SpectralModels()
    temps = np.arange(4.0, 351.0, 2.0)
    grid = np.linspace(-400.0, 600.0, 5001)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        counts = [count_resolvable_peaks(synthesize_spectrum(fs, models, t), args.prominence) for t in temps]
        for t in (5.0, 10.0, 90.0, 150.0, 300.0):
            s = synthesize_spectrum(fs, models, t, grid)
            write_csv(args.out_dir / f"spectrum_{t:g}K.csv", ["offset_ghz", "intensity"], zip(s.grid, s.intensity))
    write_csv(args.out_dir / "peak_counts.csv", ["temperature_k", "peaks_count"], zip(temps, counts))
    changes = [(temps[i], counts[i - 1], counts[i]) for i in range(1, len(temps)) if counts[i] != counts[i - 1]]
    for t, a, b in changes:
        print(f"{a} -> {b} peaks at {t:g} K")
    print(f"wrote peak_counts.csv and spectra to {args.out_dir}")


if __name__ == "__main__":
    main()
