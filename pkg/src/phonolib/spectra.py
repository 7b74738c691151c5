"""Four-line (A-D) zero-phonon emission spectra and their Lorentzian deconvolution.

Frequencies are offsets in GHz from line C at T = 0.  With ground and
excited splittings ``dg`` and ``du`` the lines sit at

* A: ``+du`` (upper excited -> lower ground)
* B: ``+du - dg`` (upper excited -> upper ground)
* C: ``0`` (lower excited -> lower ground)
* D: ``-dg`` (lower excited -> upper ground)

so A-D run in order of decreasing frequency (increasing wavelength).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .doublet import EXCITED_SPLITTING_GHZ, GROUND_SPLITTING_GHZ, OrbitalDoublet
from .errors import DomainError, UsageError
from .fit import Dataset, compare_models, fit_model
from .fit.engine import FitResult
from .fit.models import lorentzian_multi
from .presets import linewidth_params
from .rates import LinewidthParams, linewidth_model
from .shifts import line_shift_integral, splitting_shift_parts
from .units import DEFAULT_DEBYE_TEMP_K, GHZ_PER_K, PhononBath, boltzmann_argument, wavelength_nm_to_ghz

LINES = ("A", "B", "C", "D")
CENTER_WAVELENGTH_NM = 737.0
SPECTROMETER_RESOLUTION_GHZ = 16.0
DEFAULT_PROMINENCE = 0.05
# Scaled normal-matrix condition number above which a peak decomposition is
# not trusted.  For two equal-width peaks it is crossed near a separation
# of 0.4 FWHM (about 80 at 1 FWHM, 3e5 at 0.2 FWHM).
PEAK_ILL_CONDITIONED = 1e4

# Coupling used only for the thermal splitting reduction in synthetic
# spectra: a 10% reduction of both splittings at 150 K.
SPECTRA_SPLITTING_CHI_RHO = 0.1 / ((2 * math.pi**2 / 3) * (150.0 * GHZ_PER_K) ** 2)
# redshift of the lines at 300 K in GHz (~0.15 nm at 737 nm)
SPECTRA_LINE_SHIFT_300K_GHZ = -81.6


@dataclass(frozen=True)
class FineStructure:
    center_energy: float = wavelength_nm_to_ghz(CENTER_WAVELENGTH_NM)  # GHz, line C at T = 0
    ground_splitting: float = GROUND_SPLITTING_GHZ
    excited_splitting: float = EXCITED_SPLITTING_GHZ

    def __post_init__(self):
        if not (self.ground_splitting > 0 and self.excited_splitting > 0):
            raise DomainError("splittings must be > 0")

    def branch_weights(self, temperature: float, excited_splitting: float | None = None) -> tuple[float, float]:
        """Boltzmann populations ``(lower, upper)`` of the excited doublet."""
        du = self.excited_splitting if excited_splitting is None else excited_splitting
        x = boltzmann_argument(du, temperature)
        upper = 0.0 if x > 700 else 1.0 / (1.0 + math.exp(x))
        return 1.0 - upper, upper


@dataclass(frozen=True)
class SpectralModels:
    """Per-transition width and shift ingredients for synthesis.

    ``linewidth_lower`` sets lines C and D, ``linewidth_upper`` lines A and B
    (which also decay by downward orbital relaxation).  ``resolution_ghz``
    adds a Lorentzian instrument width (``None`` or 0 for none).
    """

    linewidth_lower: LinewidthParams = field(default_factory=linewidth_params)
    linewidth_upper: LinewidthParams = field(default_factory=lambda: linewidth_params(upper_branch=True))
    splitting_chi_rho: float = SPECTRA_SPLITTING_CHI_RHO
    line_shift_300k: float = SPECTRA_LINE_SHIFT_300K_GHZ
    debye_temp: float = DEFAULT_DEBYE_TEMP_K
    resolution_ghz: float | None = SPECTROMETER_RESOLUTION_GHZ


@dataclass(frozen=True)
class Peak:
    center: float  # GHz
    fwhm: float  # GHz
    area: float

    def __post_init__(self):
        if not self.fwhm > 0:
            raise DomainError(f"fwhm must be > 0, got {self.fwhm}")
        if not self.area > 0:
            raise DomainError(f"area must be > 0, got {self.area}")

    def __call__(self, x):
        return lorentzian(x, self.center, self.fwhm, self.area)


@dataclass
class Spectrum:
    grid: np.ndarray
    intensity: np.ndarray
    components: dict[str, Peak] = field(default_factory=dict)
    temperature: float | None = None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.intensity = np.asarray(self.intensity, dtype=float)
        if self.grid.ndim != 1 or self.grid.shape != self.intensity.shape:
            raise UsageError("grid and intensity must be 1-D arrays of equal length")
        if np.any(np.diff(self.grid) <= 0):
            raise UsageError("spectrum grid must be strictly increasing")
        if not np.all(np.isfinite(self.intensity)):
            raise UsageError("spectrum intensity must be finite")

    def total_area(self) -> float:
        """Sum of component areas (analytic integral over all frequencies)."""
        return float(sum(p.area for p in self.components.values()))

    def to_csv_rows(self):
        return [("offset_ghz", "intensity")] + list(zip(self.grid.tolist(), self.intensity.tolist()))


@dataclass
class PeakFit:
    peaks: list[Peak]
    residual_norm: float
    ill_conditioned: bool
    result: FitResult

    def to_dict(self) -> dict:
        return {
            "peaks": [{"center_ghz": p.center, "fwhm_ghz": p.fwhm, "area": p.area} for p in self.peaks],
            "residual_norm": self.residual_norm,
            "ill_conditioned": self.ill_conditioned,
            "condition_number": self.result.condition_number,
        }


def lorentzian(x, center: float, fwhm: float, area: float = 1.0):
    x = np.asarray(x, dtype=float)
    hw = 0.5 * fwhm
    return area * hw / math.pi / ((x - center) ** 2 + hw**2)


# ---------------------------------------------------------------------------


def line_positions(fs: FineStructure, models: SpectralModels, temperature: float) -> dict[str, float]:
    """Line centres in GHz relative to line C at T = 0."""
    dg, du = thermal_splittings(fs, models, temperature)
    shift = line_redshift(models, temperature)
    return {"A": shift + du, "B": shift + du - dg, "C": shift, "D": shift - dg}


def thermal_splittings(fs: FineStructure, models: SpectralModels, temperature: float) -> tuple[float, float]:
    """Ground and excited splittings including the thermal ``T^2`` reduction."""
    out = []
    for delta in (fs.ground_splitting, fs.excited_splitting):
        bath = PhononBath(models.splitting_chi_rho, temperature, models.debye_temp)
        out.append(delta + splitting_shift_parts(OrbitalDoublet(delta), bath).thermal)
    if out[0] <= 0 or out[1] <= 0:
        raise DomainError(f"thermal reduction closes a splitting at T = {temperature} K")
    return out[0], out[1]


def line_redshift(models: SpectralModels, temperature: float) -> float:
    """Common line shift, scaled so it equals ``line_shift_300k`` at 300 K."""
    if temperature == 0:
        return 0.0
    ref = line_shift_integral(300.0, models.debye_temp)
    return models.line_shift_300k * line_shift_integral(temperature, models.debye_temp) / ref


def line_widths(models: SpectralModels, temperature: float) -> dict[str, float]:
    """Line FWHMs in GHz, including the instrument width when set."""
    lower = linewidth_model(models.linewidth_lower, temperature) * 1e-3
    upper = linewidth_model(models.linewidth_upper, temperature) * 1e-3
    res = models.resolution_ghz or 0.0
    return {"A": upper + res, "B": upper + res, "C": lower + res, "D": lower + res}


def spectrum_components(fs: FineStructure, models: SpectralModels, temperature: float) -> dict[str, Peak]:
    centers = line_positions(fs, models, temperature)
    widths = line_widths(models, temperature)
    _, du = thermal_splittings(fs, models, temperature)
    lower, upper = fs.branch_weights(temperature, du)
    # each excited branch decays equally into the two ground levels
    areas = {"A": upper / 2, "B": upper / 2, "C": lower / 2, "D": lower / 2}
    return {k: Peak(centers[k], widths[k], areas[k]) for k in LINES if areas[k] > 0}


def default_grid(fs: FineStructure, models: SpectralModels, temperature: float, n: int = 4001) -> np.ndarray:
    """Grid covering all lines with five widths of margin."""
    centers = line_positions(fs, models, temperature)
    w = max(line_widths(models, temperature).values())
    lo = min(centers.values()) - 5 * w
    hi = max(centers.values()) + 5 * w
    return np.linspace(lo, hi, n)


def synthesize_spectrum(
    fs: FineStructure,
    models: SpectralModels,
    temperature: float,
    grid=None,
) -> Spectrum:
    """Sum of the four Lorentzian lines at ``temperature``.

    Raises
    ------
    UsageError
        ``grid`` does not contain every line centre.
    """
    if temperature < 0:
        raise DomainError("temperature must be >= 0")
    comps = spectrum_components(fs, models, temperature)
    grid = default_grid(fs, models, temperature) if grid is None else np.asarray(grid, dtype=float)
    centers = [p.center for p in comps.values()]
    if grid.size < 2 or min(centers) < grid[0] or max(centers) > grid[-1]:
        raise UsageError(
            f"grid [{grid[0] if grid.size else float('nan'):g}, {grid[-1] if grid.size else float('nan'):g}] GHz "
            f"does not span the lines at {min(centers):.4g}..{max(centers):.4g} GHz"
        )
    intensity = np.zeros_like(grid)
    for p in comps.values():
        intensity += p(grid)
    return Spectrum(grid, intensity, comps, temperature)


# ---------------------------------------------------------------------------


def count_resolvable_peaks(spectrum: Spectrum, prominence: float = DEFAULT_PROMINENCE) -> int:
    """Local maxima with prominence of at least ``prominence`` times the global maximum."""
    y = spectrum.intensity
    top = float(np.max(y)) if y.size else 0.0
    if top <= 0:
        return 0
    # pad so that a maximum at the grid edge still counts
    padded = np.concatenate([[-np.inf], y, [-np.inf]])
    peaks, _ = find_peaks(padded, prominence=prominence * top)
    return int(len(peaks))


def _initial_peaks(spectrum: Spectrum, n_peaks: int) -> list[tuple[float, float, float]]:
    x, y = spectrum.grid, spectrum.intensity
    idx, props = find_peaks(y, prominence=0.0, width=0)
    order = np.argsort(props["prominences"])[::-1] if len(idx) else []
    guesses = []
    dx = np.gradient(x)
    for i in list(order)[:n_peaks]:
        k = idx[i]
        w = max(float(props["widths"][i] * dx[k]), 2 * float(dx[k]))
        guesses.append((float(x[k]), w, float(y[k]) * math.pi * w / 2))
    span = x[-1] - x[0]
    while len(guesses) < n_peaks:
        c = guesses[0][0] if guesses else float(x[np.argmax(y)])
        w = guesses[0][1] if guesses else span / 10
        a = guesses[0][2] if guesses else float(np.max(y)) * math.pi * w / 2
        guesses.append((c + 0.25 * w * len(guesses), w, a / 2))
    return sorted(guesses)


def fit_lorentzians(
    spectrum: Spectrum,
    n_peaks: int,
    init=None,
    *,
    sigma=None,
    n_starts: int = 8,
    seed: int = 0,
) -> PeakFit:
    """Least-squares fit of ``n_peaks`` Lorentzians (centre, FWHM, area).

    ``init`` is a list of ``(center, fwhm, area)``; by default it comes from
    the most prominent local maxima.  Centres are bounded to the grid.
    ``ill_conditioned`` flags a scaled normal matrix with condition number
    above :data:`PEAK_ILL_CONDITIONED`, as happens for peaks closer than
    about half their width.
    """
    if n_peaks < 1:
        raise UsageError("n_peaks must be >= 1")
    x = spectrum.grid
    if init is None:
        init = _initial_peaks(spectrum, n_peaks)
    init = [tuple(map(float, p)) for p in init]
    if len(init) != n_peaks:
        raise UsageError(f"expected {n_peaks} initial peaks, got {len(init)}")
    if any(not (x[0] <= c <= x[-1]) for c, _, _ in init):
        raise UsageError("initial centres must lie within the grid")
    span = float(x[-1] - x[0])
    spec = lorentzian_multi(n_peaks)
    flat = [v for p in init for v in p]
    total = max(float(np.trapezoid(np.abs(spectrum.intensity), x)), 1e-300)
    lower = [float(x[0]), span * 1e-9, total * 1e-12] * n_peaks
    upper = [float(x[-1]), 10 * span, total * 100] * n_peaks
    spec = spec.with_bounds(lower, upper, flat)
    data = Dataset(x, spectrum.intensity, sigma)
    res = fit_model(spec, data, n_starts=n_starts, seed=seed, check_conditioning=False)
    v = res.values
    peaks = sorted(
        (Peak(float(v[3 * k]), float(v[3 * k + 1]), float(v[3 * k + 2])) for k in range(n_peaks)),
        key=lambda p: p.center,
    )
    resid = float(np.linalg.norm(spectrum.intensity - spec(x, v)))
    ill = res.condition_number > PEAK_ILL_CONDITIONED or not np.all(np.isfinite(res.covariance))
    return PeakFit(peaks, resid, bool(ill), res)


def preferred_peak_count(spectrum: Spectrum, candidates=(1, 2), *, sigma=None, seed: int = 0) -> int:
    """Peak count with the lowest AICc among ``candidates``."""
    fits = {}
    for n in candidates:
        fits[n] = fit_lorentzians(spectrum, n, sigma=sigma, seed=seed)
    specs = []
    data = Dataset(spectrum.grid, spectrum.intensity, sigma)
    for n, pf in fits.items():
        base = lorentzian_multi(n)
        flat = [v for p in pf.peaks for v in (p.center, p.fwhm, p.area)]
        s = base.with_bounds(initial=flat)
        object.__setattr__(s, "id", f"lorentzian_multi[{n}]")
        specs.append(s)
    report = compare_models(specs, data, n_starts=0)
    return int(report.best.model_id.split("[")[1].rstrip("]"))
