"""Classical rate-equation simulation of pulsed optical pumping.

Populations obey ``dp/dt = M p`` with a piecewise-constant generator: one
matrix with the laser off and one with the pump channels added.  Element
``(i, j)`` of a rate matrix is the rate from state ``j`` to state ``i`` in
1/ns; the generator carries ``-sum`` of each column on its diagonal so that
probability is conserved.  Propagation is exact through the matrix
exponential (scaling and squaring with a Pade approximant), which stays
stable across ns optical and ms phonon timescales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import expm
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, PreconditionError, StructuralError, UsageError
from .fit import Dataset, fit_model, get_model
from .rates import T1Params
from .units import boltzmann_argument, bose_occupation

_SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class LevelSystem:
    """Populations of ``n_states`` levels coupled by incoherent rates.

    Parameters
    ----------
    labels
        One name per state.
    rate_matrix
        Off-diagonal rates in 1/ns, ``(i, j)`` = rate ``j -> i``.  The
        diagonal must be zero.
    pump_channels
        ``(from, to, rate)`` triples active only while the laser is on.
    emission_weights
        Photon rate per unit population of each state.
    """

    labels: tuple[str, ...]
    rate_matrix: np.ndarray
    pump_channels: tuple[tuple[int, int, float], ...] = ()
    emission_weights: np.ndarray | None = None
    _gens: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.rate_matrix, dtype=float)
        n = len(self.labels)
        if m.shape != (n, n):
            raise StructuralError(f"rate matrix shape {m.shape} does not match {n} labels")
        if not np.all(np.isfinite(m)):
            raise StructuralError("rate matrix contains non-finite entries")
        if np.any(np.diag(m) != 0):
            raise StructuralError("rate matrix diagonal must be zero (it is filled from column sums)")
        if np.any(m < 0):
            raise StructuralError("rates must be non-negative")
        chans = tuple((int(a), int(b), float(r)) for a, b, r in self.pump_channels)
        for a, b, r in chans:
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise StructuralError(f"invalid pump channel {a} -> {b}")
            if not (r >= 0 and math.isfinite(r)):
                raise StructuralError(f"pump rate must be finite and >= 0, got {r}")
        w = np.zeros(n) if self.emission_weights is None else np.array(self.emission_weights, dtype=float)
        if w.shape != (n,) or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise StructuralError("emission weights must be n finite values >= 0")
        m.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "rate_matrix", m)
        object.__setattr__(self, "pump_channels", chans)
        object.__setattr__(self, "emission_weights", w)

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UsageError(f"no state labelled {label!r}; have {self.labels}") from None

    def generator(self, laser_on: bool = False) -> np.ndarray:
        key = bool(laser_on)
        if key not in self._gens:
            m = self.rate_matrix.copy()
            if key:
                for a, b, r in self.pump_channels:
                    m[b, a] += r
            g = m - np.diag(m.sum(axis=0))
            g.setflags(write=False)
            self._gens[key] = g
        return self._gens[key]

    def with_rate(self, source: int, target: int, rate: float) -> "LevelSystem":
        m = self.rate_matrix.copy()
        m[target, source] = rate
        return replace(self, rate_matrix=m)

    def with_pump_rate(self, rate: float) -> "LevelSystem":
        return replace(self, pump_channels=tuple((a, b, rate) for a, b, _ in self.pump_channels))

    def intensity(self, populations) -> np.ndarray:
        return np.asarray(populations) @ self.emission_weights


@dataclass(frozen=True)
class PulseSequence:
    """Laser on/off segments and the output sampling step (ns)."""

    segments: tuple[tuple[float, bool], ...]
    time_resolution: float

    def __post_init__(self):
        segs = tuple((float(d), bool(on)) for d, on in self.segments)
        if not segs:
            raise UsageError("pulse sequence needs at least one segment")
        if any(not (d > 0 and math.isfinite(d)) for d, _ in segs):
            raise UsageError("segment durations must be finite and > 0")
        shortest = min(d for d, _ in segs)
        if not self.time_resolution > 0 or self.time_resolution > shortest / 10 * (1 + 1e-12):
            raise UsageError(
                f"time resolution {self.time_resolution} ns must be in (0, shortest segment / 10 = {shortest / 10}]"
            )
        object.__setattr__(self, "segments", segs)

    @property
    def duration(self) -> float:
        return sum(d for d, _ in self.segments)

    @classmethod
    def pump_probe(cls, pulse_ns: float, wait_ns: float, time_resolution: float = 0.2) -> "PulseSequence":
        segs = [(pulse_ns, True)]
        if wait_ns > 0:
            segs.append((wait_ns, False))
        segs.append((pulse_ns, True))
        return cls(tuple(segs), time_resolution)


@dataclass
class FluorescenceTrace:
    times: np.ndarray
    intensity: np.ndarray
    segment_marks: np.ndarray
    populations: np.ndarray | None = None

    def __post_init__(self):
        if np.any(self.intensity < -1e-12 * max(1.0, float(np.max(np.abs(self.intensity), initial=0)))):
            raise StructuralError("negative fluorescence intensity")
        self.intensity = np.clip(self.intensity, 0.0, None)

    def to_csv_rows(self):
        return [("time_ns", "intensity")] + list(zip(self.times.tolist(), self.intensity.tolist()))


# ---------------------------------------------------------------------------


def _check_initial(system: LevelSystem, initial) -> np.ndarray:
    p = np.asarray(initial, dtype=float)
    if p.shape != (system.n_states,):
        raise UsageError(f"initial population must have {system.n_states} entries")
    if np.any(p < -_SIMPLEX_TOL) or abs(p.sum() - 1.0) > _SIMPLEX_TOL:
        raise PreconditionError("initial population is not on the probability simplex")
    return p


def stationary_state(system: LevelSystem, laser_on: bool = False) -> np.ndarray:
    """Unique stationary populations of the generator.

    The state graph must have exactly one closed communicating class; the
    null vector is solved on that class and every transient state gets
    exactly zero population.

    Raises :class:`StructuralError` when the stationary state is not unique
    (several closed classes, e.g. disconnected blocks).
    """
    g = system.generator(laser_on)
    n = system.n_states
    # edge j -> i wherever the rate g[i, j] is positive
    adj = (g.T > 0) & ~np.eye(n, dtype=bool)
    n_comp, comp = connected_components(adj, directed=True, connection="strong")
    closed = [c for c in range(n_comp) if not np.any(adj[comp == c][:, comp != c])]
    if len(closed) != 1:
        raise StructuralError(f"generator has {len(closed)} closed classes, so no unique stationary state")
    idx = np.flatnonzero(comp == closed[0])
    sub = g[np.ix_(idx, idx)]
    a = np.vstack([sub, np.ones((1, len(idx)))])
    b = np.zeros(len(idx) + 1)
    b[-1] = 1.0
    q = np.clip(np.linalg.lstsq(a, b, rcond=None)[0], 0.0, None)
    p = np.zeros(n)
    p[idx] = q / q.sum()
    return p


def evolve(system: LevelSystem, initial, duration: float, laser_on: bool = False) -> np.ndarray:
    """Populations after ``duration`` ns; ``duration = inf`` gives the stationary state."""
    p = _check_initial(system, initial)
    if duration < 0 or math.isnan(duration):
        raise UsageError(f"duration must be >= 0, got {duration}")
    if duration == 0:
        return p.copy()
    if math.isinf(duration):
        return stationary_state(system, laser_on)
    out = expm(system.generator(laser_on) * duration) @ p
    # expm is accurate to rounding; keep the result on the simplex
    out = np.clip(out, 0.0, None)
    return out / out.sum()


def simulate_pulse_sequence(system: LevelSystem, sequence: PulseSequence, initial) -> FluorescenceTrace:
    """Sample populations and fluorescence across a pulse sequence.

    Each segment is stepped with the cached propagator ``expm(M dt)``; a
    shorter final step lands exactly on the segment boundary.  Boundary
    times appear once.
    """
    p = _check_initial(system, initial)
    dt = sequence.time_resolution
    cache: dict[tuple[bool, float], np.ndarray] = {}

    def prop(on: bool, step: float) -> np.ndarray:
        key = (on, step)
        if key not in cache:
            cache[key] = expm(system.generator(on) * step)
        return cache[key]

    times = [0.0]
    pops = [p]
    marks = [0.0]
    t0 = 0.0
    for duration, on in sequence.segments:
        n_full = int(math.floor(duration / dt * (1 + 1e-12)))
        rest = duration - n_full * dt
        if rest <= 1e-9 * dt:
            rest = 0.0
        u = prop(on, dt)
        for k in range(1, n_full + 1):
            p = u @ p
            times.append(t0 + k * dt)
            pops.append(p)
        if rest > 0:
            p = prop(on, rest) @ p
            times.append(t0 + duration)
            pops.append(p)
        t0 += duration
        times[-1] = t0
        marks.append(t0)
    pop_arr = np.array(pops)
    return FluorescenceTrace(np.array(times), system.intensity(pop_arr), np.array(marks), pop_arr)


# ---------------------------------------------------------------------------
# SiV Lambda system on transition D

DARK, BRIGHT, EXCITED = "g-", "g+", "u-"

DEFAULT_PULSE_NS = 80.0
DEFAULT_PUMP_RATE = 0.5  # 1/ns, saturates within a few ns
DEFAULT_EXCITED_LIFETIME_NS = 1.7


def ground_rates_from_t1(t1_ns: float, splitting_ghz: float, temperature: float) -> tuple[float, float]:
    """``(gamma_up, gamma_down)`` with ``gamma_up + gamma_down = 1/t1`` and detailed balance."""
    if not t1_ns > 0:
        raise DomainError("T1 must be > 0")
    x = boltzmann_argument(splitting_ghz, temperature)
    if math.isinf(x):
        return 0.0, 1.0 / t1_ns
    up_frac = 1.0 / (1.0 + math.exp(x)) if x < 700 else 0.0
    total = 1.0 / t1_ns
    return total * up_frac, total * (1.0 - up_frac)


def lambda_system(
    gamma_up: float,
    gamma_down: float,
    *,
    pump_rate: float = DEFAULT_PUMP_RATE,
    excited_lifetime: float = DEFAULT_EXCITED_LIFETIME_NS,
    branching_to_bright: float = 0.5,
) -> LevelSystem:
    """Three-level Lambda system ``g-`` (dark), ``g+`` (bright), ``u-``.

    The laser on transition D couples ``g+`` and ``u-`` with equal
    absorption and stimulated-emission rates.  ``u-`` decays to ``g+``
    (line D) with probability ``branching_to_bright`` and to ``g-`` (line
    C) otherwise.  Fluorescence is proportional to the ``u-`` population.
    """
    if not 0 <= branching_to_bright <= 1:
        raise DomainError("branching ratio must lie in [0, 1]")
    if not excited_lifetime > 0:
        raise DomainError("excited lifetime must be > 0")
    k = 1.0 / excited_lifetime
    m = np.zeros((3, 3))
    m[1, 0] = gamma_up
    m[0, 1] = gamma_down
    m[1, 2] = k * branching_to_bright
    m[0, 2] = k * (1.0 - branching_to_bright)
    return LevelSystem(
        (DARK, BRIGHT, EXCITED),
        m,
        ((1, 2, pump_rate), (2, 1, pump_rate)),
        np.array([0.0, 0.0, k]),
    )


def siv_lambda_preset(
    t1_ns: float = 39.0,
    temperature: float = 5.0,
    splitting_ghz: float = 50.0,
    **kwargs,
) -> LevelSystem:
    """Lambda system whose ground block relaxes with time constant ``t1_ns``."""
    up, down = ground_rates_from_t1(t1_ns, splitting_ghz, temperature)
    return lambda_system(up, down, **kwargs)


def with_ground_rates(system: LevelSystem, gamma_up: float, gamma_down: float) -> LevelSystem:
    d, b = system.index(DARK), system.index(BRIGHT)
    return system.with_rate(d, b, gamma_up).with_rate(b, d, gamma_down)


def spin_block_system(gamma_up: float, gamma_down: float) -> LevelSystem:
    """Four ground states ``g-/g+`` x ``up/down`` with phonon rates only.

    Phonon transitions conserve spin, so the rate matrix is block diagonal
    in the two spin sectors.
    """
    labels = ("g-,up", "g+,up", "g-,down", "g+,down")
    m = np.zeros((4, 4))
    for lo, hi in ((0, 1), (2, 3)):
        m[hi, lo] = gamma_up
        m[lo, hi] = gamma_down
    return LevelSystem(labels, m)


# ---------------------------------------------------------------------------
# Pump-probe observables


def ground_relaxation_time(system: LevelSystem) -> float:
    """``1 / (gamma_up + gamma_down)`` of the ``g-/g+`` pair, in ns."""
    d, b = system.index(DARK), system.index(BRIGHT)
    return 1.0 / (system.rate_matrix[b, d] + system.rate_matrix[d, b])


def _excited_decay_rate(system: LevelSystem) -> float:
    e = system.index(EXCITED)
    return float(system.rate_matrix[:, e].sum())


@dataclass
class RecoveryResult:
    tau: np.ndarray
    height: np.ndarray
    t1: float
    t1_stderr: float
    first_peak: float  # a, leading-edge height from thermal equilibrium
    peak_offset: float  # ns after the pulse edge at which heights are read
    fit_mask: np.ndarray


def _leading_edge(system: LevelSystem, pulse_ns: float, resolution: float) -> tuple[float, float]:
    """Offset and height of the fluorescence maximum for a pulse from thermal equilibrium."""
    thermal = stationary_state(system, laser_on=False)
    seq = PulseSequence(((pulse_ns, True),), resolution)
    tr = simulate_pulse_sequence(system, seq, thermal)
    i = int(np.argmax(tr.intensity))
    return float(tr.times[i]), float(tr.intensity[i])


def peak_height_recovery(
    system: LevelSystem,
    tau_grid,
    *,
    pulse_ns: float = DEFAULT_PULSE_NS,
    resolution: float = 0.02,
    settle_lifetimes: float = 20.7,
) -> RecoveryResult:
    """Second-pulse peak height ``h(tau)`` and the fitted recovery time.

    The first pulse starts from thermal equilibrium and lasts ``pulse_ns``.
    After a dark wait ``tau`` the second pulse's fluorescence is read at the
    offset where the first pulse peaked, which makes ``h`` linear in the
    ground populations at the start of the second pulse.

    Right after the pump the excited state still empties into both ground
    states, adding a component with the excited lifetime.  The
    single-exponential fit therefore uses only waits longer than
    ``settle_lifetimes`` excited lifetimes (e^-20.7 ~ 1e-9).

    Raises
    ------
    UsageError
        Fewer than 4 waits, or a grid spanning less than twice the expected
        relaxation time.
    """
    tau = np.asarray(tau_grid, dtype=float)
    if tau.ndim != 1 or len(tau) < 4:
        raise UsageError("tau grid needs at least 4 points")
    if np.any(tau < 0) or np.any(np.diff(tau) <= 0):
        raise UsageError("tau grid must be non-negative and strictly increasing")
    t1_expected = ground_relaxation_time(system)
    if tau[-1] - tau[0] < 2 * t1_expected:
        raise UsageError(
            f"tau grid spans {tau[-1] - tau[0]:g} ns, less than two expected relaxation times ({2 * t1_expected:g} ns)"
        )
    offset, a = _leading_edge(system, pulse_ns, resolution)
    thermal = stationary_state(system, laser_on=False)
    after_pump = evolve(system, thermal, pulse_ns, laser_on=True)
    read = expm(system.generator(True) * offset)
    w = system.emission_weights @ read
    dark = system.generator(False)
    heights = np.array([w @ (expm(dark * t) @ after_pump) for t in tau])

    tau_min = settle_lifetimes / _excited_decay_rate(system)
    mask = tau >= tau_min
    if mask.sum() < 4:
        raise UsageError(f"need at least 4 waits beyond {tau_min:.3g} ns for the recovery fit")
    spec = get_model("exp_recovery")
    span = heights[mask]
    init = (float(span[-1]), float(span[0]), t1_expected)
    spec = spec.with_bounds(initial=init)
    data = Dataset(tau[mask], span, np.full(mask.sum(), max(float(np.abs(span).max()), 1e-300)))
    res = fit_model(spec, data, n_starts=0)
    return RecoveryResult(
        tau,
        heights,
        res.params["t1"],
        res.stderr["t1"],
        a,
        offset,
        mask,
    )


@dataclass(frozen=True)
class ContrastPoint:
    temperature: float
    t1: float  # ns, 1 / (gamma_up + gamma_down)
    bright_fraction: float  # h(0) / 2a
    contrast: float  # 1 - h(0) / 2a


def steady_state_contrast(
    system: LevelSystem,
    temperature_grid,
    calib: T1Params,
    *,
    pulse_ns: float = DEFAULT_PULSE_NS,
    resolution: float = 0.02,
) -> list[ContrastPoint]:
    """Pumped steady state relative to the thermal first-pulse peak.

    At each temperature the ground rates follow the one-phonon law of
    ``calib``: ``gamma_up = A n(T - T_off)`` and ``gamma_down = A (n + 1)``.
    ``h(0)`` is the laser-on steady-state fluorescence and ``a`` the first
    pulse's leading-edge peak from thermal equilibrium.  ``h(0)/2a`` tends
    to 1/2 when thermalization dominates the pump and to 0 when pumping
    wins, so ``contrast = 1 - h(0)/2a`` runs from 1 (fully polarised) down
    to 1/2.
    """
    temps = np.asarray(temperature_grid, dtype=float)
    if temps.ndim != 1 or len(temps) == 0:
        raise UsageError("temperature grid must be a non-empty 1-D sequence")
    out = []
    for t in temps:
        t_eff = t - calib.temp_offset
        if t_eff <= 0:
            raise DomainError(f"T = {t} K is not above the calibration offset {calib.temp_offset} K")
        n = float(bose_occupation(calib.splitting, t_eff))
        sys_t = with_ground_rates(system, calib.prefactor * n, calib.prefactor * (n + 1.0))
        _, a = _leading_edge(sys_t, pulse_ns, resolution)
        h0 = float(sys_t.intensity(stationary_state(sys_t, laser_on=True)))
        frac = h0 / (2.0 * a)
        out.append(ContrastPoint(float(t), float(ground_relaxation_time(sys_t)), frac, 1.0 - frac))
    return out
