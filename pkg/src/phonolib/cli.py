"""Command-line interface: ``phonolib <command> ...``.

Exit status is 0 on success, 1 for usage, configuration or input errors
and 2 for numerical or fit failures.  Series go to CSV and reports to JSON;
each output file gets a ``<name>.manifest.json`` next to it.  Without
``--out`` tables are printed to standard output and no manifest is written.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import io
from .errors import (
    ConfigError,
    DatasetError,
    DomainError,
    PhonolibError,
    PreconditionError,
    StructuralError,
    UsageError,
    ValidityWarning,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_range(text: str) -> np.ndarray:
    """``start:stop:step`` (inclusive of ``stop`` when it lies on the grid) or a comma list."""
    text = text.strip()
    if ":" not in text:
        try:
            vals = [float(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"cannot parse {text!r} as a number list") from None
        if not vals:
            raise UsageError("empty value list")
        return np.array(vals)
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range {text!r} must be start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"cannot parse range {text!r}") from None
    if not step > 0 or stop < start:
        raise UsageError(f"range {text!r} needs step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


# ---------------------------------------------------------------------------


class _Run:
    """Collects outputs and writes manifests."""

    def __init__(self, argv, cfg, inputs=()):
        self.argv = list(argv)
        self.cfg = cfg
        self.inputs = [p for p in inputs if p]
        inputs_for_manifest = list(self.inputs)
        if cfg.source:
            inputs_for_manifest.append(cfg.source)
        self.manifest = io.RunManifest.create(["phonolib", *self.argv], cfg.hash, inputs_for_manifest)

    def table(self, out, header, rows):
        if out is None:
            sys.stdout.write(io.csv_text(header, rows))
            return
        digest = io.write_csv(out, header, rows)
        self._finish(out, digest)

    def report(self, out, obj):
        if out is None:
            sys.stdout.write(io.json_text(obj))
            return
        digest = io.write_json(out, obj)
        self._finish(out, digest)

    def _finish(self, out, digest):
        self.manifest.add_output(out, digest)
        self.manifest.write(io.manifest_path(out))


def _config(args):
    return cfgmod.load_config(args.config)


def cmd_predict(args, argv) -> int:
    from .rates import linewidth_model, t1_model, t1_rate
    from .shifts import mott_seitz_lifetime, thermal_expansion_shift
    from .spectra import line_redshift, thermal_splittings

    cfg = _config(args)
    temps = parse_range(args.t_range)
    if np.any(temps < 0):
        raise UsageError("temperatures must be >= 0")
    run = _Run(argv, cfg)
    q = args.quantity
    if q == "linewidth":
        params = cfgmod.build_linewidth_params(cfg, upper_branch=args.branch == "upper")
        if np.any(temps <= 0):
            raise UsageError("linewidth needs T > 0")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            vals = linewidth_model(params, temps)
        run.table(args.out, ["temperature_k", "linewidth_mhz"], zip(temps, np.atleast_1d(vals)))
    elif q == "t1":
        p = cfgmod.build_t1_params(cfg)
        rows = [(t, t1_model(p, t), float(t1_rate(p, t))) for t in temps]
        run.table(args.out, ["temperature_k", "t1_ns", "gamma_up_per_ns"], rows)
    elif q == "lifetime":
        ms = cfgmod.build_mott_seitz(cfg)
        run.table(args.out, ["temperature_k", "lifetime_ns"], zip(temps, np.atleast_1d(mott_seitz_lifetime(ms, temps))))
    elif q == "line-shift":
        models = cfgmod.build_spectral_models(cfg)
        exp = cfgmod.build_expansion_model(cfg)
        rows = [(t, line_redshift(models, float(t)), float(thermal_expansion_shift(exp, t))) for t in temps]
        run.table(args.out, ["temperature_k", "line_shift_ghz", "expansion_shift_mev"], rows)
    elif q == "splitting":
        fs = cfgmod.build_fine_structure(cfg)
        models = cfgmod.build_spectral_models(cfg)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            rows = [(t, *thermal_splittings(fs, models, float(t))) for t in temps]
        run.table(args.out, ["temperature_k", "ground_splitting_ghz", "excited_splitting_ghz"], rows)
    return EXIT_OK


def cmd_simulate(args, argv) -> int:
    from .dynamics import PulseSequence, peak_height_recovery, simulate_pulse_sequence, stationary_state

    cfg = _config(args)
    system = cfgmod.build_lambda_system(cfg)
    if args.pump_rate is not None:
        system = system.with_pump_rate(args.pump_rate)
    lam = cfg["lambda_system"]
    run = _Run(argv, cfg)
    if args.trace_wait is not None:
        seq = PulseSequence.pump_probe(lam["pulse_ns"], args.trace_wait, args.trace_resolution)
        tr = simulate_pulse_sequence(system, seq, stationary_state(system))
        run.table(args.out, ["time_ns", "intensity"], zip(tr.times, tr.intensity))
        return EXIT_OK
    taus = parse_range(args.tau)
    rec = peak_height_recovery(system, taus, pulse_ns=lam["pulse_ns"], resolution=lam["resolution_ns"])
    run.manifest.extra = {"fitted_t1_ns": rec.t1, "fitted_t1_stderr_ns": rec.t1_stderr, "first_peak": rec.first_peak}
    print(f"fitted T1 = {rec.t1:.9g} +/- {rec.t1_stderr:.3g} ns", file=sys.stderr)
    run.table(args.out, ["tau_ns", "height", "in_fit"], zip(rec.tau, rec.height, rec.fit_mask.astype(int)))
    return EXIT_OK


def cmd_synth(args, argv) -> int:
    from .spectra import count_resolvable_peaks, fit_lorentzians, synthesize_spectrum

    cfg = _config(args)
    fs = cfgmod.build_fine_structure(cfg)
    models = cfgmod.build_spectral_models(cfg)
    grid = parse_range(args.grid) if args.grid else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        spec = synthesize_spectrum(fs, models, args.temperature, grid)
    prominence = args.prominence if args.prominence is not None else cfg.get("fine_structure", "prominence_ratio")
    n = count_resolvable_peaks(spec, prominence)
    print(f"resolvable peaks at {args.temperature:g} K: {n}", file=sys.stderr)
    run = _Run(argv, cfg)
    run.manifest.extra = {"resolvable_peaks": n}
    run.table(args.out, ["offset_ghz", "intensity"], zip(spec.grid, spec.intensity))
    if args.fit_peaks:
        pf = fit_lorentzians(spec, args.fit_peaks)
        run.report(args.peaks_out, pf.to_dict())
    return EXIT_OK


def _resolve_model(model_id: str, cfg):
    from .fit import get_model

    context = {}
    base = model_id
    if "[" in model_id:
        base, _, arg = model_id.partition("[")
        arg = arg.rstrip("]")
        if base != "power_law":
            raise UsageError(f"only power_law takes a fixed exponent, got {model_id!r}")
        try:
            context["exponent"] = float(arg)
        except ValueError:
            raise UsageError(f"bad exponent in {model_id!r}") from None
    if base == "line_shift_quadrature":
        context["debye_temp"] = cfg.get("constants", "debye_temp_k")
    elif base == "thermal_expansion":
        context["model"] = cfgmod.build_expansion_model(cfg)
    elif base == "lorentzian_multi":
        raise UsageError("lorentzian_multi is fitted through 'synth spectrum --fit-peaks'")
    elif base == "linewidth":
        context.update(
            splitting=cfg.get("doublets", "excited_splitting_ghz"),
            alpha=cfg.get("mott_seitz", "alpha_ratio"),
            activation=cfg.get("mott_seitz", "activation_mev"),
            debye_temp=cfg.get("constants", "debye_temp_k"),
        )
    return get_model(base, **context)


def cmd_fit(args, argv) -> int:
    from .fit import fit_model

    cfg = _config(args)
    spec = _resolve_model(args.model, cfg)
    data = io.load_dataset(args.data, (spec.x_unit, None) if args.check_units else None)
    res = fit_model(spec, data, n_starts=args.starts, seed=args.seed)
    run = _Run(argv, cfg, [args.data])
    run.report(args.out, res.to_dict())
    return EXIT_OK


def cmd_compare(args, argv) -> int:
    from .fit import compare_models

    cfg = _config(args)
    ids = [m.strip() for m in args.models.split(",") if m.strip()]
    if len(ids) < 1:
        raise UsageError("--models needs at least one model id")
    specs = []
    for m in ids:
        s = _resolve_model(m, cfg)
        if "[" in m:
            object.__setattr__(s, "id", m)
        specs.append(s)
    data = io.load_dataset(args.data)
    rep = compare_models(specs, data, n_starts=args.starts, seed=args.seed)
    run = _Run(argv, cfg, [args.data])
    run.report(args.out, rep.to_dict())
    return EXIT_OK


def cmd_budget(args, argv) -> int:
    from .rates import coherence_budget

    cfg = _config(args)
    rows = coherence_budget(
        cfgmod.build_budget_bath(cfg),
        parse_range(args.splittings),
        parse_range(args.temperatures),
        cfgmod.build_budget_calibration(cfg),
    )
    run = _Run(argv, cfg)
    header = ["splitting_ghz", "temperature_k", "inv_gamma_up_ns", "inv_gamma_down_ns", "t1_ns", "t2_bound_ns"]
    run.table(
        args.out,
        header,
        [(r.splitting, r.temperature, r.inv_gamma_up, r.inv_gamma_down, r.t1, r.t2_upper_bound) for r in rows],
    )
    return EXIT_OK


def cmd_config(args, argv) -> int:
    sys.stdout.write(cfgmod.default_config_text())
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="phonolib", description="Phonon-limited dynamics of orbital doublets.")
    from . import __version__

    p.add_argument("--version", action="version", version=f"phonolib {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, out_help="output file (default: stdout)"):
        sp.add_argument("--config", help=f"TOML config (default: ${cfgmod.ENV_VAR} or built-in)")
        sp.add_argument("--out", help=out_help)

    sp = sub.add_parser("predict", help="evaluate a temperature law on a grid")
    sp.add_argument("quantity", choices=["linewidth", "t1", "lifetime", "line-shift", "splitting"])
    sp.add_argument("--t-range", required=True, help="temperatures in K, start:stop:step or a,b,c")
    sp.add_argument("--branch", choices=["lower", "upper"], default="lower", help="excited branch for linewidth")
    common(sp)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("simulate", help="rate-equation simulations")
    sp.add_argument("experiment", choices=["pump-probe"])
    sp.add_argument("--tau", default="0:200:5", help="dark waits in ns")
    sp.add_argument("--pump-rate", type=float, help="override pump rate (1/ns)")
    sp.add_argument("--trace-wait", type=float, help="write the PL trace for one wait (ns) instead of h(tau)")
    sp.add_argument("--trace-resolution", type=float, default=0.2, help="trace sampling step (ns)")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("synth", help="synthesize data")
    sp.add_argument("kind", choices=["spectrum"])
    sp.add_argument("--temperature", type=float, required=True, help="K")
    sp.add_argument("--grid", help="frequency offsets in GHz, start:stop:step")
    sp.add_argument("--prominence", type=float, help="peak prominence as a fraction of the maximum")
    sp.add_argument("--fit-peaks", type=int, default=0, help="also fit this many Lorentzians")
    sp.add_argument("--peaks-out", help="JSON report for --fit-peaks")
    common(sp)
    sp.set_defaults(func=cmd_synth)

    for name, func, helptext in (("fit", cmd_fit, "fit one model"), ("compare-models", cmd_compare, "rank models by AICc")):
        sp = sub.add_parser(name, help=helptext)
        if name == "fit":
            sp.add_argument("--model", required=True, help="model id, e.g. mott_seitz or power_law[3]")
            sp.add_argument("--check-units", action="store_true", help="require the model's x unit in the header")
        else:
            sp.add_argument("--models", required=True, help="comma-separated model ids")
        sp.add_argument("--data", required=True, help="CSV x,value[,sigma] with unit-suffixed header")
        sp.add_argument("--starts", type=int, default=8, help="Latin-hypercube starts")
        sp.add_argument("--seed", type=int, default=0)
        common(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("budget", help="relaxation-time budget over splittings and temperatures")
    sp.add_argument("--splittings", default="50", help="GHz")
    sp.add_argument("--temperatures", default="0.26,1,4", help="K")
    common(sp)
    sp.set_defaults(func=cmd_budget)

    sp = sub.add_parser("config", help="print the default configuration")
    sp.set_defaults(func=cmd_config)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("a command is required; see --help")
        return args.func(args, argv)
    except (UsageError, ConfigError, DatasetError, DomainError, PreconditionError, StructuralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PhonolibError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
