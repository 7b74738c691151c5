"""TOML configuration with strict, unit-suffixed keys.

Grammar: TOML tables from the fixed set below, each holding ``key = value``
pairs.  Every key ends in its unit (``_ghz``, ``_k``, ``_ns``, ``_mev``,
``_mhz``, ``_per_ns``, ``_per_ns_ghz3``, ``_gpa``, ``_mev_per_gpa``, ``_nm``), in
``_ratio`` for dimensionless numbers, or in ``_path`` for file paths.
Unknown tables or keys are rejected with the closest valid name suggested.
Missing keys take the defaults listed in :data:`SCHEMA`.

The default path comes from the ``PHONOLIB_CONFIG`` environment variable.
"""

from __future__ import annotations

import copy
import difflib
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import presets
from .doublet import EXCITED_SPLITTING_GHZ, GROUND_SPLITTING_GHZ
from .errors import ConfigError
from .units import DEFAULT_DEBYE_TEMP_K

ENV_VAR = "PHONOLIB_CONFIG"

DIAMOND_BULK_MODULUS_GPA = 442.0

SCHEMA: dict[str, dict[str, object]] = {
    "constants": {
        "debye_temp_k": DEFAULT_DEBYE_TEMP_K,
    },
    "bath": {
        "t1_prefactor_per_ns": presets.T1_FIT.prefactor,
        "t1_offset_k": presets.T1_FIT.temp_offset,
        "budget_prefactor_per_ns": presets.BUDGET_CALIBRATION.prefactor,
        "budget_anchor_splitting_ghz": presets.BUDGET_CALIBRATION.splitting,
        "linewidth_chi_rho_single_per_ns_ghz3": presets.LINEWIDTH_CHI_RHO_SINGLE,
        "linewidth_chi_rho_dephasing_per_ns_ghz3": presets.LINEWIDTH_CHI_RHO_DEPHASING,
    },
    "doublets": {
        "ground_splitting_ghz": GROUND_SPLITTING_GHZ,
        "excited_splitting_ghz": EXCITED_SPLITTING_GHZ,
    },
    "mott_seitz": {
        "linewidth_floor_mhz": presets.LINEWIDTH_FLOOR_MHZ,
        "alpha_ratio": presets.MOTT_SEITZ_ALPHA,
        "activation_mev": presets.MOTT_SEITZ_ACTIVATION_MEV,
    },
    "expansion": {
        "bulk_modulus_gpa": DIAMOND_BULK_MODULUS_GPA,
        "pressure_coeff_mev_per_gpa": 1.0,
        "table_path": "",
    },
    "lambda_system": {
        "t1_ns": 39.0,
        "temperature_k": 5.0,
        "excited_lifetime_ns": 1.7,
        "pump_rate_per_ns": 0.5,
        "branching_to_bright_ratio": 0.5,
        "pulse_ns": 80.0,
        "resolution_ns": 0.02,
    },
    "fine_structure": {
        "center_wavelength_nm": 737.0,
        "resolution_ghz": 16.0,
        "prominence_ratio": 0.05,
        "splitting_reduction_150k_ratio": 0.1,
        "line_shift_300k_ghz": -81.6,
    },
}

UNIT_SUFFIXES = (
    "_ghz", "_k", "_ns", "_mev", "_mhz", "_per_ns", "_per_ns_ghz3", "_gpa", "_mev_per_gpa", "_nm", "_ratio", "_path",
)


def _suggest(name: str, options) -> str:
    close = difflib.get_close_matches(name, list(options), n=1, cutoff=0.5)
    return f"; did you mean {close[0]!r}?" if close else ""


@dataclass
class Config:
    values: dict[str, dict[str, object]]
    source: str | None = None

    def __getitem__(self, section: str) -> dict[str, object]:
        return self.values[section]

    def get(self, section: str, key: str):
        return self.values[section][key]

    @property
    def hash(self) -> str:
        blob = json.dumps(self.values, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    def override(self, section: str, key: str, value) -> "Config":
        vals = copy.deepcopy(self.values)
        if section not in vals:
            raise ConfigError(f"unknown section [{section}]{_suggest(section, vals)}")
        if key not in vals[section]:
            raise ConfigError(f"unknown key {section}.{key}{_suggest(key, vals[section])}")
        vals[section][key] = _coerce(section, key, value)
        return Config(vals, self.source)


def _coerce(section: str, key: str, value):
    default = SCHEMA[section][key]
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{section}.{key} must be a string")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(f"{section}.{key} must be finite")
    return v


def parse_config(doc: dict, source: str | None = None) -> Config:
    values = copy.deepcopy(SCHEMA)
    for section, body in doc.items():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]{_suggest(section, SCHEMA)}")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key, value in body.items():
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}{_suggest(key, SCHEMA[section])}")
            values[section][key] = _coerce(section, key, value)
    base = Path(source).parent if source else Path.cwd()
    tp = values["expansion"]["table_path"]
    if tp and not Path(tp).is_absolute():
        values["expansion"]["table_path"] = str((base / tp).resolve())
    return Config(values, source)


def load_config(path=None) -> Config:
    """Load ``path``, else ``$PHONOLIB_CONFIG``, else the built-in defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return Config(copy.deepcopy(SCHEMA))
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(doc, str(path))


def default_config_text() -> str:
    """The full default document, suitable as a starting config file."""
    lines = []
    for section, body in SCHEMA.items():
        lines.append(f"[{section}]")
        for key, value in body.items():
            lines.append(f"{key} = {json.dumps(value) if isinstance(value, str) else repr(float(value))}")
        lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Builders


def build_t1_params(cfg: Config):
    from .rates import T1Params

    return T1Params(
        cfg.get("bath", "t1_prefactor_per_ns"),
        cfg.get("doublets", "ground_splitting_ghz"),
        cfg.get("bath", "t1_offset_k"),
    )


def build_budget_calibration(cfg: Config):
    from .rates import T1Params

    return T1Params(cfg.get("bath", "budget_prefactor_per_ns"), cfg.get("bath", "budget_anchor_splitting_ghz"))


def build_budget_bath(cfg: Config):
    from .units import PhononBath

    calib = build_budget_calibration(cfg)
    chi = calib.prefactor / (2 * math.pi * calib.splitting**3)
    return PhononBath(chi, 0.0, cfg.get("constants", "debye_temp_k"))


def build_mott_seitz(cfg: Config):
    from .shifts import MottSeitzParams

    return MottSeitzParams(
        presets.tau0_from_floor(cfg.get("mott_seitz", "linewidth_floor_mhz")),
        cfg.get("mott_seitz", "alpha_ratio"),
        cfg.get("mott_seitz", "activation_mev"),
    )


def build_linewidth_params(cfg: Config, upper_branch: bool = False):
    from .doublet import OrbitalDoublet
    from .rates import LinewidthParams
    from .units import PhononBath

    ms = build_mott_seitz(cfg)
    return LinewidthParams(
        gamma_r=1.0 / ms.tau0,
        nr_model=ms,
        doublet_u=OrbitalDoublet(cfg.get("doublets", "excited_splitting_ghz")),
        bath=PhononBath(
            cfg.get("bath", "linewidth_chi_rho_single_per_ns_ghz3"), 0.0, cfg.get("constants", "debye_temp_k")
        ),
        dephasing_chi_rho=cfg.get("bath", "linewidth_chi_rho_dephasing_per_ns_ghz3"),
        upper_branch=upper_branch,
    )


def build_expansion_model(cfg: Config):
    from .io import load_expansion_table
    from .shifts import ExpansionModel

    path = cfg.get("expansion", "table_path") or None
    return ExpansionModel(
        cfg.get("expansion", "pressure_coeff_mev_per_gpa"),
        cfg.get("expansion", "bulk_modulus_gpa"),
        load_expansion_table(path),
    )


def build_lambda_system(cfg: Config):
    from .dynamics import siv_lambda_preset

    s = cfg["lambda_system"]
    return siv_lambda_preset(
        s["t1_ns"],
        s["temperature_k"],
        cfg.get("doublets", "ground_splitting_ghz"),
        pump_rate=s["pump_rate_per_ns"],
        excited_lifetime=s["excited_lifetime_ns"],
        branching_to_bright=s["branching_to_bright_ratio"],
    )


def build_fine_structure(cfg: Config):
    from .spectra import FineStructure
    from .units import wavelength_nm_to_ghz

    return FineStructure(
        wavelength_nm_to_ghz(cfg.get("fine_structure", "center_wavelength_nm")),
        cfg.get("doublets", "ground_splitting_ghz"),
        cfg.get("doublets", "excited_splitting_ghz"),
    )


def build_spectral_models(cfg: Config):
    from .spectra import SpectralModels
    from .units import GHZ_PER_K

    fs = cfg["fine_structure"]
    chi = fs["splitting_reduction_150k_ratio"] / ((2 * math.pi**2 / 3) * (150.0 * GHZ_PER_K) ** 2)
    return SpectralModels(
        linewidth_lower=build_linewidth_params(cfg),
        linewidth_upper=build_linewidth_params(cfg, upper_branch=True),
        splitting_chi_rho=chi,
        line_shift_300k=fs["line_shift_300k_ghz"],
        debye_temp=cfg.get("constants", "debye_temp_k"),
        resolution_ghz=fs["resolution_ghz"],
    )
