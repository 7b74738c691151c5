"""File formats: datasets, tables, reports and run manifests.

All text files are UTF-8 with LF line endings.  CSV files may carry ``#``
comment lines anywhere and must have one header row.  Header names end in
a unit suffix (``temperature_k``, ``linewidth_mhz``, ``sigma_mhz``); the
suffix after the last underscore is the unit.  Numbers are written with 9
significant digits so that identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
import warnings
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DatasetError
from .fit.dataset import Dataset

SIG_DIGITS = 9


def fmt(value) -> str:
    """Fixed 9-significant-digit representation used in every output table."""
    if isinstance(value, str):
        return value
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    out = f"{v:.{SIG_DIGITS}g}"
    return "0" if out == "-0" else out


def _round_floats(obj):
    if isinstance(obj, float) or isinstance(obj, np.floating):
        v = float(obj)
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.{SIG_DIGITS}g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_round_floats(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(x) for x in obj]
    return obj


def atomic_write_text(path, text: str) -> str:
    """Write via a temporary file and rename; returns the SHA-256 of the bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = text.encode("utf-8")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return hashlib.sha256(data).hexdigest()


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> str:
    return atomic_write_text(path, csv_text(header, rows))


def json_text(obj) -> str:
    return json.dumps(_round_floats(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> str:
    return atomic_write_text(path, json_text(obj))


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------------------
# Datasets


def column_unit(name: str) -> str | None:
    name = name.strip().lower()
    return name.rsplit("_", 1)[1] if "_" in name else None


def _read_rows(path) -> list[tuple[int, list[str]]]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            out.append((lineno, [c.strip() for c in next(csv.reader([s]))]))
    return out


def load_dataset(path, expected_units: tuple[str | None, str | None] | None = None) -> Dataset:
    """Read an ``x,value[,sigma]`` CSV into a :class:`Dataset`.

    ``expected_units`` is ``(x_unit, y_unit)``; ``None`` entries skip the
    check.  Rows sharing an x value are merged by inverse-variance
    weighting (plain mean without a sigma column) with a warning.

    Raises
    ------
    DatasetError
        Missing header, malformed row (with its line number), unit mismatch
        (naming both units) or non-positive sigma.
    """
    rows = _read_rows(path)
    if not rows:
        raise DatasetError(f"{path}: no header row")
    head_line, header = rows[0]
    if len(header) not in (2, 3) or any(_is_number(h) for h in header):
        raise DatasetError(f"{path}:{head_line}: expected a header 'x_unit,value_unit[,sigma_unit]', got {header}")
    units = [column_unit(h) for h in header]
    if len(header) == 3 and units[2] != units[1]:
        raise DatasetError(f"{path}:{head_line}: sigma unit {units[2]!r} differs from value unit {units[1]!r}")
    if expected_units is not None:
        for label, want, got in (("x", expected_units[0], units[0]), ("value", expected_units[1], units[1])):
            if want is not None and (got or "").lower() != want.lower():
                raise DatasetError(f"{path}: {label} column unit {got!r} does not match expected {want!r}")
    xs, ys, ss = [], [], []
    for lineno, cells in rows[1:]:
        if len(cells) != len(header):
            raise DatasetError(f"{path}:{lineno}: expected {len(header)} columns, got {len(cells)}")
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            raise DatasetError(f"{path}:{lineno}: cannot parse {','.join(cells)!r} as numbers") from None
        if not all(math.isfinite(v) for v in vals):
            raise DatasetError(f"{path}:{lineno}: non-finite value")
        if len(vals) == 3 and not vals[2] > 0:
            raise DatasetError(f"{path}:{lineno}: sigma must be > 0")
        xs.append(vals[0])
        ys.append(vals[1])
        if len(vals) == 3:
            ss.append(vals[2])
    if not xs:
        raise DatasetError(f"{path}: no data rows")
    x, y = np.array(xs), np.array(ys)
    s = np.array(ss) if ss else None
    x, y, s = merge_duplicates(x, y, s, source=str(path))
    meta = {"x_unit": units[0], "y_unit": units[1], "source": str(path), "columns": header}
    return Dataset(x, y, s, meta)


def merge_duplicates(x, y, sigma=None, source: str = "data"):
    """Combine repeated x values: inverse-variance mean and ``(sum 1/s^2)^-1/2``."""
    uniq, inv, counts = np.unique(x, return_inverse=True, return_counts=True)
    if len(uniq) == len(x):
        return x, y, sigma
    dup = uniq[counts > 1]
    warnings.warn(f"{source}: averaged duplicate x values {dup.tolist()}", UserWarning, stacklevel=3)
    if sigma is None:
        my = np.bincount(inv, weights=y) / counts
        return uniq, my, None
    w = 1.0 / sigma**2
    sw = np.bincount(inv, weights=w)
    my = np.bincount(inv, weights=w * y) / sw
    return uniq, my, 1.0 / np.sqrt(sw)


def write_dataset(path, data: Dataset, x_name: str = "x", y_name: str = "y") -> str:
    xu, yu = data.x_unit, data.y_unit
    xh = f"{x_name}_{xu}" if xu else x_name
    yh = f"{y_name}_{yu}" if yu else y_name
    if data.unweighted:
        return write_csv(path, [xh, yh], zip(data.x, data.y))
    sh = f"sigma_{yu}" if yu else "sigma"
    return write_csv(path, [xh, yh, sh], zip(data.x, data.y, data.sigma))


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


# ---------------------------------------------------------------------------
# Packaged tables


def load_expansion_table(path=None) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``temperature_k,<coefficient>_per_k`` table (packaged diamond data by default)."""
    if path is None:
        ref = resources.files("phonolib") / "data" / "diamond_expansion.csv"
        with resources.as_file(ref) as p:
            rows = _read_rows(p)
        label = "diamond_expansion.csv"
    else:
        rows = _read_rows(path)
        label = str(path)
    if not rows:
        raise DatasetError(f"{label}: empty table")
    t, e = [], []
    for lineno, cells in rows[1:]:
        try:
            a, b = (float(c) for c in cells)
        except ValueError:
            raise DatasetError(f"{label}:{lineno}: malformed row {cells}") from None
        t.append(a)
        e.append(b)
    return np.array(t), np.array(e)


# ---------------------------------------------------------------------------
# Run manifests


@dataclass
class RunManifest:
    command: list[str]
    config_hash: str
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    version: str = ""
    timestamp: str = ""
    extra: dict = field(default_factory=dict)

    @classmethod
    def create(cls, command, config_hash: str, inputs=(), extra=None) -> "RunManifest":
        from . import __version__

        return cls(
            command=list(command),
            config_hash=config_hash,
            inputs={str(p): file_digest(p) for p in inputs},
            version=__version__,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            extra=dict(extra or {}),
        )

    def add_output(self, path, digest: str) -> None:
        self.outputs[str(path)] = digest

    def write(self, path) -> str:
        return write_json(path, asdict(self))

    def verify(self) -> dict[str, bool]:
        """Re-hash recorded inputs and outputs; ``True`` where the digest still matches."""
        out = {}
        for p, d in {**self.inputs, **self.outputs}.items():
            out[p] = os.path.exists(p) and file_digest(p) == d
        return out


def manifest_path(output) -> Path:
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")
