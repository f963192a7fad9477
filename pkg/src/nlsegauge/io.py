"""File formats: JSON for coefficients, gauges and reports; CSV for fields."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .coeffs import CoefficientVector, GaugeParams
from .errors import PreconditionError
from .fields import Grid, WaveField

# Reports are written at fixed precision so identical runs give identical bytes.
REPORT_DIGITS = 12
FIELD_DIGITS = 17


def _load_json(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise PreconditionError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"{path}: malformed JSON ({exc})") from None
    if not isinstance(data, dict):
        raise PreconditionError(f"{path}: expected a JSON object")
    return data


def _numbers(data, path):
    for key, value in data.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise PreconditionError(f"{path}: value for {key!r} is not a number")
        if not math.isfinite(value):
            raise PreconditionError(f"{path}: value for {key!r} is not finite")
    return data


def load_coefficients(path):
    """Coefficient file; keys nu1, nu2, nu6, mu1..mu12, missing keys are 0."""
    return CoefficientVector.from_dict(_numbers(_load_json(path), path))


def load_gauge(path):
    """Gauge file with keys gamma, lambda, eta."""
    return GaugeParams.from_dict(_numbers(_load_json(path), path))


def _round(obj, digits):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (float, np.floating)):
        x = float(obj) + 0.0  # folds -0.0 into 0.0
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{digits}g}")
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _round(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_round(v, digits) for v in obj]
    if hasattr(obj, "as_dict"):
        return _round(obj.as_dict(), digits)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, digits=REPORT_DIGITS):
    """Deterministic JSON: fixed significant digits, keys in insertion order."""
    return json.dumps(_round(obj, digits), indent=2) + "\n"


def write_json(obj, path, digits=REPORT_DIGITS):
    Path(path).write_text(dumps(obj, digits))


def _fmt(x):
    return f"{x:.{FIELD_DIGITS}g}"


def write_field_csv(psi, path, extra=None, coord_names=None):
    """CSV with coordinate columns, re(psi), im(psi) and optional named real columns.

    1D fields use column ``x``; 2D fields ``x,y`` unless ``coord_names`` says
    otherwise (product states use ``x1,x2``).
    """
    grid = psi.grid
    if coord_names is None:
        coord_names = ("x",) if grid.dim == 1 else ("x", "y")
    extra = extra or {}
    coords = [c.ravel() for c in grid.coords()]
    cols = [np.asarray(v).ravel() for v in extra.values()]
    samples = psi.samples.ravel()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([*coord_names, "re(psi)", "im(psi)", *extra])
        for i in range(samples.size):
            row = [_fmt(c[i]) for c in coords]
            row += [_fmt(samples[i].real), _fmt(samples[i].imag)]
            row += [_fmt(float(v[i])) for v in cols]
            w.writerow(row)


def read_field_csv(path):
    """Read a 1D field CSV (x, re(psi), im(psi), ...) back into a WaveField."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise PreconditionError(f"{path}: no such file") from None
    if len(rows) < 2:
        raise PreconditionError(f"{path}: empty field file")
    header = rows[0]
    try:
        ix, ire, iim = header.index("x"), header.index("re(psi)"), header.index("im(psi)")
        data = np.array([[float(r[ix]), float(r[ire]), float(r[iim])] for r in rows[1:]])
    except (ValueError, IndexError) as exc:
        raise PreconditionError(f"{path}: bad field CSV ({exc})") from None
    x = data[:, 0]
    n = x.size
    dx = (x[-1] - x[0]) / (n - 1) if n > 1 else 0.0
    if n < 16 or not np.allclose(np.diff(x), dx, rtol=1e-9, atol=1e-12):
        raise PreconditionError(f"{path}: x must be a uniform grid with at least 16 points")
    return WaveField(Grid(n, dx), data[:, 1] + 1j * data[:, 2])


def write_trajectory(traj, out_dir):
    """trajectory.csv (time column plus field columns) and diagnostics.jsonl."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    x = traj.grid.axis
    with open(out_dir / "trajectory.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "x", "re(psi)", "im(psi)"])
        for t, z in zip(traj.times, traj.snapshots):
            for xi, zi in zip(x, z):
                w.writerow([_fmt(t), _fmt(xi), _fmt(zi.real), _fmt(zi.imag)])
    write_diagnostics(traj.diagnostics, out_dir / "diagnostics.jsonl")


def write_diagnostics(diagnostics, path):
    with open(path, "w") as fh:
        for d in diagnostics:
            fh.write(json.dumps(_round(d, REPORT_DIGITS)) + "\n")
