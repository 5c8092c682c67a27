"""CSV signal files and the run report."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .signals import ComplexSignal, RealSignal

JITTER_TOLERANCE = 1e-6
NUMBER_FORMAT = "{:.12g}"


def fmt(v: float) -> str:
    return NUMBER_FORMAT.format(float(v))


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_signal(path, format: str = "csv") -> RealSignal:
    """Read a ``time_s,voltage_v`` CSV into a RealSignal.

    An optional single header line is skipped. The sampling rate comes from
    the median time step; ``t0`` is the first time stamp.

    Raises:
        ValueError: for an empty file, non-increasing time stamps or sampling
            jitter above 1e-6 relative.
    """
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}")
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no samples")
    try:
        data = np.array([[float(r[0]), float(r[1])] for r in rows])
    except (IndexError, ValueError) as exc:
        raise ValueError(f"{path}: expected two numeric columns time_s,voltage_v") from exc
    t, v = data[:, 0], data[:, 1]
    if t.size < 2:
        raise ValueError(f"{path}: need at least two samples to infer the sampling rate")
    dt = np.diff(t)
    if np.any(dt <= 0):
        raise ValueError(f"{path}: time column is not strictly increasing")
    step = float(np.median(dt))
    jitter = float(np.max(np.abs(dt - step)) / step)
    if jitter > JITTER_TOLERANCE:
        raise ValueError(f"{path}: non-uniform sampling, relative jitter {jitter:.3g} exceeds {JITTER_TOLERANCE:g}")
    return RealSignal(v, 1.0 / step, t[0])


def save_signal(sig, path) -> Path:
    """Write a signal as CSV; complex signals get ``real`` and ``imag`` columns."""
    path = Path(path)
    t = sig.times
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if isinstance(sig, ComplexSignal):
                w.writerow(["time_s", "real", "imag"])
                for ti, z in zip(t, sig.samples):
                    w.writerow([fmt(ti), fmt(z.real), fmt(z.imag)])
            else:
                w.writerow(["time_s", "value"])
                for ti, v in zip(t, sig.samples):
                    w.writerow([fmt(ti), fmt(v)])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def save_table(header, rows, path) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(c) if isinstance(c, (float, np.floating)) else c for c in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:10]


def artifact_name(label: str, config: dict, suffix: str = ".csv") -> str:
    return f"{label}_{config_hash(config)}{suffix}"


def write_report(outdir, report: dict) -> Path:
    path = Path(outdir) / "report.json"
    try:
        path.write_text(json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def safe_label(label: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "-" for c in label)


def save_results(
    results,
    outdir,
    *,
    command: str,
    config: dict,
    seed: int,
    metrics=(),
    fringe_report=None,
    artifacts=(),
    details: dict | None = None,
    timestamp: str | None = None,
) -> list[Path]:
    """Write one envelope CSV per result plus ``report.json``.

    File names are the method label plus a hash of ``config``, so the same
    configuration always maps to the same names. ``artifacts`` lists files the
    caller already wrote; they are recorded in the report.

    Returns:
        Every path written or recorded, report.json last.
    """
    from . import __version__

    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {outdir}: {exc}") from exc
    written = [Path(p) for p in artifacts]
    for res in results:
        written.append(save_signal(res.envelope, outdir / artifact_name(safe_label(res.method_label), config)))
    report = {
        "version": __version__,
        "command": command,
        "config": config,
        "seed": seed,
        "metrics": [m.as_dict() if hasattr(m, "as_dict") else dict(m) for m in metrics],
        "artifacts": sorted(p.name for p in written),
    }
    if fringe_report is not None:
        report["fringes"] = fringe_report.as_dict()
    if details:
        report["details"] = details
    if timestamp is not None:
        report["timestamp"] = timestamp
    written.append(write_report(outdir, report))
    return written
