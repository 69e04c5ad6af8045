"""CSV and JSON file formats.

All CSV files have a one-line header and LF line endings, and write numbers
with 17 significant digits so a read/write cycle reproduces the file byte for
byte.  Schemas:

* I/Q record: ``t,i,q``
* displacement or ground truth: ``t,x_m``
* spectrum: ``freq_hz,amplitude_m``
* IF record: ``t,s``

The sample rate of a time series is recovered from its time column (rounded
to 9 significant digits), so files need at least two rows.
"""
import json
from pathlib import Path

import numpy as np

from .digital_if import IfRecord
from .errors import DomainError
from .motion import MotionTrace
from .radar_model import IQRecord

IQ_HEADER = ("t", "i", "q")
DISPLACEMENT_HEADER = ("t", "x_m")
SPECTRUM_HEADER = ("freq_hz", "amplitude_m")
IF_HEADER = ("t", "s")


def _fmt(v):
    return format(float(v), ".17g")


def write_csv(path, header, columns):
    cols = [np.asarray(c, dtype=float).reshape(-1) for c in columns]
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in zip(*cols))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_csv(path, header):
    """Columns of a CSV file with the given header, as float arrays."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DomainError(f"empty record: {path} has no header or data")
    got = tuple(h.strip() for h in lines[0].split(","))
    if got != tuple(header):
        raise DomainError(f"{path}: expected header {','.join(header)}, found {lines[0]!r}")
    if len(lines) == 1:
        raise DomainError(f"empty record: {path} has no data rows")
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise DomainError(f"{path}: malformed number ({exc})") from exc
    if data.shape[1] != len(header):
        raise DomainError(f"{path}: expected {len(header)} columns")
    return [data[:, k].copy() for k in range(len(header))]


def _rate_from_times(t, path):
    if t.size < 2:
        raise DomainError(f"{path}: need at least two rows to infer the sample rate")
    span = t[-1] - t[0]
    if not span > 0:
        raise DomainError(f"{path}: time column is not increasing")
    rate = float(format((t.size - 1) / span, ".9g"))
    expect = t[0] + np.arange(t.size) / rate
    if np.max(np.abs(expect - t)) > 1e-6 / rate:
        raise DomainError(f"{path}: samples are not uniformly spaced")
    return rate


def write_iq_csv(path, iq):
    write_csv(path, IQ_HEADER, [iq.times, iq.i_samples, iq.q_samples])


def read_iq_csv(path):
    t, i, q = read_csv(path, IQ_HEADER)
    return IQRecord(_rate_from_times(t, path), i, q, float(t[0]))


def write_displacement_csv(path, est):
    write_csv(path, DISPLACEMENT_HEADER, [est.times, est.displacements])


def read_trace_csv(path):
    """A ``t,x_m`` file as a MotionTrace."""
    t, x = read_csv(path, DISPLACEMENT_HEADER)
    return MotionTrace(_rate_from_times(t, path), x, float(t[0]))


def read_truth_csv(path, expected_rate=None):
    trace = read_trace_csv(path)
    if expected_rate is not None and trace.sample_rate != expected_rate:
        raise DomainError(f"{path}: sample rate {trace.sample_rate} Hz, expected {expected_rate} Hz")
    return trace


def write_spectrum_csv(path, report):
    write_csv(path, SPECTRUM_HEADER, [report.bin_freqs, report.amplitude])


def write_if_csv(path, record):
    t = record.start_time + np.arange(len(record)) / record.sample_rate
    write_csv(path, IF_HEADER, [t, record.samples])


def read_if_csv(path):
    t, s = read_csv(path, IF_HEADER)
    return IfRecord(_rate_from_times(t, path), s, float(t[0]))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def write_json(path, obj):
    """Deterministic JSON (sorted keys, 2-space indent); non-finite floats become null."""
    text = json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")
