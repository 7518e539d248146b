"""CSV persistence for ensemble curves.

Schema: header ``t,p_mean,p_stderr,f_mean,f_stderr``, one row per sample in
ascending ``t``. Reals are written with 17 significant digits, ``.`` as the
decimal separator and LF line endings, so write -> read -> write is
byte-identical.
"""

import io
import math

import numpy as np

from .ensemble import EnsembleSeries
from .errors import DataError

HEADER = ("t", "p_mean", "p_stderr", "f_mean", "f_stderr")


def _fmt(x):
    return format(float(x), ".17g")


def series_to_csv(series):
    out = io.StringIO(newline="")
    out.write(",".join(HEADER) + "\n")
    for row in zip(series.sample_times, series.p_mean, series.p_stderr, series.f_mean, series.f_stderr):
        out.write(f"{int(row[0])}," + ",".join(_fmt(x) for x in row[1:]) + "\n")
    return out.getvalue()


def write_series_csv(series, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(series_to_csv(series))


def parse_series_csv(text, model_tag="GA", m_realizations=1):
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DataError("line 1: empty file, expected header")
    header = tuple(h.strip() for h in lines[0].rstrip("\r").split(","))
    if header != HEADER:
        raise DataError(f"line 1: expected header {','.join(HEADER)!r}, got {lines[0]!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.rstrip("\r").split(",")
        if len(fields) != len(HEADER):
            raise DataError(f"line {lineno}: expected {len(HEADER)} fields, got {len(fields)}")
        try:
            t = int(fields[0])
            vals = [float(x) for x in fields[1:]]
        except ValueError as exc:
            raise DataError(f"line {lineno}: {exc}") from None
        if rows and t <= rows[-1][0]:
            raise DataError(f"line {lineno}: t must be strictly ascending ({t} after {rows[-1][0]})")
        if t < 0 or any(math.isinf(v) for v in vals):
            raise DataError(f"line {lineno}: value out of range")
        rows.append((t, *vals))
    if not rows:
        raise DataError("line 2: no data rows")
    arr = np.array([r[1:] for r in rows], dtype=np.float64)
    times = np.array([r[0] for r in rows], dtype=np.int64)
    return EnsembleSeries(times, arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], m_realizations, model_tag, "")


def read_series_csv(path, model_tag="GA", m_realizations=1):
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_series_csv(fh.read(), model_tag=model_tag, m_realizations=m_realizations)
