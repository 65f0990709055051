"""Loading and aligning of run time series.

Input is the simulator's timeseries.csv schema; only t_s and T_probe_C are
consumed here. Measured overlays use the two-column schema t_s,T_C.
"""

from __future__ import annotations

import csv

import numpy as np

TIME_COLUMN = "t_s"
PROBE_COLUMN = "T_probe_C"
MEASURED_COLUMN = "T_C"


class SeriesError(ValueError):
    pass


def _read_columns(path, wanted):
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SeriesError(f"{path}: empty file") from None
        missing = [name for name in wanted if name not in header]
        if missing:
            raise SeriesError(f"{path}: missing column(s) {', '.join(missing)}")
        index = [header.index(name) for name in wanted]
        rows = [[float(row[i]) for i in index] for row in reader if row]
    if not rows:
        raise SeriesError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    return [data[:, k] for k in range(len(wanted))]


def load_series(path):
    """Probe-temperature series (t, T) from a run CSV."""
    t, temperature = _read_columns(path, [TIME_COLUMN, PROBE_COLUMN])
    return t, temperature


def load_measured(path):
    """Optional digitized-measurement overlay (t_s,T_C)."""
    t, temperature = _read_columns(path, [TIME_COLUMN, MEASURED_COLUMN])
    return t, temperature


def align(series):
    """Resample a {name: (t, T)} map onto the coarsest common time grid."""
    if not series:
        raise SeriesError("no series to align")
    grids = {name: t for name, (t, _) in series.items()}
    coarsest = min(grids.values(), key=len)
    out = {}
    for name, (t, values) in series.items():
        if len(t) == len(coarsest) and np.array_equal(t, coarsest):
            out[name] = values
        else:
            out[name] = np.interp(coarsest, t, values)
    return coarsest, out
