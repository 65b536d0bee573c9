"""Per-second trace CSV.

Leading ``#`` lines echo the scenario configuration; then one header row and
one row per (visible satellite, second). Floats are written with ``repr`` so
they round-trip exactly. An empty ``prediction_db`` means the lookback window
was incomplete; ``eval`` marks the samples counted in the accuracy report.
"""

import csv

import numpy as np


def trace_columns(beacon_ids):
    return (
        ["time", "sat_id", "range_km", "azimuth_rad", "elevation_rad"]
        + [f"rf_db_{i}" for i in beacon_ids]
        + ["fso_db", "prediction_db", "eval"]
    )


class TraceWriter:
    def __init__(self, path, beacon_ids, echo=None):
        self._fh = open(path, "w", newline="")
        for key, value in (echo or {}).items():
            self._fh.write(f"# {key} = {value}\n")
        self._fh.write(",".join(trace_columns(beacon_ids)) + "\n")

    def write(self, t, sat_ids, look, rf, fso, prediction, evaluated):
        look = np.asarray(look).tolist()
        rf = np.asarray(rf).tolist()
        fso = np.asarray(fso).tolist()
        prediction = np.asarray(prediction).tolist()
        evaluated = np.asarray(evaluated).tolist()
        lines = []
        for k, sat in enumerate(np.asarray(sat_ids).tolist()):
            pred = prediction[k]
            cells = [str(t), str(sat)]
            cells += [repr(v) for v in look[k]]
            cells += [repr(v) for v in rf[k]]
            cells.append(repr(fso[k]))
            cells.append("" if pred != pred else repr(pred))
            cells.append("1" if evaluated[k] else "0")
            lines.append(",".join(cells))
        if lines:
            self._fh.write("\n".join(lines) + "\n")

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_trace(path):
    """Columns of a trace file as numpy arrays (missing predictions -> NaN)."""
    echo = {}
    with open(path, newline="") as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                echo[key.strip()] = value.strip()
            else:
                lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    rows = list(reader)
    cols = {}
    for j, name in enumerate(header):
        values = [r[j] for r in rows]
        if name in ("time", "sat_id", "eval"):
            cols[name] = np.array(values, dtype=np.int64)
        else:
            cols[name] = np.array([float(v) if v else np.nan for v in values])
    cols["_header"] = header
    cols["_echo"] = echo
    return cols
