"""CSV and JSON outputs of training and landing runs.

All CSV files have a header row and use ``repr``-exact floats with a '.'
decimal separator, independent of the locale.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .scenarios import HISTORY_COLUMNS, RunMetrics

METRIC_COLUMNS = ("kind", "controller", "seed", "V0", "coefficient_scale", "TE_theta_deg", "TE_h_m",
                  "CE_deg", "touchdown_speed", "landed", "diverged", "elapsed_s", "reason", "config_hash")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_history_csv(path, history: dict):
    path = Path(path)
    n = len(history["t"])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HISTORY_COLUMNS)
        for i in range(n):
            w.writerow([_fmt(history[c][i]) for c in HISTORY_COLUMNS])
    return path


def read_history_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {c: np.array([float(r[c]) for r in rows]) for c in HISTORY_COLUMNS}


def write_metrics_csv(path, results):
    """One row per run, sorted by configuration key so the file is order-independent."""
    rows = [r.row() if isinstance(r, RunMetrics) else dict(r) for r in results]
    rows.sort(key=lambda r: (str(r["kind"]), str(r["controller"]), str(r["seed"]),
                             float(r["coefficient_scale"] or 0), float(r["V0"] or 0)))
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=METRIC_COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r[k]) for k in METRIC_COLUMNS})
    return path


def read_metrics_csv(path) -> list[dict]:
    out = []
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            for k in ("TE_theta_deg", "TE_h_m", "CE_deg", "touchdown_speed", "elapsed_s", "V0",
                      "coefficient_scale"):
                r[k] = float(r[k]) if r[k] not in ("", None) else math.nan
            for k in ("landed", "diverged"):
                r[k] = bool(int(r[k]))
            out.append(r)
    return out


def write_learning_curve_csv(path, returns, window: int = 100):
    """Per-episode return and its trailing moving average."""
    returns = np.asarray(returns, dtype=float)
    c = np.cumsum(np.insert(returns, 0, 0.0))
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("episode", "return", f"moving_average_{window}"))
        for n, r in enumerate(returns):
            lo = max(0, n + 1 - window)
            w.writerow((n, _fmt(r), _fmt((c[n + 1] - c[lo]) / (n + 1 - lo))))
    return path


def read_learning_curve_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        return np.array([float(r["return"]) for r in csv.DictReader(fh)])


def write_comparison_csv(path, rows):
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=("scenario", "metric", "fql", "ql", "di", "best"))
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r[k]) for k in w.fieldnames})
    return path


def write_json(path, data: dict):
    path = Path(path)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, default=_fmt)
    return path
