"""Quality indicators and per-generation series bookkeeping.

Two indicators are implemented for the bi-objective case: the exact
2-D hypervolume (rectangle sweep over the nondominated staircase) and the
inverted generational distance

    IGD(P, F) = (1/N) * (sum_j min_f ||p_j - f||^t)^(1/t),

which with the default t = 1 is the mean distance from a reference front
sample P to its nearest candidate in F.  Series comparisons (evaluation
budgets, indicator trajectories) are made through trapezoidal areas under
the per-generation curves.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import trapezoid
from scipy.spatial.distance import cdist


class MetricKind(Enum):
    HV = "hv"
    IGD = "igd"
    CUM_EXACT_EVALS = "cum_exact_evals"


@dataclass
class MetricSeries:
    """One per-generation telemetry curve."""

    kind: MetricKind
    generation: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.generation = np.asarray(self.generation)
        self.values = np.asarray(self.values, dtype=float)
        if self.generation.ndim != 1 or self.generation.shape != self.values.shape:
            raise ValueError("generation and values must be 1-D and equally long")
        if self.generation.size > 1 and not np.all(np.diff(self.generation) > 0):
            raise ValueError("generation must be strictly increasing")
        if self.kind is MetricKind.CUM_EXACT_EVALS and np.any(np.diff(self.values) < 0):
            raise ValueError("cumulative evaluation counts cannot decrease")


def hypervolume_2d(points, reference) -> float:
    """Exact hypervolume of a 2-D point set against a reference point.

    Points that do not strictly dominate the reference contribute nothing;
    dominated points are absorbed by the staircase sweep.  Empty input gives
    0.0.
    """
    ref = np.asarray(reference, dtype=float)
    if ref.shape != (2,):
        raise ValueError("reference must be a point in objective space")
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return 0.0
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must have shape (n, 2)")
    pts = pts[np.all(pts < ref, axis=1)]
    if pts.shape[0] == 0:
        return 0.0
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    hv = 0.0
    ceiling = ref[1]
    for f1, f2 in pts[order]:
        if f2 < ceiling:
            hv += (ref[0] - f1) * (ceiling - f2)
            ceiling = f2
    return float(hv)


def igd(front, candidates, t: float = 1.0) -> float:
    """Inverted generational distance from a front sample to a candidate set."""
    if t < 1.0:
        raise ValueError("t must be >= 1")
    p = np.asarray(front, dtype=float)
    f = np.asarray(candidates, dtype=float)
    if p.ndim != 2 or p.shape[0] == 0:
        raise ValueError("front sample must be a non-empty (n, m) array")
    if f.ndim != 2 or f.shape[0] == 0:
        raise ValueError("candidate set must be a non-empty (n, m) array")
    d = cdist(p, f).min(axis=1)
    return float((d**t).sum() ** (1.0 / t) / p.shape[0])


def area_under_curve(series: MetricSeries) -> float:
    """Trapezoidal area of a telemetry curve over the generation axis."""
    if series.values.size < 2:
        raise ValueError("need at least two generations to integrate")
    return float(trapezoid(series.values, series.generation))


def percent_difference(a: float, b: float) -> float:
    """100 * |a - b| / a, the paired-curve area gap relative to baseline a."""
    if a == 0:
        raise ValueError("baseline area is zero")
    return 100.0 * abs(a - b) / a
