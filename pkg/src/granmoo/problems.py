"""Bi-objective benchmark problems: ZDT, UF, and CF families.

Definitions follow the published test suites:

* ZDT1-ZDT4, ZDT6 -- Zitzler, Deb & Thiele, "Comparison of Multiobjective
  Evolutionary Algorithms: Empirical Results", Evolutionary Computation 8(2),
  2000.
* UF1-UF3, UF5 (unconstrained) and CF1-CF5 (constrained) -- Zhang et al.,
  "Multiobjective optimization Test Instances for the CEC 2009 Special
  Session and Competition", technical report CES-487.

All problems minimize two objectives.  Constraints use the ``c(x) >= 0``
convention; ``evaluate_problem`` folds them into a single non-negative
violation ``max(0, -c(x))``.  Dimensions, sigma_min defaults and hypervolume
reference points are the benchmark settings this package's experiments run
with, registered per problem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# Minimum of 1 - exp(-4t) * sin(6*pi*t)^6 over t in [0, 1]: the first
# stationary point of the oscillation, 6*pi*t = atan(9*pi).  This is the left
# edge of the ZDT6 front in f1.
_ZDT6_ATAN = math.atan(9.0 * math.pi)
ZDT6_F1_MIN = 1.0 - math.exp(-2.0 * _ZDT6_ATAN / (3.0 * math.pi)) * math.sin(_ZDT6_ATAN) ** 6


@dataclass
class ProblemSpec:
    """Static description of one benchmark instance.

    ``objectives(x) -> ndarray(2,)`` is the raw objective map;
    ``constraint(x, f) -> float`` (optional) returns the signed constraint
    value, feasible when >= 0.  ``front(p) -> ndarray(p, 2)`` samples the
    analytical Pareto front.  Use :func:`evaluate_problem` and
    :func:`sample_true_front` rather than calling these directly; they
    enforce the contract checks.
    """

    name: str
    d: int
    lower: np.ndarray
    upper: np.ndarray
    n_constraints: int
    sigma_min: float
    hv_reference: np.ndarray
    objectives: Callable[[np.ndarray], np.ndarray]
    constraint: Callable[[np.ndarray, np.ndarray], float] | None
    front: Callable[[int], np.ndarray]
    n_obj: int = 2


def evaluate_problem(spec: ProblemSpec, genes: np.ndarray) -> tuple[np.ndarray, float]:
    """Evaluate one decision vector, returning (objectives, violation).

    violation is 0.0 exactly for feasible/unconstrained inputs.  Raises
    ValueError on dimension mismatch or out-of-bounds genes: callers are
    expected to clamp before evaluating.
    """
    x = np.asarray(genes, dtype=float)
    if x.shape != (spec.d,):
        raise ValueError(f"{spec.name}: expected {spec.d} genes, got shape {x.shape}")
    if np.any(x < spec.lower) or np.any(x > spec.upper):
        raise ValueError(f"{spec.name}: genes outside the box bounds")
    f = spec.objectives(x)
    if spec.constraint is None:
        return f, 0.0
    return f, max(0.0, -float(spec.constraint(x, f)))


def sample_true_front(spec: ProblemSpec, p: int) -> np.ndarray:
    """Sample ``p`` points of the analytical front, sorted by f1 ascending."""
    if p < 2:
        raise ValueError("front sample needs at least 2 points")
    pts = spec.front(p)
    return pts[np.argsort(pts[:, 0], kind="stable")]


def front_to_csv(points: np.ndarray) -> str:
    """Render front samples as a two-column CSV (f1,f2), 10 significant digits."""
    lines = ["f1,f2"]
    for f1, f2 in points:
        lines.append(f"{f1:.10g},{f2:.10g}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# front-sampling helpers


def _allocate(p: int, lengths: np.ndarray) -> np.ndarray:
    """Split p sample points over front segments, proportional to length.

    Zero-length (isolated-point) segments get exactly one point; remaining
    points go by largest remainder, so the split is deterministic.
    """
    lengths = np.asarray(lengths, dtype=float)
    counts = np.ones(lengths.size, dtype=int)
    rest = p - lengths.size
    if rest <= 0:
        return counts
    total = lengths.sum()
    quota = rest * lengths / total
    counts += np.floor(quota).astype(int)
    frac = quota - np.floor(quota)
    order = np.argsort(-frac, kind="stable")
    counts[order[: p - counts.sum()]] += 1
    return counts


def _segmented_front(p, segments, f2_of, open_left=False):
    counts = _allocate(p, np.array([b - a for a, b in segments]))
    chunks = []
    for i, ((a, b), c) in enumerate(zip(segments, counts)):
        if open_left and i > 0:
            # skip the segment start: it is weakly dominated by the previous
            # segment's end (equal f2, larger f1)
            chunks.append(np.linspace(a, b, c + 1)[1:])
        else:
            chunks.append(np.linspace(a, b, c))
    f1 = np.concatenate(chunks)[:p]
    return np.column_stack([f1, f2_of(f1)])


def _discrete_front(p, grid):
    idx = np.rint(np.linspace(0.0, grid.shape[0] - 1, p)).astype(int)
    return grid[idx]


# Disconnected part of the ZDT3 front, expressed as f1 intervals.
_ZDT3_SEGMENTS = [
    (0.0, 0.0830015349),
    (0.1822287280, 0.2577623634),
    (0.4093136748, 0.4538821041),
    (0.6183967944, 0.6525117038),
    (0.8233317983, 0.8518328654),
]


# ---------------------------------------------------------------------------
# ZDT family


def _zdt1_obj(x):
    g = 1.0 + 9.0 * x[1:].sum() / (x.size - 1)
    return np.array([x[0], g * (1.0 - math.sqrt(x[0] / g))])


def _zdt2_obj(x):
    g = 1.0 + 9.0 * x[1:].sum() / (x.size - 1)
    return np.array([x[0], g * (1.0 - (x[0] / g) ** 2)])


def _zdt3_obj(x):
    g = 1.0 + 9.0 * x[1:].sum() / (x.size - 1)
    h = 1.0 - math.sqrt(x[0] / g) - (x[0] / g) * math.sin(10.0 * math.pi * x[0])
    return np.array([x[0], g * h])


def _zdt4_obj(x):
    tail = x[1:]
    g = 1.0 + 10.0 * tail.size + float(np.sum(tail**2 - 10.0 * np.cos(4.0 * np.pi * tail)))
    return np.array([x[0], g * (1.0 - math.sqrt(x[0] / g))])


def _zdt6_obj(x):
    f1 = 1.0 - math.exp(-4.0 * x[0]) * math.sin(6.0 * math.pi * x[0]) ** 6
    g = 1.0 + 9.0 * (x[1:].sum() / (x.size - 1)) ** 0.25
    return np.array([f1, g * (1.0 - (f1 / g) ** 2)])


def _zdt1_front(p):
    # Parameterized by t = sqrt(f1) so the steep left end is not starved.
    t = np.linspace(0.0, 1.0, p)
    return np.column_stack([t**2, 1.0 - t])


def _zdt2_front(p):
    f1 = np.linspace(0.0, 1.0, p)
    return np.column_stack([f1, 1.0 - f1**2])


def _zdt3_front(p):
    return _segmented_front(
        p,
        _ZDT3_SEGMENTS,
        lambda f1: 1.0 - np.sqrt(f1) - f1 * np.sin(10.0 * np.pi * f1),
        open_left=True,
    )


def _zdt6_front(p):
    f1 = np.linspace(ZDT6_F1_MIN, 1.0, p)
    return np.column_stack([f1, 1.0 - f1**2])


# ---------------------------------------------------------------------------
# UF family (dimension n; position index j runs 2..n, J1 odd / J2 even)


def _uf1_obj_factory(n):
    j = np.arange(2, n + 1)
    phase = j * np.pi / n
    odd, even = j % 2 == 1, j % 2 == 0

    def obj(x):
        y = x[1:] - np.sin(6.0 * np.pi * x[0] + phase)
        yy = y * y
        return np.array(
            [
                x[0] + 2.0 * yy[odd].mean(),
                1.0 - math.sqrt(x[0]) + 2.0 * yy[even].mean(),
            ]
        )

    return obj


def _uf2_obj_factory(n):
    j = np.arange(2, n + 1)
    phase = j * np.pi / n
    odd, even = j % 2 == 1, j % 2 == 0

    def obj(x):
        amp = 0.3 * x[0] ** 2 * np.cos(24.0 * np.pi * x[0] + 4.0 * phase) + 0.6 * x[0]
        trig = np.where(odd, np.cos(6.0 * np.pi * x[0] + phase), np.sin(6.0 * np.pi * x[0] + phase))
        y = x[1:] - amp * trig
        yy = y * y
        return np.array(
            [
                x[0] + 2.0 * yy[odd].mean(),
                1.0 - math.sqrt(x[0]) + 2.0 * yy[even].mean(),
            ]
        )

    return obj


def _power_chain(n):
    # exponent of x1 defining the nonlinear variable linkage in UF3/CF1
    j = np.arange(2, n + 1)
    return 0.5 * (1.0 + 3.0 * (j - 2.0) / (n - 2.0))


def _rosenbrock_like(yy, y, sqrt_j, mask):
    # 4*sum(y^2) - 2*prod(cos(20*pi*y/sqrt(j))) + 2, averaged with weight 2/|J|
    s = 4.0 * yy[mask].sum() - 2.0 * np.prod(np.cos(20.0 * np.pi * y[mask] / sqrt_j[mask])) + 2.0
    return 2.0 * s / mask.sum()


def _uf3_obj_factory(n):
    j = np.arange(2, n + 1)
    expo = _power_chain(n)
    sqrt_j = np.sqrt(j.astype(float))
    odd, even = j % 2 == 1, j % 2 == 0

    def obj(x):
        y = x[1:] - x[0] ** expo
        yy = y * y
        return np.array(
            [
                x[0] + _rosenbrock_like(yy, y, sqrt_j, odd),
                1.0 - math.sqrt(x[0]) + _rosenbrock_like(yy, y, sqrt_j, even),
            ]
        )

    return obj


def _uf5_obj_factory(n, big_n=10, eps=0.1):
    j = np.arange(2, n + 1)
    phase = j * np.pi / n
    odd, even = j % 2 == 1, j % 2 == 0

    def obj(x):
        y = x[1:] - np.sin(6.0 * np.pi * x[0] + phase)
        h = 2.0 * y * y - np.cos(4.0 * np.pi * y) + 1.0
        bump = (1.0 / (2.0 * big_n) + eps) * abs(math.sin(2.0 * big_n * math.pi * x[0]))
        return np.array(
            [
                x[0] + bump + 2.0 * h[odd].mean(),
                1.0 - x[0] + bump + 2.0 * h[even].mean(),
            ]
        )

    return obj


def _hyperbola_front(p):
    f1 = np.linspace(0.0, 1.0, p)
    return np.column_stack([f1, 1.0 - np.sqrt(f1)])


def _staircase_front(p):
    # 21 isolated points (i/20, 1 - i/20); shared by UF5 and CF1
    i = np.arange(21) / 20.0
    return _discrete_front(p, np.column_stack([i, 1.0 - i]))


# ---------------------------------------------------------------------------
# CF family (single constraint each, c(x) >= 0 feasible)


def _cf1_obj_factory(n):
    expo = _power_chain(n)
    j = np.arange(2, n + 1)
    odd, even = j % 2 == 1, j % 2 == 0

    def obj(x):
        y = x[1:] - x[0] ** expo
        yy = y * y
        return np.array([x[0] + 2.0 * yy[odd].mean(), 1.0 - x[0] + 2.0 * yy[even].mean()])

    return obj


def _cf1_constraint(x, f):
    return f[0] + f[1] - abs(math.sin(10.0 * math.pi * (f[0] - f[1] + 1.0))) - 1.0


def _cf2_obj_factory(n):
    j = np.arange(2, n + 1)
    phase = j * np.pi / n
    odd, even = j % 2 == 1, j % 2 == 0

    def obj(x):
        base = 6.0 * np.pi * x[0] + phase
        y = x[1:] - np.where(odd, np.sin(base), np.cos(base))
        yy = y * y
        return np.array(
            [
                x[0] + 2.0 * yy[odd].mean(),
                1.0 - math.sqrt(x[0]) + 2.0 * yy[even].mean(),
            ]
        )

    return obj


def _sigmoid_sign(t):
    # keeps the sign of t while flattening its magnitude; the CEC09 trick to
    # make a boundary constraint numerically gentle
    return t / (1.0 + math.exp(4.0 * abs(t)))


def _cf2_constraint(x, f):
    t = f[1] + math.sqrt(f[0]) - math.sin(2.0 * math.pi * (math.sqrt(f[0]) - f[1] + 1.0)) - 1.0
    return _sigmoid_sign(t)


def _cf2_front(p):
    return _segmented_front(
        p,
        [(0.0, 0.0), (1.0 / 16.0, 4.0 / 16.0), (9.0 / 16.0, 1.0)],
        lambda f1: 1.0 - np.sqrt(f1),
    )


def _cf3_obj_factory(n):
    j = np.arange(2, n + 1)
    phase = j * np.pi / n
    sqrt_j = np.sqrt(j.astype(float))
    odd, even = j % 2 == 1, j % 2 == 0

    def obj(x):
        y = x[1:] - np.sin(6.0 * np.pi * x[0] + phase)
        yy = y * y
        return np.array(
            [
                x[0] + _rosenbrock_like(yy, y, sqrt_j, odd),
                1.0 - x[0] ** 2 + _rosenbrock_like(yy, y, sqrt_j, even),
            ]
        )

    return obj


def _cf3_constraint(x, f):
    return f[1] + f[0] ** 2 - math.sin(2.0 * math.pi * (f[0] ** 2 - f[1] + 1.0)) - 1.0


def _cf3_front(p):
    return _segmented_front(
        p,
        [(0.0, 0.0), (0.5, math.sqrt(0.5)), (math.sqrt(0.75), 1.0)],
        lambda f1: 1.0 - f1**2,
    )


_H2_KINK = 1.5 * (1.0 - math.sqrt(0.5))


def _h2(t):
    # piecewise distance term attached to j=2 in CF4/CF5
    return abs(t) if t < _H2_KINK else 0.125 + (t - 1.0) ** 2


def _cf4_obj_factory(n):
    j = np.arange(2, n + 1)
    phase = j * np.pi / n
    odd, even = j % 2 == 1, j % 2 == 0

    def obj(x):
        y = x[1:] - np.sin(6.0 * np.pi * x[0] + phase)
        h = y * y
        h[0] = _h2(y[0])
        return np.array([x[0] + h[odd].sum(), 1.0 - x[0] + h[even].sum()])

    return obj


def _cf4_constraint(x, f):
    n = x.size
    t = x[1] - math.sin(6.0 * math.pi * x[0] + 2.0 * math.pi / n) - 0.5 * x[0] + 0.25
    return _sigmoid_sign(t)


def _cf4_front_f2(f1):
    return np.where(f1 <= 0.5, 1.0 - f1, np.where(f1 <= 0.75, 0.75 - 0.5 * f1, 1.125 - f1))


def _cf4_front(p):
    f1 = np.linspace(0.0, 1.0, p)
    return np.column_stack([f1, _cf4_front_f2(f1)])


def _cf5_obj_factory(n):
    j = np.arange(2, n + 1)
    phase = j * np.pi / n
    odd, even = j % 2 == 1, j % 2 == 0

    def obj(x):
        base = 6.0 * np.pi * x[0] + phase
        y = x[1:] - 0.8 * x[0] * np.where(odd, np.cos(base), np.sin(base))
        h = 2.0 * y * y - np.cos(4.0 * np.pi * y) + 1.0
        h[0] = _h2(y[0])
        return np.array([x[0] + h[odd].sum(), 1.0 - x[0] + h[even].sum()])

    return obj


def _cf5_constraint(x, f):
    n = x.size
    return x[1] - 0.8 * x[0] * math.sin(6.0 * math.pi * x[0] + 2.0 * math.pi / n) - 0.5 * x[0] + 0.25


# ---------------------------------------------------------------------------
# registry


def _box(d, first, rest):
    lower = np.full(d, rest[0], dtype=float)
    upper = np.full(d, rest[1], dtype=float)
    lower[0], upper[0] = first
    return lower, upper


def _build_registry() -> dict[str, ProblemSpec]:
    reg: dict[str, ProblemSpec] = {}

    def add(name, d, first, rest, sigma_min, ref, obj, front, constraint=None):
        lower, upper = _box(d, first, rest)
        reg[name] = ProblemSpec(
            name=name,
            d=d,
            lower=lower,
            upper=upper,
            n_constraints=0 if constraint is None else 1,
            sigma_min=sigma_min,
            hv_reference=np.array(ref, dtype=float),
            objectives=obj,
            constraint=constraint,
            front=front,
        )

    unit = (0.0, 1.0)
    add("zdt1", 6, unit, unit, 2.0**-4, [1.1, 3.5], _zdt1_obj, _zdt1_front)
    add("zdt2", 6, unit, unit, 2.0**-5, [1.1, 5.0], _zdt2_obj, _zdt2_front)
    add("zdt3", 6, unit, unit, 2.0**-5, [1.1, 6.0], _zdt3_obj, _zdt3_front)
    add("zdt4", 10, unit, (-5.0, 5.0), 2.0**-6, [1.1, 140.0], _zdt4_obj, _zdt1_front)
    add("zdt6", 10, unit, unit, 2.0**-5, [1.1, 9.0], _zdt6_obj, _zdt6_front)
    add("cf1", 10, unit, unit, 2.0**-4, [3.0, 3.0], _cf1_obj_factory(10), _staircase_front, _cf1_constraint)
    add("cf2", 10, unit, (-1.0, 1.0), 2.0**-4, [8.0, 7.0], _cf2_obj_factory(10), _cf2_front, _cf2_constraint)
    add("cf3", 10, unit, (-2.0, 2.0), 2.0**-4, [68.0, 59.0], _cf3_obj_factory(10), _cf3_front, _cf3_constraint)
    add("cf4", 10, unit, (-2.0, 2.0), 2.0**-4, [18.0, 19.0], _cf4_obj_factory(10), _cf4_front, _cf4_constraint)
    add("cf5", 10, unit, (-2.0, 2.0), 2.0**-4, [31.0, 32.0], _cf5_obj_factory(10), _cf4_front, _cf5_constraint)
    add("uf1", 30, unit, (-1.0, 1.0), 2.0**-4, [8.0, 7.0], _uf1_obj_factory(30), _hyperbola_front)
    add("uf2", 30, unit, (-1.0, 1.0), 2.0**-4, [6.0, 5.0], _uf2_obj_factory(30), _hyperbola_front)
    add("uf3", 30, unit, unit, 2.0**-4, [12.0, 10.0], _uf3_obj_factory(30), _hyperbola_front)
    add("uf5", 30, unit, (-1.0, 1.0), 2.0**-4, [18.0, 15.0], _uf5_obj_factory(30), _staircase_front)
    return reg


_REGISTRY = _build_registry()
_VALIDATED: set[str] = set()


def problem_names() -> list[str]:
    return list(_REGISTRY)


def get_problem(name: str) -> ProblemSpec:
    """Look up a benchmark by registry key (e.g. ``"zdt1"``).

    First access validates the instance: the hypervolume reference point must
    be strictly dominated by every point of the analytical front.
    """
    try:
        spec = _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; known: {', '.join(_REGISTRY)}") from None
    if name not in _VALIDATED:
        pts = sample_true_front(spec, 512)
        if not np.all(pts < spec.hv_reference):
            raise AssertionError(f"{name}: hv_reference not dominated by the whole front")
        _VALIDATED.add(name)
    return spec
