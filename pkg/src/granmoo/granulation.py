"""Granule-pool fitness approximation.

The pool keeps a bounded archive of exactly evaluated solutions ("granules"),
each a Gaussian kernel in decision space.  An offspring whose best similarity
to the pool reaches the acceptance threshold inherits that granule's fitness
instead of being evaluated; everything else is evaluated exactly and becomes
a new granule.  Follows the adaptive fuzzy fitness granulation idea of
Davarynejad et al. (CEC 2007), with granule widths tied to the pool's
nondomination ranking:

    similarity(x, g) = mean_n exp(-(x_n - c_n)^2 / sigma_g^2)
    sigma_g          = sigma_min * (1 + (rank_g - 1) / K)

where K is the number of fronts currently in the pool, so front-1 granules
are narrowest (hardest to match) and the widths approach 2*sigma_min for the
worst-ranked granules.  Each approximation bumps the serving granule's life
index; when the pool overflows, the lowest-life (oldest on ties) granule is
evicted.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .nsga2 import EvalCounters, EvalKind, Individual, nondominated_fronts
from .problems import ProblemSpec, evaluate_problem

INITIAL_LIFE = 1


@dataclass
class Granule:
    center: np.ndarray
    objectives: np.ndarray
    violation: float
    width: float
    life: int = INITIAL_LIFE
    rank: int = 1


@dataclass
class GranulePool:
    """Bounded, insertion-ordered archive of granules."""

    max_size: int
    sigma_min: float
    threshold: float = 0.9
    granules: list[Granule] = field(default_factory=list)

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must lie in (0, 1]")
        if self.sigma_min <= 0.0:
            raise ValueError("sigma_min must be positive")
        self._stale = True
        self._centers: np.ndarray | None = None
        self._widths: np.ndarray | None = None

    def _matrices(self) -> tuple[np.ndarray, np.ndarray]:
        # cached (centers, widths) stack; rebuilt after any pool mutation
        if self._stale:
            self._centers = np.array([g.center for g in self.granules])
            self._widths = np.array([g.width for g in self.granules])
            self._stale = False
        return self._centers, self._widths

    def _touch(self) -> None:
        self._stale = True


def similarity(x: np.ndarray, granule: Granule) -> float:
    """Mean per-gene Gaussian closeness of x to a granule's center, in (0, 1]."""
    x = np.asarray(x, dtype=float)
    if x.shape != granule.center.shape:
        raise ValueError("dimension mismatch between point and granule")
    gap = x - granule.center
    return float(np.exp(-(gap * gap) / granule.width**2).mean())


def pool_similarities(pool: GranulePool, x: np.ndarray) -> np.ndarray:
    """Similarity of x to every granule, in insertion order."""
    if not pool.granules:
        return np.zeros(0)
    centers, widths = pool._matrices()
    if x.shape != centers.shape[1:]:
        raise ValueError("dimension mismatch between point and pool")
    gap = x[None, :] - centers
    return np.exp(-(gap * gap) / widths[:, None] ** 2).mean(axis=1)


def granule_width(rank: int, n_fronts: int, sigma_min: float) -> float:
    """Width assigned to a granule of the given pool rank.

    Grows linearly from sigma_min (rank 1) toward 2*sigma_min as the rank
    approaches the number of fronts in the pool.
    """
    if n_fronts < 1:
        raise ValueError("pool must contain at least one front")
    if not 1 <= rank <= n_fronts:
        raise ValueError("rank must lie in [1, n_fronts]")
    return sigma_min * (1.0 + (rank - 1) / n_fronts)


def refresh_pool_ranks(pool: GranulePool) -> None:
    """Re-rank all granules by constrained nondomination and reset widths."""
    if not pool.granules:
        raise ValueError("cannot rank an empty pool")
    objectives = np.array([g.objectives for g in pool.granules])
    violations = np.array([g.violation for g in pool.granules])
    fronts = nondominated_fronts(objectives, violations)
    for level, front in enumerate(fronts, start=1):
        width = granule_width(level, len(fronts), pool.sigma_min)
        for i in front:
            pool.granules[i].rank = level
            pool.granules[i].width = width
    pool._touch()


def insert_granule(
    pool: GranulePool, center: np.ndarray, objectives: np.ndarray, violation: float
) -> Granule:
    """Archive an exactly evaluated solution; width/rank stay provisional
    (sigma_min, rank 1) until the next refresh.

    At capacity, the lowest-life existing granule is dropped first to make
    room, so the fresh entry always survives its own insertion.  (If the
    newcomer competed for eviction it would lose as soon as every resident
    reached life 2, permanently freezing the pool mid-run.)
    """
    while len(pool.granules) >= pool.max_size:
        lives = [g.life for g in pool.granules]
        del pool.granules[lives.index(min(lives))]
        pool._touch()
    granule = Granule(
        center=np.array(center, dtype=float),
        objectives=np.array(objectives, dtype=float),
        violation=float(violation),
        width=pool.sigma_min,
    )
    pool.granules.append(granule)
    pool._touch()
    return granule


def evict_if_full(pool: GranulePool) -> None:
    """Drop lowest-life granules (oldest first on ties) until within bounds."""
    while len(pool.granules) > pool.max_size:
        lives = [g.life for g in pool.granules]
        del pool.granules[lives.index(min(lives))]
        pool._touch()


def _approximate_from(offspring: Individual, granule: Granule) -> None:
    offspring.objectives = granule.objectives.copy()
    offspring.violation = granule.violation
    offspring.eval_kind = EvalKind.APPROXIMATED
    granule.life += 1


def exact_evaluate_and_insert(
    offspring: Individual, pool: GranulePool, problem: ProblemSpec, counters: EvalCounters
) -> None:
    """The exact branch shared by every pool-backed strategy: evaluate,
    count, archive."""
    offspring.objectives, offspring.violation = evaluate_problem(problem, offspring.genes)
    offspring.eval_kind = EvalKind.EXACT
    counters.exact += 1
    insert_granule(pool, offspring.genes, offspring.objectives, offspring.violation)


def affg_evaluate(
    offspring: Individual, pool: GranulePool, problem: ProblemSpec, counters: EvalCounters
) -> None:
    """Similarity-gated evaluation.

    If the best pool similarity reaches the threshold the offspring inherits
    that granule's objectives and violation (life +1, nothing inserted);
    otherwise it is evaluated exactly and archived.
    """
    if pool.granules:
        sims = pool_similarities(pool, offspring.genes)
        best = int(np.argmax(sims))
        if sims[best] >= pool.threshold:
            _approximate_from(offspring, pool.granules[best])
            counters.approx += 1
            return
    exact_evaluate_and_insert(offspring, pool, problem, counters)


def pool_to_csv(pool: GranulePool) -> str:
    """Debug dump: one row per granule (center, objectives, width, life, rank)."""
    if not pool.granules:
        return "\n"
    d = pool.granules[0].center.size
    header = [f"c{i}" for i in range(d)] + ["f1", "f2", "sigma", "life", "rank"]
    lines = [",".join(header)]
    for g in pool.granules:
        cells = [f"{v:.10g}" for v in g.center]
        cells += [f"{g.objectives[0]:.10g}", f"{g.objectives[1]:.10g}", f"{g.width:.10g}"]
        cells += [str(g.life), str(g.rank)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


class AffgEvaluator:
    """Similarity-gated strategy for :func:`granmoo.nsga2.evolve_generation`."""

    def __init__(self, problem: ProblemSpec, pool: GranulePool, counters: EvalCounters):
        self.problem = problem
        self.pool = pool
        self.counters = counters

    def start_generation(self) -> None:
        refresh_pool_ranks(self.pool)

    def evaluate(self, ind: Individual) -> None:
        affg_evaluate(ind, self.pool, self.problem, self.counters)
