"""Distance-gated evaluation on top of the granule pool.

The similarity gate of ``granmoo.granulation`` spends exact evaluations on
every sufficiently novel offspring.  This module adds a second, cheaper
criterion: novelty alone does not justify an evaluation unless the offspring
also moves *toward* the current Pareto set, taken as the centers of the
pool's rank-1 granules.  An offspring that is no closer (in decision space,
Euclidean) to that set than either of its parents inherits the most similar
granule's fitness instead of being evaluated, at the price of a coarser
approximation.  The gate can only convert exact evaluations into
approximations, so its evaluation total is bounded by the plain
similarity-gated strategy's on any identical decision stream.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .granulation import (
    GranulePool,
    _approximate_from,
    exact_evaluate_and_insert,
    pool_similarities,
    refresh_pool_ranks,
)
from .nsga2 import EvalCounters, Individual
from .problems import ProblemSpec


@dataclass
class CurrentParetoSet:
    """Decision-space snapshot of the pool's rank-1 granule centers."""

    centers: np.ndarray
    generation_stamp: int


def current_pareto_set(pool: GranulePool, generation: int) -> CurrentParetoSet:
    """Collect rank-1 granule centers; call after a pool refresh."""
    if not pool.granules:
        raise ValueError("cannot snapshot an empty pool")
    centers = np.array([g.center for g in pool.granules if g.rank == 1])
    return CurrentParetoSet(centers=centers, generation_stamp=generation)


def min_distance_to_pareto(x: np.ndarray, ps: CurrentParetoSet) -> float:
    """Euclidean distance from x to the nearest Pareto-set center."""
    if ps.centers.size == 0:
        raise ValueError("Pareto set snapshot is empty")
    x = np.asarray(x, dtype=float)
    if x.shape != ps.centers.shape[1:]:
        raise ValueError("dimension mismatch between point and Pareto set")
    gap = ps.centers - x[None, :]
    return float(np.sqrt((gap * gap).sum(axis=1)).min())


def modified_evaluate(
    offspring: Individual,
    pool: GranulePool,
    ps: CurrentParetoSet,
    problem: ProblemSpec,
    counters: EvalCounters,
) -> None:
    """Two-stage gate: similarity first, then progress toward the Pareto set.

    Stage 1 is identical to the similarity gate.  Stage 2 evaluates exactly
    only when the offspring is strictly closer to the current Pareto set
    than at least one of its parents; otherwise the offspring is served by
    its most similar granule (life +1, counted as a distance rejection, no
    insertion).
    """
    if not offspring.parent_refs:
        raise ValueError("offspring carries no parent references")
    if not pool.granules:
        # nothing to gate against yet; behave like the plain exact branch
        exact_evaluate_and_insert(offspring, pool, problem, counters)
        return
    sims = pool_similarities(pool, offspring.genes)
    best = int(np.argmax(sims))
    if sims[best] >= pool.threshold:
        _approximate_from(offspring, pool.granules[best])
        counters.approx += 1
        return
    if ps.centers.size == 0:
        raise RuntimeError("nonempty pool but empty Pareto set snapshot")
    d_off = min_distance_to_pareto(offspring.genes, ps)
    closer = any(
        d_off < min_distance_to_pareto(parent.genes, ps) for parent in offspring.parent_refs
    )
    if closer:
        exact_evaluate_and_insert(offspring, pool, problem, counters)
    else:
        _approximate_from(offspring, pool.granules[best])
        counters.reject += 1


class ModifiedAffgEvaluator:
    """Similarity + Pareto-distance strategy for ``evolve_generation``."""

    def __init__(self, problem: ProblemSpec, pool: GranulePool, counters: EvalCounters):
        self.problem = problem
        self.pool = pool
        self.counters = counters
        self.generation = 0
        self.pareto_set: CurrentParetoSet | None = None

    def start_generation(self) -> None:
        self.generation += 1
        refresh_pool_ranks(self.pool)
        self.pareto_set = current_pareto_set(self.pool, self.generation)

    def evaluate(self, ind: Individual) -> None:
        modified_evaluate(ind, self.pool, self.pareto_set, self.problem, self.counters)
