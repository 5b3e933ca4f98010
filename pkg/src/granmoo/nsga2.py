"""Elitist nondominated-sorting EA core (NSGA-II).

Implements the machinery of Deb, Pratap, Agarwal & Meyarivan, "A Fast and
Elitist Multiobjective Genetic Algorithm: NSGA-II", IEEE TEC 6(2), 2002:
fast nondominated sorting with constrained domination, crowding distance,
binary tournament selection, simulated binary crossover, polynomial
mutation, and (mu + lambda) environmental selection.

Fitness evaluation is pluggable: :func:`evolve_generation` drives any
strategy object exposing ``start_generation()`` and ``evaluate(individual)``
plus a shared :class:`EvalCounters`.  :class:`ExactEvaluator` is the plain
always-evaluate strategy; the granule-pool strategies live in
``granmoo.granulation`` and ``granmoo.pareto_filter``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .problems import ProblemSpec, evaluate_problem


class EvalKind(Enum):
    UNEVALUATED = "unevaluated"
    EXACT = "exact"
    APPROXIMATED = "approximated"


@dataclass
class Individual:
    """One candidate solution.

    ``parent_refs`` keeps the tournament-selected parents of an offspring;
    distance-gated evaluation strategies read them, everything else ignores
    them.  ``violation`` is the aggregate constraint violation (0.0 when
    feasible or unconstrained).
    """

    genes: np.ndarray
    objectives: np.ndarray | None = None
    violation: float = 0.0
    eval_kind: EvalKind = EvalKind.UNEVALUATED
    parent_refs: tuple = ()


@dataclass
class EAConfig:
    pop_size: int = 50
    generations: int = 100
    crossover_prob: float = 0.9
    mutation_prob: float | None = None  # None -> 1/L, resolved per problem
    eta_c: float = 20.0
    eta_m: float = 20.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.pop_size <= 0 or self.pop_size % 2 != 0:
            raise ValueError("pop_size must be positive and even (SBX emits pairs)")
        if self.generations <= 0:
            raise ValueError("generations must be positive")


@dataclass
class EvalCounters:
    """Running evaluation totals, shared with the active strategy."""

    exact: int = 0
    approx: int = 0
    reject: int = 0


@dataclass
class GenerationStats:
    """Per-generation offspring accounting; the three sum to pop_size."""

    exact: int
    approx: int
    reject: int


def _require_evaluated(pop):
    for ind in pop:
        if ind.eval_kind is EvalKind.UNEVALUATED or ind.objectives is None:
            raise ValueError("population contains unevaluated individuals")


def dominates(a: Individual, b: Individual) -> bool:
    """Constrained domination: feasibility first, then violation, then Pareto."""
    _require_evaluated((a, b))
    a_feas = a.violation == 0.0
    b_feas = b.violation == 0.0
    if a_feas != b_feas:
        return a_feas
    if not a_feas:
        return a.violation < b.violation
    return bool(
        np.all(a.objectives <= b.objectives) and np.any(a.objectives < b.objectives)
    )


def dominance_matrix(objectives: np.ndarray, violations: np.ndarray) -> np.ndarray:
    """Boolean matrix D with D[i, j] true when i constrained-dominates j."""
    f = np.asarray(objectives, dtype=float)
    v = np.asarray(violations, dtype=float)
    pareto = np.all(f[:, None, :] <= f[None, :, :], axis=2) & np.any(
        f[:, None, :] < f[None, :, :], axis=2
    )
    feas = v == 0.0
    fi, fj = feas[:, None], feas[None, :]
    by_violation = v[:, None] < v[None, :]
    return np.where(fi & fj, pareto, np.where(fi, True, np.where(fj, False, by_violation)))


def nondominated_fronts(objectives: np.ndarray, violations: np.ndarray) -> list[np.ndarray]:
    """Peel successive nondominated fronts (index arrays, best first).

    Domination counts are maintained incrementally, so each peel is a
    vectorized subtraction rather than a rescan.
    """
    dom = dominance_matrix(objectives, violations)
    n_dominators = dom.sum(axis=0).astype(int)
    unassigned = np.ones(len(n_dominators), dtype=bool)
    fronts = []
    while unassigned.any():
        current = np.where(unassigned & (n_dominators == 0))[0]
        fronts.append(current)
        unassigned[current] = False
        n_dominators -= dom[current].sum(axis=0)
    return fronts


def fast_nondominated_sort(pop: list[Individual]) -> list[np.ndarray]:
    """Sort a fully evaluated population into fronts of indices."""
    if not pop:
        raise ValueError("cannot sort an empty population")
    _require_evaluated(pop)
    objectives = np.array([ind.objectives for ind in pop])
    violations = np.array([ind.violation for ind in pop])
    return nondominated_fronts(objectives, violations)


def crowding_distance(objectives: np.ndarray) -> np.ndarray:
    """Crowding distances for the members of one front.

    Boundary solutions per objective get +inf; interior ones accumulate the
    normalized gap between their neighbours.  A degenerate objective (all
    values equal) contributes nothing.
    """
    f = np.asarray(objectives, dtype=float)
    if f.size == 0:
        return np.zeros(0)
    n = f.shape[0]
    if n <= 2:
        return np.full(n, np.inf)
    dist = np.zeros(n)
    for col in f.T:
        order = np.argsort(col, kind="stable")
        dist[order[0]] = dist[order[-1]] = np.inf
        span = col[order[-1]] - col[order[0]]
        if span > 0:
            dist[order[1:-1]] += (col[order[2:]] - col[order[:-2]]) / span
    return dist


def binary_tournament(
    pop: list[Individual],
    ranks: np.ndarray,
    crowding: np.ndarray,
    rng: np.random.Generator,
) -> Individual:
    """Pick the better of two uniformly drawn candidates.

    Lower rank wins; equal ranks fall back to larger crowding; full ties are
    decided by a fair coin.
    """
    if not pop:
        raise ValueError("cannot select from an empty population")
    i, j = rng.integers(0, len(pop), size=2)
    if ranks[i] != ranks[j]:
        winner = i if ranks[i] < ranks[j] else j
    elif crowding[i] != crowding[j]:
        winner = i if crowding[i] > crowding[j] else j
    else:
        winner = i if rng.random() < 0.5 else j
    return pop[winner]


def sbx_crossover(
    parent_a: Individual,
    parent_b: Individual,
    cfg: EAConfig,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
) -> tuple[Individual, Individual]:
    """Simulated binary crossover (Deb & Agrawal, 1995).

    Fires with probability ``cfg.crossover_prob``; otherwise the children
    are plain copies.  Gene values are spread around the parents with index
    ``eta_c``, swapped between the children with probability 0.5 per
    variable, and clamped to the box bounds.  Children always start
    unevaluated and reference both parents.
    """
    g1, g2 = parent_a.genes.copy(), parent_b.genes.copy()
    if rng.random() <= cfg.crossover_prob:
        d = g1.size
        u = rng.random(d)
        beta = np.where(
            u <= 0.5,
            (2.0 * u) ** (1.0 / (cfg.eta_c + 1.0)),
            (0.5 / (1.0 - u)) ** (1.0 / (cfg.eta_c + 1.0)),
        )
        c1 = 0.5 * ((1.0 + beta) * g1 + (1.0 - beta) * g2)
        c2 = 0.5 * ((1.0 - beta) * g1 + (1.0 + beta) * g2)
        swap = rng.random(d) < 0.5
        g1 = np.clip(np.where(swap, c2, c1), lower, upper)
        g2 = np.clip(np.where(swap, c1, c2), lower, upper)
    refs = (parent_a, parent_b)
    return Individual(genes=g1, parent_refs=refs), Individual(genes=g2, parent_refs=refs)


def polynomial_mutation(
    ind: Individual,
    cfg: EAConfig,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
) -> Individual:
    """Bounded polynomial mutation (Deb & Goyal, 1996).

    Each gene mutates independently with probability ``cfg.mutation_prob``
    (default 1/L).  The perturbation is drawn from the bounded polynomial
    distribution with index ``eta_m``, so genes sitting on a bound can only
    move inward.  Returns a fresh individual; evaluation state survives only
    when no gene actually changed.
    """
    d = ind.genes.size
    p_mut = cfg.mutation_prob if cfg.mutation_prob is not None else 1.0 / d
    genes = ind.genes.copy()
    mask = rng.random(d) < p_mut
    u = rng.random(d)
    if mask.any():
        x, lo, up = genes[mask], lower[mask], upper[mask]
        span = up - lo
        d_lo = (x - lo) / span
        d_up = (up - x) / span
        um = u[mask]
        expo = 1.0 / (cfg.eta_m + 1.0)
        delta = np.where(
            um < 0.5,
            (2.0 * um + (1.0 - 2.0 * um) * (1.0 - d_lo) ** (cfg.eta_m + 1.0)) ** expo - 1.0,
            1.0 - (2.0 * (1.0 - um) + 2.0 * (um - 0.5) * (1.0 - d_up) ** (cfg.eta_m + 1.0)) ** expo,
        )
        genes[mask] = np.clip(x + delta * span, lo, up)
    if np.array_equal(genes, ind.genes):
        return Individual(
            genes=genes,
            objectives=None if ind.objectives is None else ind.objectives.copy(),
            violation=ind.violation,
            eval_kind=ind.eval_kind,
            parent_refs=ind.parent_refs,
        )
    return Individual(genes=genes, parent_refs=ind.parent_refs)


def rank_and_crowding(pop: list[Individual]) -> tuple[np.ndarray, np.ndarray]:
    """1-based front ranks and within-front crowding for a population."""
    fronts = fast_nondominated_sort(pop)
    objectives = np.array([ind.objectives for ind in pop])
    ranks = np.empty(len(pop), dtype=int)
    crowd = np.empty(len(pop), dtype=float)
    for level, front in enumerate(fronts, start=1):
        ranks[front] = level
        crowd[front] = crowding_distance(objectives[front])
    return ranks, crowd


def environmental_selection(pop: list[Individual], n_keep: int) -> list[Individual]:
    """Elitist (mu + lambda) truncation: whole fronts, then crowding order."""
    if n_keep > len(pop):
        raise ValueError("cannot keep more individuals than supplied")
    fronts = fast_nondominated_sort(pop)
    keep: list[int] = []
    for front in fronts:
        if len(keep) + len(front) <= n_keep:
            keep.extend(front.tolist())
            continue
        objectives = np.array([pop[i].objectives for i in front])
        order = np.argsort(-crowding_distance(objectives), kind="stable")
        keep.extend(front[order[: n_keep - len(keep)]].tolist())
        break
    return [pop[i] for i in keep]


def evolve_generation(
    pop: list[Individual],
    problem: ProblemSpec,
    strategy,
    cfg: EAConfig,
    rng: np.random.Generator,
) -> tuple[list[Individual], GenerationStats]:
    """Run one generation: mate, mutate, evaluate, select.

    The population must be fully evaluated and of size ``cfg.pop_size``.
    Exactly ``pop_size`` offspring are produced and pushed through the
    evaluation strategy, so the returned stats satisfy
    exact + approx + reject == pop_size.
    """
    if len(pop) != cfg.pop_size:
        raise ValueError("population size does not match the configuration")
    _require_evaluated(pop)
    strategy.start_generation()
    ranks, crowd = rank_and_crowding(pop)
    lower, upper = problem.lower, problem.upper

    offspring: list[Individual] = []
    for _ in range(cfg.pop_size // 2):
        pa = binary_tournament(pop, ranks, crowd, rng)
        pb = binary_tournament(pop, ranks, crowd, rng)
        c1, c2 = sbx_crossover(pa, pb, cfg, lower, upper, rng)
        offspring.append(polynomial_mutation(c1, cfg, lower, upper, rng))
        offspring.append(polynomial_mutation(c2, cfg, lower, upper, rng))

    counters = strategy.counters
    exact0, approx0, reject0 = counters.exact, counters.approx, counters.reject
    for child in offspring:
        strategy.evaluate(child)
    stats = GenerationStats(
        exact=counters.exact - exact0,
        approx=counters.approx - approx0,
        reject=counters.reject - reject0,
    )
    return environmental_selection(pop + offspring, cfg.pop_size), stats


class ExactEvaluator:
    """Evaluate every offspring with the true objective functions."""

    def __init__(self, problem: ProblemSpec, counters: EvalCounters):
        self.problem = problem
        self.counters = counters

    def start_generation(self) -> None:
        pass

    def evaluate(self, ind: Individual) -> None:
        ind.objectives, ind.violation = evaluate_problem(self.problem, ind.genes)
        ind.eval_kind = EvalKind.EXACT
        self.counters.exact += 1
