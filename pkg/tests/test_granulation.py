"""Granule pool: similarity kernel, rank-driven widths, life bookkeeping."""
import math

import numpy as np
import pytest

from granmoo import (
    AffgEvaluator,
    EvalCounters,
    EvalKind,
    Granule,
    GranulePool,
    Individual,
    affg_evaluate,
    evict_if_full,
    exact_evaluate_and_insert,
    get_problem,
    granule_width,
    insert_granule,
    pool_similarities,
    pool_to_csv,
    refresh_pool_ranks,
    similarity,
)


def _granule(center, objectives=(0.0, 0.0), width=1.0, life=1, violation=0.0):
    return Granule(
        center=np.asarray(center, dtype=float),
        objectives=np.asarray(objectives, dtype=float),
        violation=violation,
        width=width,
        life=life,
    )


# ---------------------------------------------------------------------------
# similarity kernel


def test_similarity_hand_value():
    g = _granule([0.0, 0.0], width=0.25)
    # gaps (sigma, 0): mean of exp(-1) and exp(0)
    expected = (math.exp(-1.0) + 1.0) / 2.0
    assert similarity(np.array([0.25, 0.0]), g) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.6839397206, abs=1e-10)


def test_similarity_range_and_identity():
    rng = np.random.default_rng(0)
    for _ in range(50):
        g = _granule(rng.normal(size=4), width=rng.uniform(0.1, 2.0))
        x = g.center + rng.normal(scale=0.5, size=4)
        s = similarity(x, g)
        assert 0.0 < s <= 1.0
    g = _granule([0.3, 0.7], width=0.5)
    assert similarity(np.array([0.3, 0.7]), g) == pytest.approx(1.0, abs=1e-12)


def test_similarity_decreases_with_distance_and_grows_with_width():
    g_narrow = _granule([0.0], width=0.1)
    g_wide = _granule([0.0], width=0.4)
    x = np.array([0.2])
    assert similarity(x, g_narrow) < similarity(np.array([0.1]), g_narrow)
    assert similarity(x, g_narrow) < similarity(x, g_wide)


def test_similarity_dimension_mismatch():
    with pytest.raises(ValueError):
        similarity(np.zeros(3), _granule([0.0, 0.0]))


def test_pool_similarities_match_scalar_kernel():
    pool = GranulePool(max_size=10, sigma_min=0.2)
    rng = np.random.default_rng(1)
    for _ in range(6):
        insert_granule(pool, rng.normal(size=3), rng.normal(size=2), 0.0)
    refresh_pool_ranks(pool)
    x = rng.normal(size=3)
    sims = pool_similarities(pool, x)
    assert sims == pytest.approx([similarity(x, g) for g in pool.granules], abs=1e-14)
    assert pool_similarities(GranulePool(max_size=2, sigma_min=0.1), x).shape == (0,)
    with pytest.raises(ValueError):
        pool_similarities(pool, np.zeros(5))


# ---------------------------------------------------------------------------
# widths and ranks


def test_granule_width_hand_values():
    assert granule_width(3, 4, 0.0625) == pytest.approx(0.09375, abs=1e-15)
    assert granule_width(1, 7, 0.5) == 0.5
    # approaches but never reaches twice the base width
    assert granule_width(1000, 1000, 1.0) == pytest.approx(1.999, abs=1e-12)
    with pytest.raises(ValueError):
        granule_width(0, 3, 0.5)
    with pytest.raises(ValueError):
        granule_width(4, 3, 0.5)
    with pytest.raises(ValueError):
        granule_width(1, 0, 0.5)


def test_pool_validation():
    with pytest.raises(ValueError):
        GranulePool(max_size=0, sigma_min=0.1)
    with pytest.raises(ValueError):
        GranulePool(max_size=5, sigma_min=0.0)
    with pytest.raises(ValueError):
        GranulePool(max_size=5, sigma_min=0.1, threshold=0.0)
    with pytest.raises(ValueError):
        GranulePool(max_size=5, sigma_min=0.1, threshold=1.5)


def test_refresh_pool_ranks_orders_fronts():
    pool = GranulePool(max_size=10, sigma_min=0.25)
    pool.granules = [
        _granule([0.0], objectives=(2.0, 2.0)),
        _granule([1.0], objectives=(0.0, 0.0)),
        _granule([2.0], objectives=(1.0, 1.0)),
        _granule([3.0], objectives=(-9.0, -9.0), violation=0.5),
    ]
    refresh_pool_ranks(pool)
    assert [g.rank for g in pool.granules] == [3, 1, 2, 4]
    assert [g.width for g in pool.granules] == pytest.approx(
        [0.25 * 1.5, 0.25, 0.25 * 1.25, 0.25 * 1.75]
    )


def test_refresh_requires_granules():
    with pytest.raises(ValueError):
        refresh_pool_ranks(GranulePool(max_size=3, sigma_min=0.1))


# ---------------------------------------------------------------------------
# insertion and eviction


def test_insert_granule_is_provisional_and_copies():
    pool = GranulePool(max_size=4, sigma_min=0.3)
    center = np.array([0.1, 0.2])
    objectives = np.array([1.0, 2.0])
    g = insert_granule(pool, center, objectives, 0.25)
    assert g is pool.granules[-1]
    assert g.width == 0.3 and g.rank == 1 and g.life == 1
    assert g.violation == 0.25
    center[0] = 99.0
    objectives[0] = 99.0
    assert g.center[0] == 0.1 and g.objectives[0] == 1.0


def test_eviction_drops_lowest_life_oldest_first():
    pool = GranulePool(max_size=3, sigma_min=0.1)
    pool.granules = [
        _granule([0.0], life=2),
        _granule([1.0], life=1),
        _granule([2.0], life=3),
        _granule([3.0], life=1),
    ]
    evict_if_full(pool)
    assert [g.center[0] for g in pool.granules] == [0.0, 2.0, 3.0]
    pool.max_size = 2
    evict_if_full(pool)
    assert [g.center[0] for g in pool.granules] == [0.0, 2.0]


def test_pool_never_exceeds_capacity():
    pool = GranulePool(max_size=5, sigma_min=0.05)
    rng = np.random.default_rng(2)
    for _ in range(40):
        insert_granule(pool, rng.normal(size=2), rng.normal(size=2), 0.0)
        assert len(pool.granules) <= 5


def test_insert_into_saturated_pool_keeps_newcomer():
    # Every resident has life >= 2; the fresh life-1 entry must still be
    # archived (dropping it instead would freeze the pool for good).
    pool = GranulePool(max_size=3, sigma_min=0.1)
    pool.granules = [
        _granule([0.0], life=4),
        _granule([1.0], life=2),
        _granule([2.0], life=3),
    ]
    g = insert_granule(pool, np.array([9.0]), np.array([9.0, 9.0]), 0.0)
    assert len(pool.granules) == 3
    assert pool.granules[-1] is g and g.life == 1
    assert [gr.center[0] for gr in pool.granules] == [0.0, 2.0, 9.0]


# ---------------------------------------------------------------------------
# gated evaluation


def _pool_for(spec, threshold=0.9, max_size=20):
    return GranulePool(max_size=max_size, sigma_min=spec.sigma_min, threshold=threshold)


def test_affg_empty_pool_goes_exact():
    spec = get_problem("zdt1")
    pool = _pool_for(spec)
    counters = EvalCounters()
    child = Individual(genes=np.full(6, 0.5))
    affg_evaluate(child, pool, spec, counters)
    assert child.eval_kind is EvalKind.EXACT
    assert (counters.exact, counters.approx) == (1, 0)
    assert len(pool.granules) == 1


def test_affg_approximates_near_duplicates():
    spec = get_problem("zdt1")
    pool = _pool_for(spec)
    counters = EvalCounters()
    first = Individual(genes=np.full(6, 0.5))
    affg_evaluate(first, pool, spec, counters)
    clone = Individual(genes=np.full(6, 0.5))
    affg_evaluate(clone, pool, spec, counters)
    assert clone.eval_kind is EvalKind.APPROXIMATED
    assert (counters.exact, counters.approx) == (1, 1)
    assert len(pool.granules) == 1
    assert pool.granules[0].life == 2
    assert np.array_equal(clone.objectives, first.objectives)
    # inherited values are copies, not views into the granule
    clone.objectives[0] = 123.0
    assert pool.granules[0].objectives[0] != 123.0


def test_affg_evaluates_distant_offspring_exactly():
    spec = get_problem("zdt1")
    pool = _pool_for(spec)
    counters = EvalCounters()
    affg_evaluate(Individual(genes=np.full(6, 0.1)), pool, spec, counters)
    far = Individual(genes=np.full(6, 0.9))
    affg_evaluate(far, pool, spec, counters)
    assert far.eval_kind is EvalKind.EXACT
    assert (counters.exact, counters.approx) == (2, 0)
    assert len(pool.granules) == 2


def test_exact_branch_counts_and_archives():
    spec = get_problem("zdt2")
    pool = _pool_for(spec)
    counters = EvalCounters()
    child = Individual(genes=np.full(6, 0.25))
    exact_evaluate_and_insert(child, pool, spec, counters)
    assert counters.exact == 1
    assert np.array_equal(pool.granules[0].center, child.genes)
    assert np.array_equal(pool.granules[0].objectives, child.objectives)


def test_gated_stress_conserves_counts_and_capacity():
    spec = get_problem("zdt1")
    pool = GranulePool(max_size=20, sigma_min=1.2, threshold=0.9)
    counters = EvalCounters()
    rng = np.random.default_rng(3)
    exact_genes = set()
    n_children = 500
    for _ in range(n_children):
        child = Individual(genes=rng.uniform(spec.lower, spec.upper))
        affg_evaluate(child, pool, spec, counters)
        if child.eval_kind is EvalKind.EXACT:
            exact_genes.add(child.genes.tobytes())
        assert len(pool.granules) <= 20
    assert counters.exact + counters.approx == n_children
    assert counters.exact > 0 and counters.approx > 0
    # every archived center came from an exact evaluation
    for g in pool.granules:
        assert g.center.tobytes() in exact_genes


def test_evaluator_refreshes_ranks_between_generations():
    spec = get_problem("zdt1")
    pool = _pool_for(spec)
    counters = EvalCounters()
    strategy = AffgEvaluator(spec, pool, counters)
    strategy.evaluate(Individual(genes=np.full(6, 0.9)))  # poor solution
    strategy.evaluate(Individual(genes=np.full(6, 0.05)))  # dominates it
    strategy.start_generation()
    ranks = [g.rank for g in pool.granules]
    widths = [g.width for g in pool.granules]
    assert sorted(ranks) == [1, 2]
    assert widths[ranks.index(1)] < widths[ranks.index(2)]


# ---------------------------------------------------------------------------
# serialisation


def test_pool_to_csv_golden():
    pool = GranulePool(max_size=4, sigma_min=0.125)
    pool.granules = [
        _granule([0.5, 0.25], objectives=(1.0, 2.5), width=0.125, life=3),
        _granule([0.0, 1.0 / 3.0], objectives=(0.1, 0.2), width=0.1875, life=1),
    ]
    pool.granules[1].rank = 2
    text = pool_to_csv(pool)
    assert text == (
        "c0,c1,f1,f2,sigma,life,rank\n"
        "0.5,0.25,1,2.5,0.125,3,1\n"
        "0,0.3333333333,0.1,0.2,0.1875,1,2\n"
    )
    assert pool_to_csv(GranulePool(max_size=1, sigma_min=0.1)) == "\n"
