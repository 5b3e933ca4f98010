"""Distance-gated evaluation: snapshot geometry and gate decisions."""
import copy
import math

import numpy as np
import pytest

from granmoo import (
    CurrentParetoSet,
    EvalCounters,
    EvalKind,
    GranulePool,
    Individual,
    ModifiedAffgEvaluator,
    affg_evaluate,
    current_pareto_set,
    exact_evaluate_and_insert,
    get_problem,
    insert_granule,
    min_distance_to_pareto,
    modified_evaluate,
    refresh_pool_ranks,
)


def _pool_with(points, sigma_min=0.01, threshold=0.9, max_size=50):
    """Pool of granules at the given centers, objectives equal to centers."""
    pool = GranulePool(max_size=max_size, sigma_min=sigma_min, threshold=threshold)
    for p in points:
        insert_granule(pool, np.asarray(p, dtype=float), np.asarray(p[:2], dtype=float), 0.0)
    refresh_pool_ranks(pool)
    return pool


def _child(genes, parents):
    return Individual(
        genes=np.asarray(genes, dtype=float),
        parent_refs=tuple(Individual(genes=np.asarray(p, dtype=float)) for p in parents),
    )


# ---------------------------------------------------------------------------
# Pareto-set snapshot


def test_snapshot_collects_rank1_centers():
    pool = _pool_with([[0.0, 0.0], [1.0, 1.0], [0.5, -0.5]])
    # objectives equal centers: (0,0) and (0.5,-0.5) are mutually nondominated
    ps = current_pareto_set(pool, generation=7)
    assert ps.generation_stamp == 7
    got = sorted(map(tuple, ps.centers))
    assert got == [(0.0, 0.0), (0.5, -0.5)]


def test_snapshot_requires_granules():
    with pytest.raises(ValueError):
        current_pareto_set(GranulePool(max_size=2, sigma_min=0.1), 0)


def test_min_distance_hand_values():
    ps = CurrentParetoSet(np.array([[0.0, 0.0], [1.0, 1.0]]), 0)
    assert min_distance_to_pareto(np.array([0.0, 1.0]), ps) == pytest.approx(1.0, abs=1e-15)
    assert min_distance_to_pareto(np.array([0.5, 0.5]), ps) == pytest.approx(
        math.sqrt(0.5), abs=1e-15
    )
    assert min_distance_to_pareto(np.array([1.0, 1.0]), ps) == 0.0


def test_min_distance_validation():
    ps = CurrentParetoSet(np.empty((0, 2)), 0)
    with pytest.raises(ValueError):
        min_distance_to_pareto(np.zeros(2), ps)
    with pytest.raises(ValueError):
        min_distance_to_pareto(np.zeros(3), CurrentParetoSet(np.zeros((1, 2)), 0))


def test_min_distance_is_lipschitz_and_zero_only_on_members():
    rng = np.random.default_rng(4)
    ps = CurrentParetoSet(rng.normal(size=(12, 5)), 0)
    for _ in range(200):
        x, y = rng.normal(size=5), rng.normal(size=5)
        dx, dy = min_distance_to_pareto(x, ps), min_distance_to_pareto(y, ps)
        assert abs(dx - dy) <= np.linalg.norm(x - y) + 1e-9
        assert dx > 0.0
    for row in ps.centers:
        assert min_distance_to_pareto(row, ps) == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------------------
# the two-stage gate


def test_gate_requires_parent_refs():
    pool = _pool_with([[0.0, 0.0]])
    orphan = Individual(genes=np.zeros(2))
    with pytest.raises(ValueError):
        modified_evaluate(orphan, pool, current_pareto_set(pool, 0), get_problem("zdt1"), EvalCounters())


def test_gate_on_empty_pool_evaluates_exactly():
    spec = get_problem("zdt1")
    pool = GranulePool(max_size=10, sigma_min=spec.sigma_min)
    counters = EvalCounters()
    child = _child(np.full(6, 0.5), [np.zeros(6), np.ones(6)])
    modified_evaluate(child, pool, CurrentParetoSet(np.empty((0, 6)), 0), spec, counters)
    assert child.eval_kind is EvalKind.EXACT
    assert counters.exact == 1 and len(pool.granules) == 1


def test_similarity_stage_fires_before_distance_stage():
    spec = get_problem("zdt1")
    pool = GranulePool(max_size=10, sigma_min=spec.sigma_min)
    counters = EvalCounters()
    seed = _child(np.full(6, 0.5), [np.zeros(6)])
    modified_evaluate(seed, pool, CurrentParetoSet(np.empty((0, 6)), 0), spec, counters)
    refresh_pool_ranks(pool)
    ps = current_pareto_set(pool, 1)
    # clone of the granule center: zero progress, but similarity carries it
    clone = _child(np.full(6, 0.5), [np.full(6, 0.5)])
    modified_evaluate(clone, pool, ps, spec, counters)
    assert clone.eval_kind is EvalKind.APPROXIMATED
    assert counters == EvalCounters(exact=1, approx=1, reject=0)
    assert pool.granules[0].life == 2


def _tiny_sigma_pool(spec, centers):
    # sigma far below any inter-point distance: stage 1 never fires
    pool = GranulePool(max_size=50, sigma_min=1e-6, threshold=0.9)
    for c in centers:
        objectives = np.array([float(c[0]), float(c[0])])
        insert_granule(pool, np.asarray(c, dtype=float), objectives, 0.0)
    refresh_pool_ranks(pool)
    return pool


def test_distance_stage_accepts_progress_and_rejects_drift():
    spec = get_problem("zdt1")
    center = np.full(6, 0.2)
    pool = _tiny_sigma_pool(spec, [center])
    ps = current_pareto_set(pool, 1)
    counters = EvalCounters()

    parents = [np.full(6, 0.8), np.full(6, 0.9)]
    closer = _child(np.full(6, 0.5), parents)
    modified_evaluate(closer, pool, ps, spec, counters)
    assert closer.eval_kind is EvalKind.EXACT
    assert counters == EvalCounters(exact=1, approx=0, reject=0)
    assert len(pool.granules) == 2

    # the fresh granule's zdt1 objectives are dominated, so the original
    # center remains the whole rank-1 set after a refresh
    refresh_pool_ranks(pool)
    ps = current_pareto_set(pool, 2)
    assert ps.centers.shape == (1, 6)
    drifter = _child(np.full(6, 0.95), [np.full(6, 0.8), np.full(6, 0.9)])
    before = len(pool.granules)
    modified_evaluate(drifter, pool, ps, spec, counters)
    assert drifter.eval_kind is EvalKind.APPROXIMATED
    assert counters.reject == 1
    assert len(pool.granules) == before  # rejections never archive
    # fitness inherited from the most similar granule, life bumped
    lives = [g.life for g in pool.granules]
    assert max(lives) == 2


def test_distance_tie_counts_as_rejection():
    spec = get_problem("zdt1")
    center = np.zeros(6)
    pool = _tiny_sigma_pool(spec, [center])
    ps = current_pareto_set(pool, 1)
    counters = EvalCounters()
    # parents and child all exactly 0.6 away from the only center
    pa = np.zeros(6)
    pa[0] = 0.6
    pb = np.zeros(6)
    pb[1] = 0.6
    genes = np.zeros(6)
    genes[2] = 0.6
    child = _child(genes, [pa, pb])
    modified_evaluate(child, pool, ps, spec, counters)
    assert child.eval_kind is EvalKind.APPROXIMATED
    assert counters.reject == 1


def test_single_parent_progress_suffices():
    spec = get_problem("zdt1")
    pool = _tiny_sigma_pool(spec, [np.zeros(6)])
    ps = current_pareto_set(pool, 1)
    counters = EvalCounters()
    pa = np.zeros(6)
    pa[0] = 0.1  # already very close
    pb = np.zeros(6)
    pb[0] = 0.9
    genes = np.zeros(6)
    genes[0] = 0.5  # farther than pa, closer than pb
    child = _child(genes, [pa, pb])
    modified_evaluate(child, pool, ps, spec, counters)
    assert child.eval_kind is EvalKind.EXACT


def test_empty_snapshot_with_granules_is_an_error():
    spec = get_problem("zdt1")
    pool = _tiny_sigma_pool(spec, [np.full(6, 0.3)])
    counters = EvalCounters()
    child = _child(np.full(6, 0.6), [np.full(6, 0.9)])
    with pytest.raises(RuntimeError):
        modified_evaluate(child, pool, CurrentParetoSet(np.empty((0, 6)), 1), spec, counters)


def test_gate_outcome_is_scale_invariant():
    # shrinking genes, centers and sigma together must not flip any decision
    spec = get_problem("zdt1")

    def outcomes(scale):
        pool = GranulePool(max_size=40, sigma_min=0.05 * scale, threshold=0.9)
        gen = np.random.default_rng(7)
        for _ in range(8):
            insert_granule(pool, gen.uniform(0, 1, 6) * scale, gen.uniform(0, 1, 2), 0.0)
        refresh_pool_ranks(pool)
        ps = current_pareto_set(pool, 1)
        counters = EvalCounters()
        stream = np.random.default_rng(8)
        for _ in range(60):
            child = _child(
                stream.uniform(0, 1, 6) * scale,
                [stream.uniform(0, 1, 6) * scale, stream.uniform(0, 1, 6) * scale],
            )
            size = len(pool.granules)
            modified_evaluate(child, pool, ps, spec, counters)
            del pool.granules[size:]  # keep the pool fixed for a clean replay
            pool._touch()
        return counters.exact, counters.approx, counters.reject

    assert outcomes(1.0) == outcomes(0.25)
    assert outcomes(1.0)[0] > 0 and outcomes(1.0)[2] > 0


def test_distance_gate_never_fires_more_exact_than_similarity_gate():
    # replay one offspring stream against identical pool snapshots
    spec = get_problem("zdt1")
    rng = np.random.default_rng(10)
    base = GranulePool(max_size=40, sigma_min=0.15, threshold=0.9)
    gen = np.random.default_rng(11)
    for _ in range(12):
        insert_granule(base, gen.uniform(0, 1, 6), gen.uniform(0, 3, 2), 0.0)
    refresh_pool_ranks(base)

    stream = []
    for k in range(300):
        if k % 2 == 0:
            genes = rng.uniform(0, 1, 6)
        else:  # near an existing center so the similarity stage also fires
            jitter = base.granules[rng.integers(0, 12)].center + rng.normal(0, 0.03, 6)
            genes = np.clip(jitter, 0.0, 1.0)
        stream.append(_child(genes, [rng.uniform(0, 1, 6), rng.uniform(0, 1, 6)]))
    affg_fired, modified_fired = [], []
    for child in stream:
        pool = copy.deepcopy(base)
        counters = EvalCounters()
        affg_evaluate(copy.deepcopy(child), pool, spec, counters)
        affg_fired.append(counters.exact == 1)

        pool = copy.deepcopy(base)
        ps = current_pareto_set(pool, 1)
        counters = EvalCounters()
        modified_evaluate(copy.deepcopy(child), pool, ps, spec, counters)
        modified_fired.append(counters.exact == 1)

    assert any(affg_fired) and any(modified_fired)
    for mod, plain in zip(modified_fired, affg_fired):
        assert not (mod and not plain)
    assert sum(modified_fired) < sum(affg_fired)


def test_evaluator_stamps_generations():
    spec = get_problem("zdt1")
    pool = GranulePool(max_size=10, sigma_min=spec.sigma_min)
    counters = EvalCounters()
    strategy = ModifiedAffgEvaluator(spec, pool, counters)
    seed = Individual(genes=np.full(6, 0.5))
    exact_evaluate_and_insert(seed, pool, spec, counters)
    strategy.start_generation()
    assert strategy.pareto_set is not None
    assert strategy.pareto_set.generation_stamp == strategy.generation == 1
    strategy.start_generation()
    assert strategy.pareto_set.generation_stamp == 2
    child = _child(np.full(6, 0.5), [np.full(6, 0.4)])
    strategy.evaluate(child)
    assert child.eval_kind is EvalKind.APPROXIMATED
