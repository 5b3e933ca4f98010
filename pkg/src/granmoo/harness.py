"""Experiment harness: seeded multi-run campaigns with CSV telemetry.

One experiment = one (problem, evaluation method) pair executed for
``runs`` independent seeds (``base_seed + i``).  Every run logs a row per
generation -- cumulative exact evaluations, hypervolume, IGD and the two
approximation counters -- and the harness aggregates cross-run mean series,
trapezoidal areas under them, and endpoint quality.

All text outputs are deterministic given the configuration: UTF-8, LF line
endings, floats at 10 significant digits.  Wall-clock timestamps are
confined to ``meta.json`` so the CSVs of two identical invocations compare
byte-for-byte.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

import numpy as np

from .granulation import AffgEvaluator, GranulePool, insert_granule, pool_to_csv
from .metrics import MetricKind, MetricSeries, area_under_curve, hypervolume_2d, igd, percent_difference
from .nsga2 import (
    EAConfig,
    EvalCounters,
    EvalKind,
    ExactEvaluator,
    Individual,
    evolve_generation,
    fast_nondominated_sort,
)
from .pareto_filter import ModifiedAffgEvaluator
from .problems import ProblemSpec, evaluate_problem, get_problem, sample_true_front

CSV_HEADER = "generation,cum_exact_evals,hv,igd,approx_count,reject_count"


class Method(str, Enum):
    EXACT = "exact"
    AFFG = "affg"
    MODIFIED_AFFG = "modified-affg"


@dataclass
class GenerationRecord:
    generation: int
    cum_exact_evals: int
    hv: float
    igd: float
    approx_count: int
    reject_count: int


@dataclass
class RunResult:
    seed: int
    records: list[GenerationRecord]
    front_genes: np.ndarray
    front_objectives: np.ndarray
    totals: EvalCounters
    final_hv: float
    final_igd: float


@dataclass
class ExperimentConfig:
    """Flat experiment description; every field is config-file addressable."""

    problem: str
    method: Method
    output_dir: Path | str
    runs: int = 30
    base_seed: int = 0
    pop_size: int = 50
    generations: int = 100
    crossover_prob: float = 0.9
    mutation_prob: float | None = None  # None -> 1/d for the chosen problem
    eta_c: float = 20.0
    eta_m: float = 20.0
    pool_max_size: int | None = None  # None -> 2 * pop_size
    threshold: float = 0.9
    reevaluate_final: bool = True
    true_front_points: int = 1000
    dump_pool: bool = False

    def __post_init__(self):
        self.method = Method(self.method)
        self.output_dir = Path(self.output_dir)
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if not 0 <= self.base_seed < 2**64:
            raise ValueError("base_seed must be a 64-bit unsigned integer")

    def resolved_mutation_prob(self, d: int) -> float:
        return self.mutation_prob if self.mutation_prob is not None else 1.0 / d

    def resolved_pool_max_size(self) -> int:
        return self.pool_max_size if self.pool_max_size is not None else 2 * self.pop_size

    def ea(self, spec: ProblemSpec, seed: int) -> EAConfig:
        return EAConfig(
            pop_size=self.pop_size,
            generations=self.generations,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.resolved_mutation_prob(spec.d),
            eta_c=self.eta_c,
            eta_m=self.eta_m,
            rng_seed=seed,
        )


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    results: list[RunResult]
    generations: np.ndarray
    mean_cum_evals: np.ndarray
    mean_hv: np.ndarray
    mean_igd: np.ndarray
    auc_evals: float
    auc_hv: float
    auc_igd: float
    mean_final_hv: float
    mean_final_igd: float
    summary: dict


@dataclass
class ComparisonReport:
    a: ExperimentReport
    b: ExperimentReport
    rows: list[tuple[str, float, float, float]]  # metric, auc_a, auc_b, pct diff


# ---------------------------------------------------------------------------
# single run


def _population_quality(pop, spec, front_sample) -> tuple[float, float, np.ndarray, np.ndarray]:
    """(hv, igd, front objectives, front index array) of the first front.

    Under constrained domination the first front is all-feasible whenever any
    feasible member exists, so filtering to zero violation before the
    hypervolume sweep drops points only in the all-infeasible case.
    """
    front = fast_nondominated_sort(pop)[0]
    objectives = np.array([pop[i].objectives for i in front])
    feasible = np.array([pop[i].violation for i in front]) == 0.0
    hv = hypervolume_2d(objectives[feasible], spec.hv_reference)
    return hv, igd(front_sample, objectives), objectives, front


def make_strategy(method: Method, spec: ProblemSpec, counters: EvalCounters, pool: GranulePool | None):
    if method is Method.EXACT:
        return ExactEvaluator(spec, counters)
    if method is Method.AFFG:
        return AffgEvaluator(spec, pool, counters)
    return ModifiedAffgEvaluator(spec, pool, counters)


def execute_run(
    spec: ProblemSpec,
    method: Method,
    ea: EAConfig,
    pool_max_size: int,
    threshold: float,
    front_sample: np.ndarray,
    reevaluate_final: bool = True,
) -> tuple[RunResult, GranulePool | None]:
    """One seeded run of the configured method.

    Generation 0 is always evaluated exactly and (for the pool-backed
    methods) archived wholesale, so the similarity gate starts with material.
    Final-front re-evaluation is a reporting step: it does not touch the
    telemetry or the evaluation totals.
    """
    rng = np.random.default_rng(ea.rng_seed)
    counters = EvalCounters()
    pop: list[Individual] = []
    for genes in rng.uniform(spec.lower, spec.upper, size=(ea.pop_size, spec.d)):
        ind = Individual(genes=genes)
        ind.objectives, ind.violation = evaluate_problem(spec, genes)
        ind.eval_kind = EvalKind.EXACT
        counters.exact += 1
        pop.append(ind)

    pool = None
    if method is not Method.EXACT:
        pool = GranulePool(max_size=pool_max_size, sigma_min=spec.sigma_min, threshold=threshold)
        for ind in pop:
            insert_granule(pool, ind.genes, ind.objectives, ind.violation)
    strategy = make_strategy(method, spec, counters, pool)

    records = []
    for gen in range(1, ea.generations + 1):
        pop, stats = evolve_generation(pop, spec, strategy, ea, rng)
        hv, igd_value, _, _ = _population_quality(pop, spec, front_sample)
        records.append(
            GenerationRecord(gen, counters.exact, hv, igd_value, stats.approx, stats.reject)
        )

    if reevaluate_final:
        for ind in pop:
            ind.objectives, ind.violation = evaluate_problem(spec, ind.genes)
            ind.eval_kind = EvalKind.EXACT
    final_hv, final_igd, front_objectives, front = _population_quality(pop, spec, front_sample)
    result = RunResult(
        seed=ea.rng_seed,
        records=records,
        front_genes=np.array([pop[i].genes for i in front]),
        front_objectives=front_objectives,
        totals=counters,
        final_hv=final_hv,
        final_igd=final_igd,
    )
    return result, pool


# ---------------------------------------------------------------------------
# experiment = many runs


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def records_to_csv(records: list[GenerationRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.generation},{r.cum_exact_evals},{_fmt(r.hv)},{_fmt(r.igd)},"
            f"{r.approx_count},{r.reject_count}"
        )
    return "\n".join(lines) + "\n"


def front_to_rows(genes: np.ndarray, objectives: np.ndarray) -> str:
    d = genes.shape[1]
    lines = [",".join([f"x{i}" for i in range(d)] + ["f1", "f2"])]
    for g, f in zip(genes, objectives):
        lines.append(",".join([_fmt(v) for v in g] + [_fmt(f[0]), _fmt(f[1])]))
    return "\n".join(lines) + "\n"


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Execute all runs, write per-run and aggregate artifacts, and report.

    Output files: ``run_XXX.csv`` and ``front_XXX.csv`` per run (plus
    ``pool_XXX.csv`` when pool dumping is on), ``mean_series.csv``,
    ``summary.json``, ``config.txt`` (resolved, re-runnable) and
    ``meta.json`` (timestamps only).
    """
    spec = get_problem(cfg.problem)
    front_sample = sample_true_front(spec, cfg.true_front_points)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()

    results = []
    for i in range(cfg.runs):
        result, pool = execute_run(
            spec,
            cfg.method,
            cfg.ea(spec, cfg.base_seed + i),
            cfg.resolved_pool_max_size(),
            cfg.threshold,
            front_sample,
            cfg.reevaluate_final,
        )
        results.append(result)
        _write_text(out / f"run_{i:03d}.csv", records_to_csv(result.records))
        _write_text(out / f"front_{i:03d}.csv", front_to_rows(result.front_genes, result.front_objectives))
        if cfg.dump_pool and pool is not None:
            _write_text(out / f"pool_{i:03d}.csv", pool_to_csv(pool))

    generations = np.arange(1, cfg.generations + 1)
    mean_cum = np.mean([[r.cum_exact_evals for r in res.records] for res in results], axis=0)
    mean_hv = np.mean([[r.hv for r in res.records] for res in results], axis=0)
    mean_igd = np.mean([[r.igd for r in res.records] for res in results], axis=0)

    lines = ["generation,cum_exact_evals,hv,igd"]
    for g, c, h, d_ in zip(generations, mean_cum, mean_hv, mean_igd):
        lines.append(f"{g},{_fmt(c)},{_fmt(h)},{_fmt(d_)}")
    _write_text(out / "mean_series.csv", "\n".join(lines) + "\n")

    auc_evals = area_under_curve(MetricSeries(MetricKind.CUM_EXACT_EVALS, generations, mean_cum))
    auc_hv = area_under_curve(MetricSeries(MetricKind.HV, generations, mean_hv))
    auc_igd = area_under_curve(MetricSeries(MetricKind.IGD, generations, mean_igd))
    mean_final_hv = float(np.mean([r.final_hv for r in results]))
    mean_final_igd = float(np.mean([r.final_igd for r in results]))

    summary = {
        "problem": cfg.problem,
        "method": cfg.method.value,
        "runs": cfg.runs,
        "base_seed": cfg.base_seed,
        "pop_size": cfg.pop_size,
        "generations": cfg.generations,
        "mean_final_hv": mean_final_hv,
        "mean_final_igd": mean_final_igd,
        "mean_total_exact_evals": float(np.mean([r.totals.exact for r in results])),
        "auc_cum_exact_evals": auc_evals,
        "auc_hv": auc_hv,
        "auc_igd": auc_igd,
        "per_run": [
            {
                "run": i,
                "seed": r.seed,
                "exact": r.totals.exact,
                "approx": r.totals.approx,
                "reject": r.totals.reject,
                "final_hv": r.final_hv,
                "final_igd": r.final_igd,
            }
            for i, r in enumerate(results)
        ],
    }
    _write_text(out / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write_text(out / "config.txt", config_to_text(cfg, spec))
    _write_text(
        out / "meta.json",
        json.dumps(
            {
                "created_utc": datetime.now(timezone.utc).isoformat(),
                "elapsed_seconds": time.monotonic() - started,
            },
            indent=2,
        )
        + "\n",
    )
    return ExperimentReport(
        config=cfg,
        results=results,
        generations=generations,
        mean_cum_evals=mean_cum,
        mean_hv=mean_hv,
        mean_igd=mean_igd,
        auc_evals=auc_evals,
        auc_hv=auc_hv,
        auc_igd=auc_igd,
        mean_final_hv=mean_final_hv,
        mean_final_igd=mean_final_igd,
        summary=summary,
    )


# ---------------------------------------------------------------------------
# paired comparison

_SHARED_FIELDS = (
    "problem",
    "runs",
    "base_seed",
    "pop_size",
    "generations",
    "crossover_prob",
    "mutation_prob",
    "eta_c",
    "eta_m",
    "pool_max_size",
    "threshold",
    "reevaluate_final",
    "true_front_points",
)


def compare_methods(cfg_a: ExperimentConfig, cfg_b: ExperimentConfig) -> ComparisonReport:
    """Run two methods under identical settings and pair their curve areas.

    The first configuration is the baseline of every percentage difference.
    A baseline area of zero yields NaN for that row rather than an error.
    """
    for name in _SHARED_FIELDS:
        if getattr(cfg_a, name) != getattr(cfg_b, name):
            raise ValueError(f"mismatched problem settings: {name} differs between methods")
    rep_a = run_experiment(cfg_a)
    rep_b = run_experiment(cfg_b)
    rows = []
    for metric, a, b in (
        ("cum_exact_evals", rep_a.auc_evals, rep_b.auc_evals),
        ("hv", rep_a.auc_hv, rep_b.auc_hv),
        ("igd", rep_a.auc_igd, rep_b.auc_igd),
    ):
        pct = percent_difference(a, b) if a != 0 else float("nan")
        rows.append((metric, a, b, pct))
    return ComparisonReport(a=rep_a, b=rep_b, rows=rows)


def write_comparison(report: ComparisonReport, out_dir: Path | str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name_a = report.a.config.method.value
    name_b = report.b.config.method.value
    lines = [f"metric,auc_{name_a},auc_{name_b},percent_difference"]
    for metric, a, b, pct in report.rows:
        lines.append(f"{metric},{_fmt(a)},{_fmt(b)},{_fmt(pct)}")
    _write_text(out / "comparison.csv", "\n".join(lines) + "\n")


def emit_plots(report: ComparisonReport, out_dir: Path | str, images: bool = False) -> list[Path]:
    """Write the plotted-data files (always) and PNG figures (on request).

    Each ``plotdata_*.csv`` mirrors the two mean series row-for-row, one
    column per method, so the figures can be regenerated by any tool.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name_a = report.a.config.method.value
    name_b = report.b.config.method.value
    panels = (
        ("evals", "mean cumulative exact evaluations", report.a.mean_cum_evals, report.b.mean_cum_evals),
        ("hv", "mean hypervolume", report.a.mean_hv, report.b.mean_hv),
        ("igd", "mean IGD", report.a.mean_igd, report.b.mean_igd),
    )
    written = []
    for stem, label, ya, yb in panels:
        lines = [f"generation,{name_a},{name_b}"]
        for g, va, vb in zip(report.a.generations, ya, yb):
            lines.append(f"{g},{_fmt(va)},{_fmt(vb)}")
        path = out / f"plotdata_{stem}.csv"
        _write_text(path, "\n".join(lines) + "\n")
        written.append(path)
        if images:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt

            fig, ax = plt.subplots(figsize=(6, 4))
            ax.plot(report.a.generations, ya, label=name_a)
            ax.plot(report.b.generations, yb, label=name_b, linestyle="--")
            ax.set_xlabel("generation")
            ax.set_ylabel(label)
            ax.set_title(report.a.config.problem)
            ax.legend()
            fig.tight_layout()
            img = out / f"{stem}.png"
            fig.savefig(img)
            plt.close(fig)
            written.append(img)
    return written


# ---------------------------------------------------------------------------
# flat key = value configuration files

_TRUE = {"true", "1", "yes", "on"}
_FALSE = {"false", "0", "no", "off"}


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_optional(parser):
    def parse(text):
        return None if text.lower() == "none" else parser(text)

    return parse


_FIELD_PARSERS = {
    "problem": str,
    "method": Method,
    "output_dir": str,
    "runs": int,
    "base_seed": int,
    "pop_size": int,
    "generations": int,
    "crossover_prob": float,
    "mutation_prob": _parse_optional(float),
    "eta_c": float,
    "eta_m": float,
    "pool_max_size": _parse_optional(int),
    "threshold": float,
    "reevaluate_final": _parse_bool,
    "true_front_points": int,
    "dump_pool": _parse_bool,
}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, blanks ignored."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _FIELD_PARSERS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = _FIELD_PARSERS[key](value)
        except ValueError as exc:
            raise ValueError(f"config line {lineno}: bad value for {key}: {exc}") from None
    return values


def parse_config_file(path: Path | str) -> dict:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def config_to_text(cfg: ExperimentConfig, spec: ProblemSpec | None = None) -> str:
    """Serialize a configuration with every default resolved.

    The result parses back through :func:`parse_config_text`, so a written
    experiment can be reproduced from its own ``config.txt``.
    """
    if spec is None:
        spec = get_problem(cfg.problem)
    pairs = [
        ("problem", cfg.problem),
        ("method", cfg.method.value),
        ("output_dir", str(cfg.output_dir)),
        ("runs", cfg.runs),
        ("base_seed", cfg.base_seed),
        ("pop_size", cfg.pop_size),
        ("generations", cfg.generations),
        ("crossover_prob", repr(cfg.crossover_prob)),
        ("mutation_prob", repr(cfg.resolved_mutation_prob(spec.d))),
        ("eta_c", repr(cfg.eta_c)),
        ("eta_m", repr(cfg.eta_m)),
        ("pool_max_size", cfg.resolved_pool_max_size()),
        ("threshold", repr(cfg.threshold)),
        ("reevaluate_final", "true" if cfg.reevaluate_final else "false"),
        ("true_front_points", cfg.true_front_points),
        ("dump_pool", "true" if cfg.dump_pool else "false"),
    ]
    return "\n".join(f"{k} = {v}" for k, v in pairs) + "\n"
