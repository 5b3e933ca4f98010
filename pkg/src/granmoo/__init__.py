"""NSGA-II with granule-pool fitness approximation and a Pareto-distance
evaluation filter, benchmarked on the ZDT/UF/CF bi-objective suites."""

from .granulation import (
    AffgEvaluator,
    Granule,
    GranulePool,
    affg_evaluate,
    evict_if_full,
    exact_evaluate_and_insert,
    granule_width,
    insert_granule,
    pool_similarities,
    pool_to_csv,
    refresh_pool_ranks,
    similarity,
)
from .harness import (
    CSV_HEADER,
    ComparisonReport,
    ExperimentConfig,
    ExperimentReport,
    GenerationRecord,
    Method,
    RunResult,
    compare_methods,
    config_to_text,
    emit_plots,
    execute_run,
    parse_config_file,
    parse_config_text,
    records_to_csv,
    run_experiment,
    write_comparison,
)
from .metrics import (
    MetricKind,
    MetricSeries,
    area_under_curve,
    hypervolume_2d,
    igd,
    percent_difference,
)
from .nsga2 import (
    EAConfig,
    EvalCounters,
    EvalKind,
    ExactEvaluator,
    GenerationStats,
    Individual,
    binary_tournament,
    crowding_distance,
    dominance_matrix,
    dominates,
    environmental_selection,
    evolve_generation,
    fast_nondominated_sort,
    nondominated_fronts,
    polynomial_mutation,
    rank_and_crowding,
    sbx_crossover,
)
from .pareto_filter import (
    CurrentParetoSet,
    ModifiedAffgEvaluator,
    current_pareto_set,
    min_distance_to_pareto,
    modified_evaluate,
)
from .problems import (
    ProblemSpec,
    ZDT6_F1_MIN,
    evaluate_problem,
    front_to_csv,
    get_problem,
    problem_names,
    sample_true_front,
)

__version__ = "0.1.0"
