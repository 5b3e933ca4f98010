"""Command-line interface.

Subcommands: ``run`` (one method), ``compare`` (paired methods),
``list-problems`` and ``true-front``.  Experiment settings come from an
optional flat config file with command-line flags taking precedence; the
``GRANMOO_OUT`` environment variable overrides the output directory.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .harness import (
    ExperimentConfig,
    Method,
    compare_methods,
    emit_plots,
    parse_config_file,
    run_experiment,
    write_comparison,
)
from .problems import front_to_csv, get_problem, problem_names, sample_true_front

_CONFIG_KEYS = (
    "problem",
    "method",
    "output_dir",
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
    "dump_pool",
)


def _add_experiment_flags(p: argparse.ArgumentParser, with_method: bool) -> None:
    p.add_argument("--config", type=Path, help="flat 'key = value' configuration file")
    p.add_argument("--problem", help="benchmark name, see list-problems")
    if with_method:
        p.add_argument("--method", choices=[m.value for m in Method])
    p.add_argument("--runs", type=int, help="independent runs (default 30)")
    p.add_argument("--seed", type=int, dest="base_seed", help="base seed; run i uses seed+i")
    p.add_argument("--out", dest="output_dir", help="output directory")
    p.add_argument("--pop-size", type=int, dest="pop_size")
    p.add_argument("--generations", type=int)
    p.add_argument("--crossover-prob", type=float, dest="crossover_prob")
    p.add_argument("--mutation-prob", type=float, dest="mutation_prob")
    p.add_argument("--eta-c", type=float, dest="eta_c")
    p.add_argument("--eta-m", type=float, dest="eta_m")
    p.add_argument("--pool-max-size", type=int, dest="pool_max_size")
    p.add_argument("--threshold", type=float)
    p.add_argument("--true-front-points", type=int, dest="true_front_points")
    p.add_argument(
        "--no-reevaluate-final",
        action="store_const",
        const=False,
        dest="reevaluate_final",
        help="report final fronts with their assigned (possibly approximated) objectives",
    )
    p.add_argument("--dump-pool", action="store_const", const=True, dest="dump_pool")


def _gather(args: argparse.Namespace) -> dict:
    """Config file values, overridden by explicit flags, then by GRANMOO_OUT."""
    values: dict = {}
    if getattr(args, "config", None):
        values.update(parse_config_file(args.config))
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    env_out = os.environ.get("GRANMOO_OUT")
    if env_out:
        values["output_dir"] = env_out
    for required in ("problem", "output_dir"):
        if required not in values:
            raise ValueError(f"missing required setting: {required}")
    return values


def _cmd_run(args) -> int:
    values = _gather(args)
    if "method" not in values:
        raise ValueError("missing required setting: method")
    cfg = ExperimentConfig(**values)
    report = run_experiment(cfg)
    print(
        f"{cfg.problem} {cfg.method.value}: runs={cfg.runs} "
        f"mean_final_hv={report.mean_final_hv:.6g} "
        f"mean_final_igd={report.mean_final_igd:.6g} "
        f"mean_total_exact_evals={report.summary['mean_total_exact_evals']:.6g}"
    )
    print(f"wrote {cfg.output_dir}")
    return 0


def _cmd_compare(args) -> int:
    values = _gather(args)
    values.pop("method", None)
    names = [m.strip() for m in args.methods.split(",") if m.strip()]
    if len(names) != 2:
        raise ValueError("--methods expects exactly two comma-separated method names")
    root = Path(values.pop("output_dir"))
    sub = [names[0], names[1] if names[1] != names[0] else f"{names[1]}-2"]
    cfg_a = ExperimentConfig(method=names[0], output_dir=root / sub[0], **values)
    cfg_b = ExperimentConfig(method=names[1], output_dir=root / sub[1], **values)
    report = compare_methods(cfg_a, cfg_b)
    write_comparison(report, root)
    emit_plots(report, root, images=args.images)
    for metric, a, b, pct in report.rows:
        print(f"{values['problem']} {metric}: auc[{names[0]}]={a:.6g} auc[{names[1]}]={b:.6g} pct_diff={pct:.4g}")
    print(f"wrote {root}")
    return 0


def _cmd_list_problems(_args) -> int:
    for name in problem_names():
        spec = get_problem(name)
        ref = spec.hv_reference
        print(
            f"{name:<5} d={spec.d:<3} constraints={spec.n_constraints} "
            f"sigma_min={spec.sigma_min:g} ref=({ref[0]:g},{ref[1]:g})"
        )
    return 0


def _cmd_true_front(args) -> int:
    spec = get_problem(args.problem)
    text = front_to_csv(sample_true_front(spec, args.points))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="granmoo",
        description="NSGA-II with granule-based fitness approximation on ZDT/UF/CF benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one method on one problem")
    _add_experiment_flags(p_run, with_method=True)
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="run two methods and pair their curves")
    _add_experiment_flags(p_cmp, with_method=False)
    p_cmp.add_argument("--methods", required=True, help="two names, e.g. affg,modified-affg")
    p_cmp.add_argument("--images", action="store_true", help="also render PNG figures")
    p_cmp.set_defaults(func=_cmd_compare)

    p_list = sub.add_parser("list-problems", help="print the benchmark registry")
    p_list.set_defaults(func=_cmd_list_problems)

    p_front = sub.add_parser("true-front", help="sample an analytical Pareto front as CSV")
    p_front.add_argument("--problem", required=True)
    p_front.add_argument("--points", type=int, default=1000)
    p_front.add_argument("--out", help="write to a file instead of stdout")
    p_front.set_defaults(func=_cmd_true_front)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
