"""Command-line front end.

Exit codes: 0 success, 1 bad input, 2 infeasible instance.
"""

from __future__ import annotations

import argparse
import sys

from . import experiments, fileio
from .model import ModelError, aoi_from_max_delay, validate_network, validate_solution
from .mmd import min_max_delay
from .solvers import (
    AllInfeasibleError,
    Objective,
    approx_solve,
    solve_mmd_problem,
    solve_optimal,
)

OBJECTIVES = {
    "mpa": Objective.PEAK_AOI,
    "maa": Objective.AVG_AOI,
    "mmd": Objective.MAX_DELAY,
}


def _fr(value) -> str:
    return fileio.format_rational(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aoiflow",
        description="Periodic multi-path schedules minimizing age-of-information",
    )
    parser.add_argument("--quiet", action="store_true", help="suppress human output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal solve over the period window")
    p.add_argument("objective", choices=["mpa", "maa", "mmd"])
    p.add_argument("instance")
    p.add_argument("--sol", help="write the schedule here")
    p.add_argument("--csv", help="write the per-period sweep here")
    p.add_argument("--mu-override", type=int, help="search ceiling override")

    p = sub.add_parser("approx", help="steady-rate approximation framework")
    p.add_argument("objective", choices=["mpa", "maa"])
    p.add_argument("instance")
    p.add_argument("--sol", help="write the schedule here")
    p.add_argument("--alpha", default="1", help="declared backend guarantee (p/q)")

    p = sub.add_parser("validate", help="check a schedule file against an instance")
    p.add_argument("instance")
    p.add_argument("solution")

    p = sub.add_parser("mmd-at-period", help="minimum maximum delay at one period")
    p.add_argument("instance")
    p.add_argument("period", type=int)
    p.add_argument("--sol", help="write the schedule here")
    p.add_argument("--mu-override", type=int)

    p = sub.add_parser("gen", help="generate a topology")
    p.add_argument(
        "kind", choices=["complete", "grid", "erdos-renyi", "watts-strogatz", "copying"]
    )
    p.add_argument("params", nargs="*", help="model parameters (see docs)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="per-period optimal vs replay table")
    p.add_argument("instance")
    p.add_argument("--csv", required=True)
    p.add_argument("--mu-override", type=int)

    p = sub.add_parser("batch", help="summary over seeded random instances")
    p.add_argument(
        "kind", choices=["complete", "grid", "erdos-renyi", "watts-strogatz", "copying"]
    )
    p.add_argument("params", nargs="*")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=int, default=5, help="batch = scale * capacity")
    p.add_argument("--periods", type=int, default=10)
    p.add_argument("--csv", required=True)
    return parser


def _spec_for(kind: str, params: list[str], seed: int) -> experiments.TopologySpec:
    try:
        if kind == "complete":
            (n,) = params
            return experiments.complete_graph(int(n), seed)
        if kind == "grid":
            rows, cols = params
            return experiments.grid_graph(int(rows), int(cols), seed)
        if kind == "erdos-renyi":
            n, m = params
            return experiments.erdos_renyi(int(n), int(m), seed)
        if kind == "watts-strogatz":
            n, k, p = params
            return experiments.watts_strogatz(int(n), int(k), float(p), seed)
        n, p = params
        return experiments.copying_model(int(n), float(p), seed)
    except (ValueError, TypeError) as exc:
        raise ModelError(f"bad parameters for {kind}: {params}") from exc


def _emit(args, text: str) -> None:
    if not args.quiet:
        print(text)


def _cmd_solve(args) -> int:
    inst = fileio.load_instance(args.instance)
    objective = OBJECTIVES[args.objective]
    try:
        if objective is Objective.MAX_DELAY:
            outcome = solve_mmd_problem(inst, args.mu_override)
        else:
            outcome = solve_optimal(inst, objective, args.mu_override)
    except AllInfeasibleError:
        _emit(args, "infeasible at every period")
        return 2
    best = outcome.best
    rates = ",".join(_fr(r) for r in sorted(outcome.optimal_throughputs))
    _emit(
        args,
        f"objective={args.objective} R={_fr(best.throughput)} T={best.period} "
        f"M={best.max_delay} peak={best.peak_aoi} avg={_fr(best.avg_aoi)} "
        f"optimal_throughputs={{{rates}}}",
    )
    if args.sol:
        fileio.save_solution(inst.network, outcome.solution, inst.batch, args.sol)
    if args.csv:
        rows = experiments.run_sweep(inst, args.mu_override)
        experiments.write_sweep_csv(rows, args.instance, args.csv)
    return 0


def _cmd_approx(args) -> int:
    inst = fileio.load_instance(args.instance)
    objective = OBJECTIVES[args.objective]
    try:
        outcome = approx_solve(
            inst, objective, alpha=fileio.parse_rational(args.alpha)
        )
    except AllInfeasibleError:
        _emit(args, "infeasible at every period")
        return 2
    rep = outcome.report
    _emit(
        args,
        f"objective={args.objective} R={_fr(rep.throughput)} T={rep.period} "
        f"M={rep.max_delay} peak={rep.peak_aoi} avg={_fr(rep.avg_aoi)} "
        f"ratio_bound={_fr(outcome.ratio_bound)}",
    )
    if args.sol:
        fileio.save_solution(inst.network, outcome.solution, inst.batch, args.sol)
    return 0


def _cmd_validate(args) -> int:
    inst = fileio.load_instance(args.instance)
    sol, batch = fileio.load_solution(inst.network, args.solution)
    if batch != inst.batch:
        _emit(args, f"schedule batch {_fr(batch)} != instance batch {_fr(inst.batch)}")
        return 2
    ok, max_delay, violations = validate_solution(inst, sol)
    if not ok:
        for v in violations:
            _emit(args, f"violation {v}")
        return 2
    peak, avg = aoi_from_max_delay(max_delay, sol.period)
    _emit(args, f"ok M={max_delay} peak={peak} avg={_fr(avg)} T={sol.period}")
    return 0


def _cmd_mmd_at_period(args) -> int:
    inst = fileio.load_instance(args.instance)
    result = min_max_delay(inst, args.period, args.mu_override)
    if result is None:
        _emit(args, f"infeasible at period {args.period}")
        return 2
    peak, avg = aoi_from_max_delay(result.max_delay, result.period)
    _emit(
        args,
        f"T={result.period} M={result.max_delay} peak={peak} avg={_fr(avg)} "
        f"probes={len(result.probes)}",
    )
    if args.sol:
        fileio.save_solution(inst.network, result.solution, inst.batch, args.sol)
    return 0


def _cmd_gen(args) -> int:
    spec = _spec_for(args.kind, args.params, args.seed)
    net = experiments.generate(spec)
    problems = validate_network(net)
    if problems:
        raise ModelError(f"generated network invalid: {problems}")
    fileio.save_network(net, args.out)
    _emit(
        args,
        f"{args.kind} nodes={len(net.nodes)} "
        f"undirected_edges={experiments.undirected_edge_count(net)} -> {args.out}",
    )
    return 0


def _cmd_sweep(args) -> int:
    inst = fileio.load_instance(args.instance)
    rows = experiments.run_sweep(inst, args.mu_override)
    experiments.write_sweep_csv(rows, args.instance, args.csv)
    if all(row.status == "infeasible" for row in rows):
        _emit(args, "infeasible at every period")
        return 2
    _emit(args, f"{len(rows)} periods -> {args.csv}")
    return 0


def _cmd_batch(args) -> int:
    summaries = []
    for i in range(args.count):
        spec = _spec_for(args.kind, args.params, args.seed + i)
        net = experiments.generate(spec)
        sender, receiver = experiments.pick_endpoints(net, args.seed + i)
        inst = experiments.scaled_instance(
            net, sender, receiver, args.scale, args.periods
        )
        rows = experiments.run_sweep(inst)
        summaries.append(experiments.summarize_sweep(f"{args.kind}-{args.seed + i}", rows))
    experiments.write_batch_csv(summaries, args.csv)
    _emit(args, f"{len(summaries)} instances -> {args.csv}")
    return 0


COMMANDS = {
    "solve": _cmd_solve,
    "approx": _cmd_approx,
    "validate": _cmd_validate,
    "mmd-at-period": _cmd_mmd_at_period,
    "gen": _cmd_gen,
    "sweep": _cmd_sweep,
    "batch": _cmd_batch,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:  # ModelError, bad JSON, bad numbers
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
