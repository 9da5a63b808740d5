"""Command-line driver: solver runs, call tables, benchmarks, model fitting.

Subcommands
    solve          stand-alone or CG-preconditioned multigrid solve
    calls          per-level and total routine-call counts for (kappa, levels)
    predict        model quantities and predicted ms for one (kappa, levels)
    fit            least-squares (alpha, beta) from a kappa,levels,ms CSV
    turning-point  problem size where overhead and computation cost balance
    bench          single-cycle timing sweep over kappa and levels (CSV)

Exit codes: 0 ok, 2 usage, 3 divergence or CG breakdown, 4 iteration budget
exhausted, 5 rank-deficient fit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .costmodel import (
    CostModelParams,
    RankDeficientError,
    fit_params,
    level_calls,
    n_gpu_calls,
    ops_per_unknown,
    predict_runtime,
    total_calls,
    turning_point,
)
from .cycle import (
    CONVERGED,
    DIVERGED,
    CycleConfig,
    bench_cycle,
    build_state,
    solve_standalone,
)
from .krylov import PcgConfig, pcg_solve
from .mesh import Coarsening
from .smoother import SmootherKind, SmootherSpec
from .stencil import ProblemSpec

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIVERGED = 3
EXIT_NOT_CONVERGED = 4
EXIT_FIT_FAILED = 5

_SMOOTHERS = {
    "jacobi": SmootherKind.DAMPED_JACOBI,
    "zebra-xy": SmootherKind.ZEBRA_ALTERNATING,
    "zebra-x": SmootherKind.ZEBRA_X,
}
_COARSENINGS = {"full": Coarsening.FULL_STANDARD, "semi-y": Coarsening.SEMI_Y}


def _parse_kappa(text: str):
    if text.strip().lower() == "inf":
        return math.inf
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"kappa must be a positive integer or 'inf', got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"kappa must be >= 1, got {value}")
    return value


def _parse_kappa_list(text: str):
    return [_parse_kappa(part) for part in text.split(",") if part.strip()]


def _parse_level_list(text: str):
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out or any(n < 1 for n in out):
        raise argparse.ArgumentTypeError(f"invalid level list: {text!r}")
    return out


def _fmt(value) -> str:
    """Round-trip text for numeric fields."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _add_problem_flags(p: argparse.ArgumentParser):
    p.add_argument("--levels", type=int, required=True, help="level count n")
    p.add_argument("--kappa", type=_parse_kappa, default=1, help="cycle counter (int or 'inf')")
    p.add_argument("--eps", type=float, default=1.0, help="anisotropy in (0, 1]")
    p.add_argument("--phi", type=float, default=0.0, help="rotation angle, degrees")
    p.add_argument("--smoother", choices=sorted(_SMOOTHERS), default="jacobi")
    p.add_argument("--coarsening", choices=sorted(_COARSENINGS), default=None,
                   help="default: full (semi-y when --smoother zebra-x)")
    p.add_argument("--omega", type=float, default=0.8, help="Jacobi damping factor")
    p.add_argument("--nu1", type=int, default=2, help="pre-relaxation count")
    p.add_argument("--nu2", type=int, default=2, help="post-relaxation count")
    p.add_argument("--seed", type=int, default=0, help="initial-guess PRNG seed")
    p.add_argument("--coarse-op", choices=["galerkin", "rediscretize"], default="galerkin")


def _problem_and_config(args, parser) -> tuple[ProblemSpec, CycleConfig]:
    smoother_kind = _SMOOTHERS[args.smoother]
    coarsening = _COARSENINGS[args.coarsening] if args.coarsening else None
    if coarsening is None:
        coarsening = Coarsening.SEMI_Y if smoother_kind is SmootherKind.ZEBRA_X else Coarsening.FULL_STANDARD
    elif smoother_kind is SmootherKind.ZEBRA_X and coarsening is not Coarsening.SEMI_Y:
        print("warning: zebra-x is normally paired with --coarsening semi-y", file=sys.stderr)
    try:
        problem = ProblemSpec(epsilon=args.eps, phi=args.phi, seed=args.seed)
        config = CycleConfig(
            n=args.levels,
            kappa=args.kappa,
            nu1=args.nu1,
            nu2=args.nu2,
            smoother=SmootherSpec(smoother_kind, omega=args.omega),
            coarsening=coarsening,
            coarse_op=args.coarse_op,
        )
    except ValueError as exc:
        parser.error(str(exc))
    return problem, config


def _config_echo(args, config: CycleConfig) -> dict:
    return {
        "levels": config.n,
        "kappa": "inf" if config.kappa == math.inf else config.kappa,
        "eps": args.eps,
        "phi": args.phi,
        "smoother": args.smoother,
        "coarsening": config.coarsening.value,
        "omega": args.omega,
        "nu1": config.nu1,
        "nu2": config.nu2,
        "seed": args.seed,
        "coarse_op": args.coarse_op,
        "solver": args.solver,
        "reduction": args.reduction,
        "max_cycles": args.max_cycles,
    }


_RESULT_FIELDS = ("iterations", "initial_norm", "final_norm", "asymptotic_factor",
                  "launches", "op_units", "wall_ms")


def cmd_solve(args, parser) -> int:
    problem, config = _problem_and_config(args, parser)
    if args.reduction <= 1.0:
        parser.error(f"--reduction must exceed 1, got {args.reduction}")
    if args.solver == "standalone":
        report = solve_standalone(problem, config, args.reduction, args.max_cycles)
    else:
        state = build_state(problem, config)
        rng = np.random.default_rng(problem.seed)
        x0 = rng.random(state.v[0].shape)
        pcg_cfg = PcgConfig(cycle=config, target_reduction=args.reduction,
                            max_iterations=args.max_cycles, stop="error")
        report = pcg_solve(state, np.zeros_like(x0), pcg_cfg, x0=x0)

    result = {
        "status": report.status,
        "iterations": report.iterations,
        "initial_norm": report.initial_error_norm,
        "final_norm": report.final_error_norm,
        "asymptotic_factor": report.asymptotic_factor,
        "launches": report.stats.kernel_launches,
        "op_units": report.stats.unknown_touches,
        "wall_ms": report.wall_time_ms,
    }
    record = {
        "config": _config_echo(args, config),
        "result": result,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    if args.out == "json":
        print(json.dumps(record))
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        header = list(record["config"]) + ["status"] + list(_RESULT_FIELDS)
        writer.writerow(header)
        writer.writerow(
            [_fmt(record["config"][k]) for k in record["config"]]
            + [result["status"]]
            + [_fmt(result[k]) for k in _RESULT_FIELDS]
        )
    if report.status == CONVERGED:
        return EXIT_OK
    if report.status == DIVERGED or report.status == "breakdown":
        return EXIT_DIVERGED
    return EXIT_NOT_CONVERGED


def cmd_calls(args, parser) -> int:
    per_level = [level_calls(args.kappa, l) for l in range(1, args.levels + 1)]
    print("level_calls:", " ".join(str(v) for v in per_level))
    print("total_calls:", total_calls(args.kappa, args.levels))
    return EXIT_OK


def cmd_predict(args, parser) -> int:
    try:
        params = CostModelParams(alpha=args.alpha, beta=args.beta, nu=args.nu)
    except ValueError as exc:
        parser.error(str(exc))
    launches = n_gpu_calls(args.kappa, args.levels, args.nu)
    ops = (2 ** args.levels - 1) ** 2 * ops_per_unknown(args.kappa)
    print("launches:", launches)
    print("op_units:", _fmt(ops))
    print("predicted_ms:", _fmt(predict_runtime(params, args.kappa, args.levels)))
    return EXIT_OK


def cmd_fit(args, parser) -> int:
    try:
        if args.input == "-":
            text = sys.stdin.read()
        else:
            with open(args.input, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        parser.error(str(exc))
    reader = csv.DictReader(io.StringIO(text))
    required = {"kappa", "levels", "ms"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        parser.error("fit input needs header kappa,levels,ms")
    rows = []
    try:
        for row in reader:
            kappa = math.inf if row["kappa"].strip().lower() == "inf" else int(row["kappa"])
            rows.append((kappa, int(row["levels"]), float(row["ms"])))
    except (KeyError, ValueError) as exc:
        parser.error(f"bad fit input row: {exc}")
    try:
        alpha, beta = fit_params(rows, nu=args.nu)
    except RankDeficientError as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return EXIT_FIT_FAILED
    print("alpha:", _fmt(alpha))
    print("beta:", _fmt(beta))
    return EXIT_OK


def cmd_turning_point(args, parser) -> int:
    try:
        params = CostModelParams(alpha=args.alpha, beta=args.beta, nu=args.nu)
        tp = turning_point(params, args.kappa)
    except ValueError as exc:
        parser.error(str(exc))
    if tp.degenerate:
        print("degenerate: zero launch overhead, no turning point")
        return EXIT_OK
    if not tp.converged:
        print("warning: fixed-point iteration did not settle; reporting last iterate",
              file=sys.stderr)
    print("n_tp:", _fmt(tp.n_tp))
    print("N_tp:", _fmt(tp.N_tp))
    return EXIT_OK


def cmd_bench(args, parser) -> int:
    try:
        problem = ProblemSpec(epsilon=args.eps, phi=args.phi, seed=args.seed)
    except ValueError as exc:
        parser.error(str(exc))
    if args.smoother == "zebra-x" and args.coarsening == "full":
        print("warning: zebra-x is normally paired with --coarsening semi-y", file=sys.stderr)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    header = ["kappa", "levels", "mean_ms", "launches", "op_units"]
    if args.converge:
        header.append("cycles_to_target")
    writer.writerow(header)
    for kappa in args.kappa:
        for n in args.levels:
            try:
                config = CycleConfig(
                    n=n,
                    kappa=kappa,
                    nu1=args.nu1,
                    nu2=args.nu2,
                    smoother=SmootherSpec(_SMOOTHERS[args.smoother], omega=args.omega),
                    coarsening=_COARSENINGS[args.coarsening] if args.coarsening
                    else (Coarsening.SEMI_Y if args.smoother == "zebra-x" else Coarsening.FULL_STANDARD),
                    coarse_op=args.coarse_op,
                )
            except ValueError as exc:
                parser.error(str(exc))
            cell = bench_cycle(problem, config, args.reps)
            row = [
                "inf" if kappa == math.inf else str(kappa),
                str(n),
                "" if cell.mean_ms is None else _fmt(cell.mean_ms),
                str(cell.launches),
                _fmt(cell.op_units),
            ]
            if args.converge:
                report = solve_standalone(problem, config, args.reduction, args.max_cycles)
                row.append(str(report.iterations))
            writer.writerow(row)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcycle", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run a multigrid solve")
    _add_problem_flags(p_solve)
    p_solve.add_argument("--reduction", type=float, default=1e8, help="target error reduction")
    p_solve.add_argument("--max-cycles", type=int, default=10000)
    p_solve.add_argument("--solver", choices=["standalone", "pcg"], default="standalone")
    p_solve.add_argument("--out", choices=["json", "csv"], default="json")
    p_solve.set_defaults(func=cmd_solve)

    p_calls = sub.add_parser("calls", help="routine-call counts per level")
    p_calls.add_argument("--kappa", type=_parse_kappa, required=True)
    p_calls.add_argument("--levels", type=int, required=True)
    p_calls.set_defaults(func=cmd_calls)

    p_predict = sub.add_parser("predict", help="model prediction for one cell")
    p_predict.add_argument("--alpha", type=float, required=True, help="ms per launch")
    p_predict.add_argument("--beta", type=float, required=True, help="ms per op unit")
    p_predict.add_argument("--kappa", type=_parse_kappa, required=True)
    p_predict.add_argument("--levels", type=int, required=True)
    p_predict.add_argument("--nu", type=int, default=4, help="relaxations per routine call")
    p_predict.set_defaults(func=cmd_predict)

    p_fit = sub.add_parser("fit", help="fit alpha, beta from kappa,levels,ms CSV")
    p_fit.add_argument("--input", default="-", help="CSV path or '-' for stdin")
    p_fit.add_argument("--nu", type=int, default=4)
    p_fit.set_defaults(func=cmd_fit)

    p_tp = sub.add_parser("turning-point", help="overhead/computation balance point")
    p_tp.add_argument("--alpha", type=float, required=True)
    p_tp.add_argument("--beta", type=float, required=True)
    p_tp.add_argument("--kappa", type=_parse_kappa, required=True)
    p_tp.add_argument("--nu", type=int, default=4)
    p_tp.set_defaults(func=cmd_turning_point)

    p_bench = sub.add_parser("bench", help="single-cycle timing sweep (CSV to stdout)")
    p_bench.add_argument("--kappa", type=_parse_kappa_list, required=True,
                         help="comma list, e.g. 1,2,inf")
    p_bench.add_argument("--levels", type=_parse_level_list, required=True,
                         help="comma list or ranges, e.g. 4,5 or 4-8")
    p_bench.add_argument("--reps", type=int, default=200, help="repetitions per cell (0 = dry)")
    p_bench.add_argument("--eps", type=float, default=1.0)
    p_bench.add_argument("--phi", type=float, default=0.0)
    p_bench.add_argument("--smoother", choices=sorted(_SMOOTHERS), default="jacobi")
    p_bench.add_argument("--coarsening", choices=sorted(_COARSENINGS), default=None)
    p_bench.add_argument("--omega", type=float, default=0.8)
    p_bench.add_argument("--nu1", type=int, default=2)
    p_bench.add_argument("--nu2", type=int, default=2)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--coarse-op", choices=["galerkin", "rediscretize"], default="galerkin")
    p_bench.add_argument("--converge", action="store_true",
                         help="also report cycles to reach --reduction")
    p_bench.add_argument("--reduction", type=float, default=1e8)
    p_bench.add_argument("--max-cycles", type=int, default=10000)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, parser)
