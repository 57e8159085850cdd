"""Command-line entry point.

Exit codes: 0 success, 2 infeasible (or otherwise non-optimal) program,
3 configuration error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench
from .baseline import baseline_for_scenario, write_profile
from .catalog import CUT_MODES, load_relevance, load_scenario
from .demand import simulate_sessions, stationary_demand, total_variation, write_trace
from .errors import NFRError, SolverStatusError
from .lp import write_mps
from .optimizer import (FairnessSpec, build_diverse_lp, build_fair_diverse_lp,
                        build_fair_lp, build_nfr_lp, make_cuts, solve_and_recover,
                        validate_solution, write_solution)

log = logging.getLogger("divnfr")

EXIT_OK, EXIT_INFEASIBLE, EXIT_CONFIG, EXIT_IO = 0, 2, 3, 4


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _scenario(arg):
    path = Path(arg)
    if not path.exists() and arg in bench.bundled_scenarios():
        path = bench.bundled_path(arg)
    return load_scenario(path)


def _relevance(args, cfg):
    if getattr(args, "relevance", None):
        path = Path(args.relevance)
        if path.suffix == ".npz":
            with np.load(path) as data:
                return data["scores"]
        return load_relevance(path, args.threshold)
    return bench.scenario_relevance(cfg)


def _setup(args):
    cfg = _scenario(args.scenario)
    overrides = {}
    for attr, field in (("b", "b"), ("cf", "c_f"), ("cuts", "M_cuts"),
                        ("cut_mode", "cut_mode"), ("fairness", "fairness_kind")):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[field] = value
    if overrides:
        cfg = cfg.replace(**overrides)
    U = _relevance(args, cfg)
    return cfg, U, baseline_for_scenario(cfg, U)


def _build(cfg, profile, algorithm):
    cuts = make_cuts(cfg.cut_mode, cfg.M_cuts)
    fair = FairnessSpec(cfg.fairness_kind, cfg.c_f) if cfg.fairness_kind != "none" else None
    if algorithm == "nfr":
        return build_nfr_lp(profile, cfg), None, None, False
    if fair is None:
        return build_diverse_lp(profile, cfg, cuts=cuts), cuts, None, True
    if cfg.b == 0.0:
        return build_fair_lp(profile, cfg, fair=fair), None, fair, False
    return build_fair_diverse_lp(profile, cfg, cuts=cuts, fair=fair), cuts, fair, True


def cmd_ingest(args):
    U = load_relevance(args.input, args.threshold)
    np.savez_compressed(args.out, scores=U, threshold=args.threshold)
    nnz = int(np.count_nonzero(U))
    print(f"K={U.shape[0]} nonzero={nnz} threshold={args.threshold} -> {args.out}")
    return EXIT_OK


def cmd_bsr(args):
    cfg, _, profile = _setup(args)
    if args.out:
        write_profile(profile, args.out)
    print(f"scenario {bench.scenario_id(cfg)}")
    print(f"BSR cost {profile.cost_bs:.6f}  entropy {profile.entropy_bs:.6f}")
    return EXIT_OK


def cmd_optimize(args):
    cfg, _, profile = _setup(args)
    lp, cuts, fair, diverse = _build(cfg, profile, args.algorithm)
    if args.mps_out:
        write_mps(lp, args.mps_out, free=args.free_mps)
        log.info("wrote %s (%d rows, %d columns)", args.mps_out, lp.n_rows, lp.n_vars)
    sol = solve_and_recover(lp, profile, cfg, backend=args.backend)
    report = validate_solution(sol, profile, cfg, fair=fair, cuts=cuts, diverse=diverse)
    if args.out:
        write_solution(sol, profile, args.out, extra={"valid": int(report.ok)})
    print(f"scenario {bench.scenario_id(cfg)}  program {lp.name}  "
          f"({lp.n_rows} rows, {lp.n_vars} columns, {sol.iterations} iterations)")
    print(f"cost     {sol.cost:.6f}  ({bench.percent(sol.cost, profile.cost_bs):.1f}% of BSR)")
    print(f"entropy  {sol.realized_entropy:.6f}  "
          f"({bench.percent(sol.realized_entropy, profile.entropy_bs):.1f}% of BSR)")
    if diverse:
        print(f"claimed  {sol.claimed_entropy:.6f}  gap {sol.entropy_gap:+.6f}")
    print(f"fairness max={report.f_max:.6f} tv={report.f_tv:.6f} kl={report.f_kl:.6f}")
    print("validation: " + ("ok" if report.ok else "FAILED " + ",".join(report.violations)))
    return EXIT_OK if report.ok else EXIT_INFEASIBLE


def cmd_simulate(args):
    cfg, _, profile = _setup(args)
    if args.policy == "bsr":
        R = profile.policy
    else:
        lp, *_ = _build(cfg, profile, args.policy)
        R = solve_and_recover(lp, profile, cfg, backend=args.backend).policy
    L = args.length or cfg.L
    trace = [] if args.trace else None
    sim = simulate_sessions(profile.p0, R, cfg.alpha, cfg.N, L, args.sessions, args.seed,
                            costs=profile.costs, materialize_lists=args.lists, trace=trace)
    closed = stationary_demand(profile.p0, R, cfg.alpha, cfg.N)
    if trace is not None:
        write_trace(trace, args.trace)
    print(f"steps {args.sessions * L}  (sessions {args.sessions} x length {L})")
    print(f"cost       simulated {sim.cost:.6f}  closed form {float(profile.costs @ closed):.6f}")
    print(f"total variation to closed-form demand {total_variation(sim.demand, closed):.6f}")
    print(f"transient bias bound 1/((1-alpha)L) = {1.0 / ((1.0 - cfg.alpha) * L):.6f}")
    return EXIT_OK


def cmd_sweep(args):
    names = list(args.scenarios)
    if args.bundled:
        names += bench.bundled_scenarios()
    if not names:
        raise NFRError("no scenarios given")
    configs = [_scenario(n) for n in names]
    kinds = [k for k in args.kinds.split(",") if k] if args.kinds else None
    result = bench.sweep(configs, b_list=_floats(args.b_list) if args.b_list else None,
                         cf_list=_floats(args.cf_list) if args.cf_list else None,
                         kinds=kinds, backend=args.backend, jobs=args.jobs)
    result.to_csv(args.out, timing=args.timing)
    bad = [r for r in result.rows if r.status != "optimal" or not r.valid]
    print(f"{len(result.rows)} rows for {len(configs)} scenarios -> {args.out}"
          + (f"; {len(bad)} flagged" if bad else ""))
    return EXIT_OK


def cmd_report(args):
    result = bench.SweepResult.from_csv(args.results)
    text = bench.format_report(result)
    if args.out:
        bench.atomic_write(args.out, text + "\n")
    else:
        print(text)
    if args.curve_out:
        scenario = args.scenario or result.scenarios()[0]
        bench.curve_csv(bench.tradeoff_curve(result, scenario, args.prefix), args.curve_out)
    return EXIT_OK


def _scenario_args(p, optimize=False):
    p.add_argument("--scenario", required=True,
                   help="scenario file, or the name of a bundled scenario")
    p.add_argument("--relevance", help="relevance CSV or ingested .npz (default: synthetic)")
    p.add_argument("--threshold", type=float, default=0.5)
    if optimize:
        p.add_argument("--b", type=float)
        p.add_argument("--fairness", choices=("none", "max", "tv", "kl"))
        p.add_argument("--cf", type=float)
        p.add_argument("--cuts", type=int, help="number of entropy cuts M")
        p.add_argument("--cut-mode", choices=CUT_MODES)
        p.add_argument("--backend", choices=("highs", "simplex"), default="highs")


def build_parser():
    parser = argparse.ArgumentParser(prog="divnfr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="threshold a relevance CSV into an .npz dump")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("bsr", help="baseline profile of a scenario")
    _scenario_args(p)
    p.add_argument("--out", help="profile CSV")
    p.set_defaults(func=cmd_bsr)

    p = sub.add_parser("optimize", help="solve one program")
    _scenario_args(p, optimize=True)
    p.add_argument("--algorithm", choices=("diverse", "nfr"), default="diverse")
    p.add_argument("--mps-out")
    p.add_argument("--free-mps", action="store_true")
    p.add_argument("--out", help="directory for the solution CSVs")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="Monte-Carlo check of the closed-form demand")
    _scenario_args(p, optimize=True)
    p.add_argument("--policy", choices=("bsr", "nfr", "diverse"), default="bsr")
    p.add_argument("--sessions", type=int, default=1000)
    p.add_argument("--length", type=int, help="session length (default: scenario L)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lists", action="store_true", help="draw explicit recommendation lists")
    p.add_argument("--trace", help="CSV trace output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run scenarios over b / c_f grids")
    p.add_argument("scenarios", nargs="*")
    p.add_argument("--bundled", action="store_true", help="add every bundled scenario")
    p.add_argument("--b-list")
    p.add_argument("--cf-list")
    p.add_argument("--kinds", help="comma-separated fairness metrics (max,tv,kl)")
    p.add_argument("--backend", choices=("highs", "simplex"), default="highs")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include wall-clock solve times")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="table and curve data from a sweep CSV")
    p.add_argument("results")
    p.add_argument("--out")
    p.add_argument("--curve-out")
    p.add_argument("--scenario")
    p.add_argument("--prefix", default="Diverse")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SolverStatusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (NFRError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
