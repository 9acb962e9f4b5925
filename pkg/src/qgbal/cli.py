"""Command-line interface: run experiments, self-check, inspect schedules."""

from __future__ import annotations

import argparse
import sys

from .experiment import ConfigError, parse_config_file, run_experiment
from .grid import Grid
from .schedule import make_schedule


def _cmd_run(args) -> int:
    try:
        config = parse_config_file(args.config)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    result = run_experiment(config, out_root=args.out)
    print(f"run directory: {result.directory}")
    for name, ok, detail in result.assertions:
        print(f"{'PASS' if ok else 'FAIL'}: {name} ({detail})")
    return 0 if result.ok else 1


def _cmd_check(args) -> int:
    from .oracles import run_oracles

    grid = Grid(args.grid, args.grid, args.grid)
    ok = True
    for res in run_oracles(grid=grid, seed=args.seed):
        print(f"{'PASS' if res.ok else 'FAIL'}: {res.name} ({res.detail})")
        ok = ok and res.ok
    return 0 if ok else 1


def _cmd_schedule(args) -> int:
    sched = make_schedule(args.eps, args.sigma, args.mu, args.s)
    print(f"eps     = {sched.eps:g}")
    print(f"sigma   = {sched.sigma:g}")
    print(f"mu      = {sched.mu:g}")
    print(f"kappa   = {sched.kappa:.6g}")
    print(f"delta   = {sched.delta:.6g}")
    print(f"eta     = {sched.eta:.6g}")
    print(f"n_star  = {sched.n_star}")
    for name, status in sched.admissibility.items():
        print(f"admissibility: {name}: {status}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qgbal",
        description="Rotating stratified flow solver with a balance hierarchy",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="path to the INI config")
    p_run.add_argument("--out", default=None, help="output root (default $QGBAL_OUT or ./runs)")
    p_run.set_defaults(func=_cmd_run)

    p_check = sub.add_parser("check", help="run the cross-check battery")
    p_check.add_argument("--grid", type=int, default=16, help="cubic grid size")
    p_check.add_argument("--seed", type=int, default=0)
    p_check.set_defaults(func=_cmd_check)

    p_sched = sub.add_parser("schedule", help="print the eps-derived parameters")
    p_sched.add_argument("--eps", type=float, required=True)
    p_sched.add_argument("--sigma", type=float, required=True)
    p_sched.add_argument("--mu", type=float, default=0.05)
    p_sched.add_argument("--s", type=float, default=2.0)
    p_sched.set_defaults(func=_cmd_schedule)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
