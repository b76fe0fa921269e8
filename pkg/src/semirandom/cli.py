"""Command-line harness.

    semirandom simulate --n 100000 --trials 20 --mode full-cycle --out-dir runs/sim
    semirandom ode --cap 3 --out-dir runs/ode
    semirandom compare --n 100000 --trials 20 --out-dir runs/cmp
    semirandom verify --n 1000 --seed 3

Exit codes: 0 success, 1 bad arguments, 2 invariant violation or failed cycle check.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from . import ode
from .chart import ChartSpec, emit_chart
from .closer import close_cycle
from .experiment import (
    mean_trajectory,
    run_trials,
    summarize,
    write_json,
    write_rows_csv,
)
from .process import Config, ProcessState, StopMode, default_sample_every
from .verify import check_invariants, verify_hamilton_cycle

log = logging.getLogger("semirandom")

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _unit_interval(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _add_process_args(p, n_default):
    p.add_argument("--n", type=_positive_int, default=n_default)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--cap", type=int, choices=(2, 3), default=3)
    p.add_argument("--pairing", choices=("on", "off"), default="on")
    p.add_argument("--mode", choices=[m.value for m in StopMode], default=StopMode.FULL_CYCLE.value)
    p.add_argument("--epsilon", type=_unit_interval, default=0.01)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="semirandom", description="Paired-stub Hamilton cycle strategy: simulation and fluid limit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="seeded multi-trial simulation")
    _add_process_args(sim, 10_000)
    sim.add_argument("--trials", type=_positive_int, default=1)
    sim.add_argument("--sample-every", type=_positive_int, default=None)
    sim.add_argument("--jobs", type=_positive_int, default=1)
    sim.add_argument("--out-dir", type=Path, default=Path("out"))

    o = sub.add_parser("ode", help="integrate the fluid limit")
    o.add_argument("--cap", type=int, choices=(2, 3), default=3)
    o.add_argument("--step", type=_positive_float, default=1e-4)
    o.add_argument("--delta", type=_unit_interval, default=1e-3)
    o.add_argument("--out-dir", type=Path, default=Path("out"))

    cmp_ = sub.add_parser("compare", help="simulation mean vs fluid limit")
    _add_process_args(cmp_, 100_000)
    cmp_.add_argument("--trials", type=_positive_int, default=20)
    cmp_.add_argument("--sample-every", type=_positive_int, default=None)
    cmp_.add_argument("--jobs", type=_positive_int, default=1)
    cmp_.add_argument("--step", type=_positive_float, default=1e-4)
    cmp_.add_argument("--tau-max", type=_positive_float, default=1.8,
                      help="deviation is reported over sampled tau <= this")
    cmp_.add_argument("--out-dir", type=Path, default=Path("out"))

    ver = sub.add_parser("verify", help="replay one run auditing every invariant")
    _add_process_args(ver, 1000)
    ver.add_argument("--check-every", type=_positive_int, default=1)
    return parser


def _config(args) -> Config:
    try:
        return Config(n=args.n, cap=args.cap, pairing_enabled=args.pairing == "on",
                      stop_mode=StopMode(args.mode), epsilon=args.epsilon, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_simulate(args) -> int:
    config = _config(args)
    every = args.sample_every or default_sample_every(config.n)
    results = run_trials(config, args.trials, every, tally=True, jobs=args.jobs)
    out = args.out_dir
    for r in results:
        write_rows_csv(out / f"trial_{r.seed}.csv", r.rows)
    mean = mean_trajectory(results, every)
    write_rows_csv(out / "mean.csv", mean)
    summary = summarize(config, results)
    write_json(out / "summary.json", summary)
    emit_chart([mean], out / "trajectory.svg", ChartSpec(title=f"Simulation mean, n={config.n}"))
    print(json.dumps({k: summary[k] for k in ("mean_total_over_n", "median_main_over_n")}))
    if any(r.cycle_verified is False for r in results):
        log.error("a trial failed Hamilton cycle verification")
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_ode(args) -> int:
    cfg = ode.IntegrationConfig(step=args.step, delta=args.delta)
    traj = ode.integrate(args.cap, cfg)
    tau = ode.tau_star(traj, args.delta)
    out = args.out_dir
    write_rows_csv(out / f"ode_cap{args.cap}.csv", traj)
    summary = {
        "config": {"cap": args.cap, "step": args.step, "delta": args.delta},
        "tau_star": tau,
        "s3_max": max(fs.s3 for fs in traj),
        "final": traj[-1]._asdict(),
    }
    write_json(out / f"ode_cap{args.cap}.json", summary)
    emit_chart([traj], out / f"ode_cap{args.cap}.svg", ChartSpec(title=f"Fluid limit, stub degree cap {args.cap}"))
    print(json.dumps({"tau_star": tau, "s3_max": summary["s3_max"]}))
    return EXIT_OK


def cmd_compare(args) -> int:
    config = _config(args)
    every = args.sample_every or default_sample_every(config.n)
    results = run_trials(config, args.trials, every, jobs=args.jobs)
    mean = mean_trajectory(results, every)
    # match the fluid stop to the last vertex at this n
    delta = min(1e-3, 1.0 / config.n)
    traj = ode.integrate(config.cap, ode.IntegrationConfig(step=args.step, delta=delta))
    tau = ode.tau_star(traj, delta)

    joined = []
    worst = dict.fromkeys(("p", "v1", "v2", "s1", "s2", "s3"), 0.0)
    for row in mean:
        fs = ode.interpolate(traj, row.tau)
        rec = [row.tau]
        for i, name in enumerate(worst, start=1):
            rec += [row[i], fs[i]]
            if row.tau <= args.tau_max:
                worst[name] = max(worst[name], abs(row[i] - fs[i]))
        joined.append(rec)
    header = ["tau"] + [f"{c}_{src}" for c in worst for src in ("sim", "ode")]
    out = args.out_dir
    write_rows_csv(out / "compare.csv", joined, header)
    summary = summarize(config, results, tau_star=tau)
    summary["ode_delta"] = delta
    summary["tau_max"] = args.tau_max
    summary["max_deviation"] = worst
    write_json(out / "compare.json", summary)
    emit_chart([mean, traj], out / "compare.svg", ChartSpec(title=f"Simulation mean (solid) vs fluid limit (dashed), n={config.n}"),
               labels=("simulation", "fluid limit"))
    print(json.dumps({"max_deviation": worst, "tau_star": tau, "median_main_over_n": summary["median_main_over_n"]}))
    if any(r.cycle_verified is False for r in results):
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _config(args)
    rng = random.Random(config.seed)
    state = ProcessState(config)
    n_bad = 0
    for v in check_invariants(state):
        print(v.to_json())
        n_bad += 1
    while not state.is_finished():
        state.step(rng)
        if state.t % args.check_every == 0:
            for v in check_invariants(state):
                print(v.to_json())
                n_bad += 1
    for v in check_invariants(state):
        print(v.to_json())
        n_bad += 1
    report = {"rounds": state.t, "violations": n_bad}
    if config.stop_mode is StopMode.FULL_CYCLE:
        result = close_cycle(state, rng)
        ok = verify_hamilton_cycle(result.cycle, state.graph_edges, config.n)
        report.update(closing_rounds=result.rounds_used, cycle_verified=ok)
        n_bad += not ok
    print(json.dumps(report))
    return EXIT_INVARIANT if n_bad else EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "ode": cmd_ode, "compare": cmd_compare, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"semirandom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
