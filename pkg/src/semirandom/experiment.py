"""Seeded multi-trial runs and their aggregation."""

from __future__ import annotations

import csv
import json
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .closer import close_cycle
from .process import Config, ProcessState, StopMode, TrajectoryRow, default_sample_every, run_main_phase
from .verify import LEMMA_CLASSES, StubendHitTally, verify_hamilton_cycle

CSV_HEADER = ("tau", "p", "v1", "v2", "s1", "s2", "s3")


@dataclass
class TrialResult:
    seed: int
    n: int
    main_rounds: int
    closing_rounds: Optional[int]
    cycle_verified: Optional[bool]
    edges_added: int
    rows: list = field(repr=False, default_factory=list)
    tally: Optional[StubendHitTally] = field(repr=False, default=None)

    @property
    def total_rounds(self) -> int:
        return self.main_rounds + (self.closing_rounds or 0)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "main_rounds": self.main_rounds,
            "closing_rounds": self.closing_rounds,
            "total_rounds": self.total_rounds,
            "cycle_verified": self.cycle_verified,
            "edges_added": self.edges_added,
        }


def run_trial(config: Config, sample_every: Optional[int] = None, tally: bool = False,
              verify_cycle: bool = True) -> TrialResult:
    """One run: main phase, then (in full-cycle mode) the closer."""
    rng = random.Random(config.seed)
    full = config.stop_mode is StopMode.FULL_CYCLE
    state = ProcessState(config, track_edges=full and verify_cycle)
    hits = StubendHitTally() if tally else None
    rows = run_main_phase(state, rng, sample_every, on_event=hits.add if hits else None)
    main_rounds = state.t
    closing = verified = None
    if full:
        result = close_cycle(state, rng)
        closing = result.rounds_used
        if verify_cycle:
            verified = verify_hamilton_cycle(result.cycle, state.graph_edges, config.n)
            if state.edges_added > state.t:
                verified = False
    return TrialResult(config.seed, config.n, main_rounds, closing, verified,
                       state.edges_added, rows, hits)


def _run_trial_args(args):
    return run_trial(*args)


def run_trials(config: Config, trials: int, sample_every: Optional[int] = None,
               tally: bool = False, jobs: int = 1) -> list[TrialResult]:
    """Trials use seeds config.seed + i; results come back in seed order whatever `jobs` is."""
    work = [(replace(config, seed=config.seed + i), sample_every, tally) for i in range(trials)]
    if jobs <= 1:
        return [run_trial(*w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_trial_args, work))


def mean_trajectory(results: Sequence[TrialResult], sample_every: int) -> list[TrajectoryRow]:
    """Average rows on the common grid t = k * sample_every.

    A trial that stopped before grid point k contributes its final state.
    """
    n = results[0].n
    last = max(len(r.rows) for r in results)
    out = []
    for k in range(last):
        t = k * sample_every
        acc = [0.0] * 6
        for r in results:
            final_t = round(r.rows[-1].tau * n)
            row = r.rows[k] if t <= final_t else r.rows[-1]
            for i in range(6):
                acc[i] += row[i + 1]
        m = len(results)
        out.append(TrajectoryRow(t / n, *(a / m for a in acc)))
    return out


def summarize(config: Config, results: Sequence[TrialResult], tau_star: Optional[float] = None) -> dict:
    n = config.n
    totals = [r.total_rounds / n for r in results]
    mains = [r.main_rounds / n for r in results]
    summary = {
        "config": config.to_dict(),
        "trials": [r.to_dict() for r in results],
        "mean_total_over_n": statistics.fmean(totals),
        "median_total_over_n": statistics.median(totals),
        "stddev_total_over_n": statistics.stdev(totals) if len(totals) > 1 else 0.0,
        "median_main_over_n": statistics.median(mains),
        "tau_star": tau_star,
    }
    tallies = [r.tally for r in results if r.tally is not None]
    if tallies:
        pooled = StubendHitTally()
        for t in tallies:
            pooled.merge(t)
        stats = {}
        for cls in LEMMA_CLASSES:
            events, exposed, hits, _, _ = pooled.acc[cls]
            if exposed:
                res = pooled.result(cls, min_events=1)
                stats[cls] = {"events": events, "exposed": exposed, "hits": hits,
                              "empirical": res.empirical, "expected": res.expected, "z": res.z}
            else:
                stats[cls] = {"events": events, "exposed": 0, "hits": 0}
        summary["stubend_hits"] = stats
    return summary


def write_rows_csv(path: Path, rows: Sequence[Sequence[float]], header: Sequence[str] = CSV_HEADER) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) for x in row])


def read_rows_csv(path: Path) -> list[TrajectoryRow]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected header {header}")
        return [TrajectoryRow(*map(float, rec)) for rec in reader]


def write_json(path: Path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


__all__ = [
    "CSV_HEADER",
    "TrialResult",
    "default_sample_every",
    "mean_trajectory",
    "read_rows_csv",
    "run_trial",
    "run_trials",
    "summarize",
    "write_json",
    "write_rows_csv",
]
