"""Wall-clock timing of the solution methods and their ratios."""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from dataclasses import asdict, dataclass

from .verification import fmt

CSV_COLUMNS = ("method", "M", "repeats", "mean_s", "min_s", "stddev_s")
BASELINE = "projection"
# Reference means at M=200 (seconds), kept for ratio comparison only.
REFERENCE_M200 = {"saddle-point": 149.6981, "decoupling": 12.0575, "projection": 4.7079}


@dataclass(frozen=True)
class TimingSample:
    method_tag: str
    M: int
    repeats: int
    mean_seconds: float
    min_seconds: float
    stddev_seconds: float

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.min_seconds > self.mean_seconds * (1 + 1e-12):
            raise ValueError("min_seconds exceeds mean_seconds")


def time_solver(method: str, scenario, M: int, repeats: int = 10, clock=time.perf_counter) -> TimingSample:
    """Mean, min and spread of ``repeats`` solves after one untimed warm-up.

    Projection is timed for a single step. Timing covers assembly, solve and
    field extraction only.
    """
    from .solvers import METHODS

    if isinstance(repeats, bool) or int(repeats) != repeats or repeats < 1:
        raise ValueError(f"repeats must be a positive integer, got {repeats!r}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    kwargs = {"n_steps": 1} if method == "projection" else {}
    solver = METHODS[method]
    solver(scenario, M, **kwargs)
    times = []
    for _ in range(int(repeats)):
        t0 = clock()
        solver(scenario, M, **kwargs)
        times.append(clock() - t0)
    sd = statistics.stdev(times) if len(times) > 1 else 0.0
    return TimingSample(method, int(M), int(repeats), statistics.fmean(times), min(times), sd)


@dataclass
class RatioReport:
    """Per-M ratios of mean times against the projection method."""

    Ms: list
    saddle_over_projection: list
    decoupling_over_projection: list

    def at(self, M: int) -> tuple[float, float]:
        k = self.Ms.index(M)
        return self.saddle_over_projection[k], self.decoupling_over_projection[k]


def timing_ratios(samples) -> RatioReport:
    table = {(s.method_tag, s.M): s.mean_seconds for s in samples}
    Ms = sorted({s.M for s in samples})
    sp_r, dec_r = [], []
    for M in Ms:
        for m in ("saddle-point", "decoupling", BASELINE):
            if (m, M) not in table:
                raise ValueError(f"missing {m} timing at M={M}")
        base = table[BASELINE, M]
        if not base > 0:
            raise ValueError(f"non-positive projection time at M={M}")
        sp_r.append(table["saddle-point", M] / base)
        dec_r.append(table["decoupling", M] / base)
    return RatioReport(Ms, sp_r, dec_r)


def run_benchmark(scenario, Ms, repeats: int = 10, methods=("saddle-point", "decoupling", "projection")):
    """Sequential timings for every method and resolution."""
    return [time_solver(m, scenario, M, repeats) for M in Ms for m in methods]


def samples_to_csv(samples) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for s in samples:
        w.writerow([s.method_tag, s.M, s.repeats, fmt(s.mean_seconds), fmt(s.min_seconds), fmt(s.stddev_seconds)])
    return buf.getvalue()


def samples_from_csv(text: str) -> list:
    r = csv.reader(io.StringIO(text))
    if tuple(next(r)) != CSV_COLUMNS:
        raise ValueError("unexpected timing CSV header")
    return [TimingSample(m, int(M), int(n), float(a), float(b), float(c)) for m, M, n, a, b, c in r]


def report_json(samples, ratios: RatioReport | None = None) -> str:
    if ratios is None:
        ratios = timing_ratios(samples)
    return json.dumps({"samples": [asdict(s) for s in samples], "ratios": asdict(ratios)}, indent=2)
