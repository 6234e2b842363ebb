"""Seeded benchmark suites with instrumented counters.

Every row records the trial cap alongside the largest per-cell trial count
actually observed, so the cap can be audited on every benchmark run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from . import _kernels
from .baselines import approxmc2_dnf_count
from .counter import approx_count
from .formula import gen_random

__all__ = ["BenchRow", "scaling_m", "scaling_n", "vs_baseline", "impl_compare", "BENCH_SUITES"]


@dataclass
class BenchRow:
    suite: str
    algo: str
    impl: str
    n: int
    m: int
    wall_ms: float
    trials: int
    probes: int
    max_bsat_trials: int
    threshold_trials: Optional[int]
    rounds_used: int
    failed_rounds: int
    estimate: Optional[Fraction]

    @property
    def cap_violated(self) -> bool:
        return (
            self.threshold_trials is not None
            and self.max_bsat_trials > self.threshold_trials
        )


def _run_symbolic(
    suite: str, n: int, m: int, width: int, seed: int,
    epsilon: float, delta: float, impl: Optional[str],
) -> BenchRow:
    phi = gen_random(n, m, width, width, seed)
    t0 = time.perf_counter()
    est = approx_count(phi, epsilon, delta, seed, impl=impl)
    wall = (time.perf_counter() - t0) * 1000.0
    return BenchRow(
        suite, "symbolic", impl or _kernels.IMPL_NAME, n, m, wall,
        est.trials, est.probes, est.max_bsat_trials, est.threshold_trials,
        est.rounds_used, est.failed_rounds, est.value,
    )


def _run_amc2(
    suite: str, n: int, m: int, width: int, seed: int,
    epsilon: float, delta: float,
) -> BenchRow:
    phi = gen_random(n, m, width, width, seed)
    t0 = time.perf_counter()
    est = approxmc2_dnf_count(phi, epsilon, delta, seed)
    wall = (time.perf_counter() - t0) * 1000.0
    return BenchRow(
        suite, "approxmc2", _kernels.IMPL_NAME, n, m, wall,
        est.trials, est.probes, est.max_bsat_trials, est.threshold_trials,
        est.rounds_used, est.failed_rounds, est.value,
    )


def scaling_m(
    seed: int = 1, epsilon: float = 0.8, delta: float = 0.2,
    impl: Optional[str] = None,
) -> List[BenchRow]:
    """Cube count doubling at fixed n: trials should grow about linearly."""
    return [
        _run_symbolic("scaling-m", 32, m, 3, seed, epsilon, delta, impl)
        for m in (64, 128, 256)
    ]


def scaling_n(
    seed: int = 1, epsilon: float = 0.8, delta: float = 0.2,
    impl: Optional[str] = None,
) -> List[BenchRow]:
    """Variable count doubling at fixed m: the trial budget is n-independent."""
    return [
        _run_symbolic("scaling-n", n, 64, 3, seed, epsilon, delta, impl)
        for n in (16, 32, 64)
    ]


def vs_baseline(
    seed: int = 1, epsilon: float = 0.8, delta: float = 0.2,
    impl: Optional[str] = None,
) -> List[BenchRow]:
    """Head-to-head on one large instance: symbolic walk vs per-cube elimination."""
    return [
        _run_symbolic("vs-baseline", 64, 64, 3, seed, epsilon, delta, impl),
        _run_amc2("vs-baseline", 64, 64, 3, seed, epsilon, delta),
    ]


def impl_compare(
    seed: int = 1, epsilon: float = 0.8, delta: float = 0.2,
) -> List[BenchRow]:
    """Same workload on every available kernel; estimates must be identical."""
    rows = []
    for impl in _kernels.available_impls():
        rows.append(_run_symbolic("impls", 28, 24, 3, seed, epsilon, delta, impl))
    return rows


BENCH_SUITES: dict = {
    "scaling-m": scaling_m,
    "scaling-n": scaling_n,
    "vs-baseline": vs_baseline,
    "impls": impl_compare,
}
