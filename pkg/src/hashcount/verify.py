"""Self-check suites: exact family statistics, Gray coverage, estimator
moments, and end-to-end calibration against brute-force counts.

Each suite returns a SuiteResult so the CLI and the test suite share one
implementation of every check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .baselines import approxmc2_dnf_count, klm_count
from .counter import CellEstimate, approx_count, check_sat
from .formula import Cube, DnfFormula, Literal, exact_count, gen_random
from .gf2 import BitVec, RandomSource, next_gray_bit
from .hashing import verify_universality

__all__ = [
    "SuiteResult",
    "universality_suite",
    "gray_suite",
    "estimator_suite",
    "fpras_suite",
    "calibration_instances",
    "calibration_run",
    "SUITES",
]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    lines: List[str] = field(default_factory=list)


def universality_suite(seed: int = 1) -> SuiteResult:
    """Exact uniformity and pairwise collision bounds for both families."""
    lines: List[str] = []
    ok = True
    for family, q, p in [("rex", 3, 1), ("rex", 4, 2), ("rex", 5, 2), ("xor", 3, 1)]:
        rep = verify_universality(family, q, p, "exhaustive")
        good = rep.two_universal and (
            family != "rex" or rep.collision_zero_iff_free_zero
        )
        ok &= good
        lines.append(
            f"{family} q={q} p={p}: {rep.functions} functions, "
            f"point {rep.point_prob_min}..{rep.point_prob_max}, "
            f"max collision {rep.collision_prob_max} "
            f"(target {rep.target}): {'ok' if good else 'FAIL'}"
        )
    src = RandomSource(seed, 0x756E69)
    rep = verify_universality("rex", 6, 3, "sampled", src, samples=20000)
    ok &= rep.two_universal
    lines.append(
        f"rex q=6 p=3 sampled: point {rep.point_prob_min:.4f}..{rep.point_prob_max:.4f} "
        f"+-{rep.ci_halfwidth:.4f}: {'ok' if rep.two_universal else 'FAIL'}"
    )
    return SuiteResult("universality", ok, lines)


def gray_suite(seed: int = 1) -> SuiteResult:
    """Gray walk visits every codeword exactly once, for a range of widths.

    The walk is deterministic; seed is accepted for interface uniformity."""
    del seed
    lines: List[str] = []
    ok = True
    for l in [1, 2, 3, 8, 16]:
        total = 1 << l
        seen = bytearray(total)
        code = 0
        seen[0] = 1
        distinct = 1
        for j in range(total - 1):
            code ^= 1 << next_gray_bit(l, j)
            if not seen[code]:
                seen[code] = 1
                distinct += 1
        good = distinct == total
        ok &= good
        lines.append(f"l={l}: visited {distinct}/{total}: {'ok' if good else 'FAIL'}")
    return SuiteResult("gray", ok, lines)


def estimator_suite(seed: int = 1, trials: int = 10**5) -> SuiteResult:
    """First and second moments of the geometric trial count.

    Instance: x1 or x2 or x3 or x4 with x = 1100, so coverage size 2 of m=4:
    the count is geometric with success 1/2, mean 2, second moment 6.
    """
    phi = DnfFormula(4, tuple(Cube((Literal(v, True),)) for v in range(4)))
    x = BitVec.from_bits([1, 1, 0, 0])
    src = RandomSource(seed, 0x657374)
    zero = CellEstimate(0, 4, False)
    s1 = 0
    s2 = 0
    for _ in range(trials):
        c = check_sat(phi, x, zero, None, src)
        s1 += c
        s2 += c * c
    mean1 = s1 / trials
    mean2 = s2 / trials
    band1 = 3 * math.sqrt(2 / trials)
    band2 = 3 * math.sqrt(114 / trials)
    ok1 = abs(mean1 - 2) <= band1
    ok2 = abs(mean2 - 6) <= band2
    lines = [
        f"mean {mean1:.4f} vs 2 +-{band1:.4f}: {'ok' if ok1 else 'FAIL'}",
        f"second moment {mean2:.4f} vs 6 +-{band2:.4f}: {'ok' if ok2 else 'FAIL'}",
    ]
    return SuiteResult("estimator", ok1 and ok2, lines)


def calibration_instances(seed: int = 1) -> List[Tuple[DnfFormula, int]]:
    """60 deterministic random instances (n 8..16, m 2..12, widths 2..5) with
    their brute-force counts."""
    out: List[Tuple[DnfFormula, int]] = []
    for k in range(60):
        n = 8 + (k % 9)
        m = 2 + (k % 11)
        phi = gen_random(n, m, 2, 5, seed * 1000 + k)
        out.append((phi, exact_count(phi)))
    return out


def _run_symbolic(phi: DnfFormula, eps: float, dlt: float, seed: int) -> Optional[Fraction]:
    est = approx_count(phi, eps, dlt, seed)
    return est.value


def _run_klm(phi: DnfFormula, eps: float, dlt: float, seed: int) -> Optional[Fraction]:
    return klm_count(phi, eps, dlt, seed).value


def _run_amc2(phi: DnfFormula, eps: float, dlt: float, seed: int) -> Optional[Fraction]:
    est = approxmc2_dnf_count(phi, eps, dlt, seed)
    return est.value


ALGOS: dict = {
    "symbolic": _run_symbolic,
    "klm": _run_klm,
    "approxmc2": _run_amc2,
}


def calibration_run(
    algo: str,
    runs: int = 100,
    seed: int = 1,
    epsilon: float = 0.8,
    delta: float = 0.2,
    instances: Optional[Sequence[Tuple[DnfFormula, int]]] = None,
) -> Tuple[int, int]:
    """Spread ``runs`` seeded runs across the calibration instances; a run
    succeeds when the estimate is within factor 1+epsilon of the exact count.
    Returns (successes, runs)."""
    if instances is None:
        instances = calibration_instances(seed)
    run = ALGOS[algo]
    factor = Fraction(1) + _as_frac(epsilon)
    successes = 0
    for k in range(runs):
        phi, exact = instances[k % len(instances)]
        value = run(phi, epsilon, delta, seed + k)
        if value is None:
            continue
        if exact == 0:
            if value == 0:
                successes += 1
            continue
        if Fraction(exact) / factor <= value <= Fraction(exact) * factor:
            successes += 1
    return successes, runs


def _as_frac(x) -> Fraction:
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def fpras_suite(seed: int = 1, runs: int = 100) -> SuiteResult:
    """End-to-end calibration of the main counter at epsilon 0.8, delta 0.2:
    at least 75% of seeded runs must land within the guarantee factor."""
    successes, total = calibration_run("symbolic", runs, seed)
    need = math.ceil(0.75 * total)
    ok = successes >= need
    lines = [f"symbolic: {successes}/{total} within factor 1.8 (need {need}): "
             f"{'ok' if ok else 'FAIL'}"]
    return SuiteResult("fpras", ok, lines)


SUITES: dict = {
    "universality": universality_suite,
    "gray": gray_suite,
    "estimator": estimator_suite,
    "fpras": fpras_suite,
}
