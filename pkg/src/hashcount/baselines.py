"""Cross-validation counters: Monte Carlo importance sampling and a
dense-XOR-hash search that counts cells by Gaussian elimination.

Both produce the same kind of answer as the main counter through entirely
different machinery, so agreement between all three is strong evidence of
correctness.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from . import _kernels
from .counter import (
    CounterParams,
    CountEstimate,
    NumberLike,
    _boundary_search,
    _ceil_frac,
    _lower_median,
    _to_fraction,
    build_universe,
    decode_state,
)
from .formula import DnfFormula
from .gf2 import BitMat, BitVec, RandomSource
from .hashing import XorHash

__all__ = ["MonteCarloEstimate", "klm_count", "ge_bsat", "approxmc2_dnf_count"]

_KLM_STREAM = 0x6B6C6D
_AMC2_STREAM = 0x616D6332


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Importance-sampling estimate: value = size * trial_sum / (samples * m)."""

    samples: int
    trial_sum: int
    value: Fraction


def klm_count(
    phi: DnfFormula, epsilon: NumberLike, delta: NumberLike, seed: int
) -> MonteCarloEstimate:
    """Unbiased Monte Carlo count: draw uniform universe states, weight each
    by the geometric trial count until a satisfied cube is sampled."""
    eps = _to_fraction(epsilon)
    dlt = _to_fraction(delta)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if not 0 < dlt < 1:
        raise ValueError("delta must be in (0, 1)")
    if phi.is_tautology:
        return MonteCarloEstimate(0, 0, Fraction(1 << phi.n))
    if phi.is_false:
        return MonteCarloEstimate(0, 0, Fraction(0))
    t_samples = math.ceil(8 * (1 + float(eps)) * math.log(2 / float(dlt)) / float(eps) ** 2)
    universe = build_universe(phi)
    src = RandomSource(seed, _KLM_STREAM)
    m = phi.m
    masks = [c.mask for c in phi.cubes]
    pats = [c.pattern for c in phi.cubes]
    trial_sum = 0
    for _ in range(t_samples):
        s = src.rand_below(universe.size)
        x, _i = decode_state(universe, phi, s)
        while True:
            j = src.rand_below(m)
            trial_sum += 1
            if (x & masks[j]) == pats[j]:
                break
    value = Fraction(universe.size * trial_sum, t_samples * m)
    return MonteCarloEstimate(t_samples, trial_sum, value)


def ge_bsat(
    phi: DnfFormula,
    hash_: XorHash,
    hi_thresh: NumberLike,
    y: Optional[BitVec] = None,
) -> int:
    """Distinct solutions of phi AND (A·x ⊕ b = y), capped at hi_thresh.

    Per cube the forced values are substituted into the XOR system, the rest
    is solved by elimination and enumerated into a shared solution set; the
    scan stops as soon as the set reaches the cap.  Returns
    min(|solutions|, ceil(hi_thresh)); the value is independent of cube order.
    """
    count, _enumerated = _ge_bsat_stats(phi, hash_, hi_thresh, y)
    return count


def _ge_bsat_stats(
    phi: DnfFormula,
    hash_: XorHash,
    hi_thresh: NumberLike,
    y: Optional[BitVec] = None,
) -> Tuple[int, int]:
    if hash_.q != phi.n:
        raise ValueError("hash must be over the assignment space")
    if y is None:
        y = BitVec.zeros(hash_.p)
    if y.n != hash_.p:
        raise ValueError("cell selector must have p bits")
    hi = _to_fraction(hi_thresh)
    if hi <= 0:
        raise ValueError("threshold must be positive")
    stop_at = _ceil_frac(hi)
    if phi.is_false:
        return 0, 0
    masks = [c.mask for c in phi.cubes]
    pats = [c.pattern for c in phi.cubes]
    rows = list(hash_.a.row_bits)
    rhs_bits = [
        ((hash_.b.bits ^ y.bits) >> i) & 1 for i in range(hash_.p)
    ]
    return _kernels.ge_bsat_cells(phi.n, masks, pats, rows, rhs_bits, stop_at)


def approxmc2_dnf_count(
    phi: DnfFormula,
    epsilon: NumberLike,
    delta: NumberLike,
    seed: int,
    threads: int = 1,
) -> CountEstimate:
    """Hash-and-count baseline over the assignment space.

    Each round draws one dense base system of n-1 rows; prefixes of p rows
    give nested cells.  The first level whose randomly selected cell holds
    fewer than half the usual threshold is counted exactly by elimination and
    scaled by 2^p.  Median over rounds, as in the main counter.
    """
    params = CounterParams.make(epsilon, delta, seed)
    hi_half = params.hi_thresh / 2
    stop_at = _ceil_frac(hi_half)
    if phi.is_tautology:
        return CountEstimate(Fraction(1 << phi.n), (), (), 0, 0, 0, 0, None)
    if phi.is_false:
        return CountEstimate(Fraction(0), (), (), 0, 0, 0, 0, None)
    n = phi.n
    master = RandomSource(seed, _AMC2_STREAM)
    sources = [master.split(r) for r in range(params.t)]

    def run_round(r: int) -> Tuple[Optional[int], Optional[int], int, int]:
        src = sources[r]
        rows = [src.rand_bits(n) for _ in range(n - 1)]
        b = src.rand_bits(n - 1)
        ycell = src.rand_bits(n - 1)
        counts = {}
        enum_total = 0
        probes = 0

        def probe_is_big(p: int) -> bool:
            nonlocal enum_total, probes
            hash_p = XorHash(
                BitMat.from_rows(rows[:p], n), b.take(0, p)
            )
            count, enumerated = _ge_bsat_stats(
                phi, hash_p, hi_half, ycell.take(0, p)
            )
            counts[p] = count
            enum_total += enumerated
            probes += 1
            return count >= stop_at

        p = _boundary_search(probe_is_big, 0, n - 1)
        if p is None:
            return None, None, enum_total, probes
        return p, counts[p], enum_total, probes

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_round, range(params.t)))
    else:
        results = [run_round(r) for r in range(params.t)]

    rounds: List[Tuple[int, Fraction]] = []
    p_used: List[int] = []
    failed = 0
    for p, count, _e, _pr in results:
        if p is None:
            failed += 1
        else:
            rounds.append((1 << p, Fraction(count)))
            p_used.append(p)
    value = _lower_median([c * s for c, s in rounds]) if rounds else None
    return CountEstimate(
        value,
        tuple(p_used),
        tuple(rounds),
        failed,
        sum(e for _p, _c, e, _pr in results),
        sum(pr for _p, _c, _e, pr in results),
        0,
        None,
    )
