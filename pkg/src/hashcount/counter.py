"""Hashing-based approximate DNF counting.

The universe is the disjoint union of cube solution spaces: state s encodes
(cube i, free assignment r) through the offset table, so hashing states and
stochastically weighting each valid state by the reciprocal of its coverage
estimates the model count without ever touching unsatisfying assignments.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import _kernels
from .formula import Assignment, DnfFormula, coverage
from .gf2 import BitVec, RandomSource
from .hashing import BaseSample, RexHash, cell_members, extract, sample_base

__all__ = [
    "SymbolicUniverse",
    "CounterParams",
    "CellEstimate",
    "RoundOutcome",
    "CountEstimate",
    "build_universe",
    "interpret",
    "check_sat",
    "bsat",
    "exact_cell_count",
    "log_sat_search",
    "core",
    "approx_count",
]

_COUNTER_STREAM = 0x636F7265

NumberLike = Union[int, float, str, Fraction]


def _to_fraction(x: NumberLike) -> Fraction:
    """Exact rational reading; floats go through their shortest decimal form
    so 0.8 means 4/5, not the binary double nearest it."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _ceil_log2_frac(x: Fraction) -> int:
    """Smallest t with 2^t >= x, computed exactly."""
    if x <= 0:
        raise ValueError("positive value required")
    num, den = x.numerator, x.denominator
    t = num.bit_length() - den.bit_length()
    while (1 << max(t, 0)) * den < num:
        t += 1
    while t > 0 and (1 << (t - 1)) * den >= num:
        t -= 1
    return max(t, 0)


def _floor_log2_frac(x: Fraction) -> int:
    """Largest t >= 0 with 2^t <= x; negative x handled by the caller."""
    if x < 1:
        raise ValueError("value below one")
    return (x.numerator // x.denominator).bit_length() - 1


@dataclass(frozen=True)
class SymbolicUniverse:
    """Interval decomposition of the disjoint cube-solution union.

    ``offsets`` has m+1 entries: cube i owns states [offsets[i], offsets[i+1]),
    each state being the cube pattern plus one assignment of its free
    variables.  ``size`` is the total stored in offsets[m]; q is the bit width
    of the hashed state space (states size..2^q-1 are padding).
    """

    n: int
    m: int
    q: int
    w_min: int
    offsets: Tuple[int, ...]
    size: int


def build_universe(phi: DnfFormula) -> SymbolicUniverse:
    if phi.is_false:
        raise ValueError("universe requires at least one cube")
    if phi.is_tautology:
        raise ValueError("universe requires every cube to constrain a variable")
    offsets = [0]
    for cube in phi.cubes:
        offsets.append(offsets[-1] + (1 << (phi.n - cube.width)))
    size = offsets[-1]
    q = (size - 1).bit_length()
    return SymbolicUniverse(
        phi.n, phi.m, q, phi.width_min, tuple(offsets), size
    )


def decode_state(universe: SymbolicUniverse, phi: DnfFormula, s: int) -> Tuple[int, int]:
    """State value -> (assignment bits, cube index); caller ensures s < size."""
    i = bisect_right(universe.offsets, s) - 1
    r = s - universe.offsets[i]
    cube = phi.cubes[i]
    x = cube.pattern
    t = 0
    for v in range(phi.n):
        if not (cube.mask >> v) & 1:
            if (r >> t) & 1:
                x |= 1 << v
            t += 1
    return x, i


def interpret(
    universe: SymbolicUniverse, phi: DnfFormula, z: BitVec
) -> Optional[Tuple[Assignment, int]]:
    """Decode a hashed state; None for padding states (value >= size)."""
    if len(z) != universe.q:
        raise ValueError("state length must equal the universe bit width")
    s = int(z)
    if s >= universe.size:
        return None
    x, i = decode_state(universe, phi, s)
    return BitVec(phi.n, x), i


@dataclass(frozen=True)
class CounterParams:
    """Derived driver parameters; hi_thresh is kept as an exact rational."""

    epsilon: Fraction
    delta: Fraction
    hi_thresh: Fraction
    t: int
    seed: int

    @staticmethod
    def make(epsilon: NumberLike, delta: NumberLike, seed: int) -> "CounterParams":
        eps = _to_fraction(epsilon)
        dlt = _to_fraction(delta)
        if eps <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 < dlt < 1:
            raise ValueError("delta must be in (0, 1)")
        hi = 2 * (
            1 + Fraction("9.84") * (1 + eps / (1 + eps)) * (1 + 1 / eps) ** 2
        )
        t = _ceil_log2_frac((3 / dlt) ** 17)
        return CounterParams(eps, dlt, hi, t, seed)

    def threshold_trials(self, m: int) -> int:
        """Trial cap per cell: ceil(m * hi_thresh); all saturation tests are
        integer comparisons against this."""
        return _ceil_frac(m * self.hi_thresh)


@dataclass(frozen=True)
class CellEstimate:
    """Stochastic cell count: value = trials / m; saturated means the trial
    cap was reached and the value is only a lower-bound witness."""

    trials: int
    m: int
    saturated: bool
    states_visited: int = 0

    @property
    def value(self) -> Fraction:
        return Fraction(self.trials, self.m)


class RoundStats:
    """Mutable per-round instrumentation accumulator."""

    __slots__ = ("probes", "trials", "max_bsat_trials", "states_visited")

    def __init__(self):
        self.probes = 0
        self.trials = 0
        self.max_bsat_trials = 0
        self.states_visited = 0

    def record(self, est: CellEstimate) -> None:
        self.probes += 1
        self.trials += est.trials
        self.states_visited += est.states_visited
        if est.trials > self.max_bsat_trials:
            self.max_bsat_trials = est.trials


class _PackedFormula:
    """Formula and universe flattened for the kernels (both int and word forms)."""

    __slots__ = (
        "n", "m", "q", "nwn", "nwq", "mask_i", "pat_i", "offsets_i",
        "free_lists", "mask_w", "pat_w", "off_w", "free_idx", "free_start",
        "kernel_ok", "exact_value",
    )

    def __init__(self, phi: DnfFormula, universe: SymbolicUniverse):
        n, m, q = phi.n, phi.m, universe.q
        self.n = n
        self.m = m
        self.q = q
        self.nwn = max(1, (n + 63) // 64)
        self.nwq = max(1, (q + 63) // 64)
        self.mask_i = [c.mask for c in phi.cubes]
        self.pat_i = [c.pattern for c in phi.cubes]
        self.offsets_i = list(universe.offsets)
        self.free_lists = [
            [v for v in range(n) if not (c.mask >> v) & 1] for c in phi.cubes
        ]
        self.mask_w = _words(self.mask_i, self.nwn)
        self.pat_w = _words(self.pat_i, self.nwn)
        self.off_w = _words(self.offsets_i, self.nwq)
        flat = [v for fl in self.free_lists for v in fl]
        self.free_idx = np.array(flat if flat else [0], dtype=np.int32)
        starts = [0]
        for fl in self.free_lists:
            starts.append(starts[-1] + len(fl))
        self.free_start = np.array(starts, dtype=np.int32)
        self.kernel_ok = self.nwq <= 8
        self.exact_value: Optional[int] = None


def _words(values: Sequence[int], nw: int) -> np.ndarray:
    out = np.empty((len(values), nw), dtype=np.uint64)
    for i, v in enumerate(values):
        for w in range(nw):
            out[i, w] = (v >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    return out


class _PackedBase:
    """Base system flattened for the kernels."""

    __slots__ = ("q", "s_init", "dhat_ints", "bx_int", "dhat_w", "bx_bits", "kernel_ok")

    def __init__(self, base: BaseSample):
        self.q = base.q
        self.s_init = base.s_init
        self.dhat_ints = list(base.dhat.row_bits)
        self.bx_int = base.bhat.bits ^ base.yhat.bits
        self.kernel_ok = base.q - base.s_init <= 62
        if self.kernel_ok:
            self.dhat_w = np.array(self.dhat_ints, dtype=np.uint64)
            self.bx_bits = np.array(
                [(self.bx_int >> i) & 1 for i in range(base.q - 1)], dtype=np.uint8
            )


def _packed_formula(phi: DnfFormula, universe: SymbolicUniverse) -> _PackedFormula:
    cached = getattr(phi, "_packed", None)
    if cached is None or cached.q != universe.q:
        cached = _PackedFormula(phi, universe)
        object.__setattr__(phi, "_packed", cached)
    return cached


def _packed_base(base: BaseSample) -> _PackedBase:
    cached = getattr(base, "_packed", None)
    if cached is None:
        cached = _PackedBase(base)
        object.__setattr__(base, "_packed", cached)
    return cached


def check_sat(
    phi: DnfFormula,
    x: Assignment,
    running: CellEstimate,
    hi_thresh: Optional[NumberLike],
    src: RandomSource,
) -> int:
    """Geometric trial count for one state: sample cubes uniformly until one
    is satisfied by x, stopping early once the running cell total would reach
    the trial cap.  x must satisfy the formula; hi_thresh None means uncapped.
    """
    threshold = (
        None
        if hi_thresh is None
        else _ceil_frac(phi.m * _to_fraction(hi_thresh))
    )
    xb = int(x)
    cubes = phi.cubes
    m = phi.m
    base_trials = running.trials
    cx = 0
    while threshold is None or base_trials + cx < threshold:
        j = src.rand_below(m)
        cx += 1
        c = cubes[j]
        if (xb & c.mask) == c.pattern:
            break
    return cx


def bsat(
    phi: DnfFormula,
    universe: SymbolicUniverse,
    base: BaseSample,
    p: int,
    hi_thresh: NumberLike,
    src: RandomSource,
    stats: Optional[RoundStats] = None,
    impl: Optional[str] = None,
) -> CellEstimate:
    """Stochastic count of the cell selected by the base system at level p.

    Walks the cell in Gray order, running check_sat on every valid state;
    returns a saturated estimate as soon as the trial cap is reached.
    """
    if not base.s_init <= p <= universe.q - 1:
        raise ValueError("need s_init <= p <= q-1")
    if base.q != universe.q:
        raise ValueError("base and universe disagree on q")
    ctx = _packed_formula(phi, universe)
    pb = _packed_base(base)
    threshold = _ceil_frac(phi.m * _to_fraction(hi_thresh))
    trials, saturated, visited, new_state = _kernels.bsat_from_base(
        ctx, pb, p, threshold, src._state, impl=impl
    )
    src._state = new_state
    est = CellEstimate(trials, phi.m, saturated, visited)
    if stats is not None:
        stats.record(est)
    return est


def exact_cell_count(
    phi: DnfFormula,
    universe: SymbolicUniverse,
    rex: RexHash,
    limit_q: int = 20,
) -> Tuple[int, Fraction]:
    """Exhaustive reference count of one cell.

    Returns (canonical, coverage_sum): canonical counts valid states whose
    assignment satisfies no earlier cube; coverage_sum adds 1/|coverage| per
    valid state.  Summed over all cells of any fixed hash level, canonical
    equals the model count exactly.
    """
    if rex.q > limit_q:
        raise ValueError(f"exhaustive cell enumeration capped at q <= {limit_q}")
    canonical = 0
    cov_sum = Fraction(0)
    for z in cell_members(rex):
        res = interpret(universe, phi, z)
        if res is None:
            continue
        x, i = res
        cov = coverage(phi, x)
        cov_sum += Fraction(1, len(cov))
        if min(cov) == i:
            canonical += 1
    return canonical, cov_sum


def _boundary_search(
    probe_is_big: Callable[[int], bool], low: int, hi: int
) -> Optional[int]:
    """Smallest level in [low, hi] whose probe is small, assuming monotone
    cell shrinkage; None when even hi probes big.

    Invariant: lo_big probed big, hi_small probed small (hi+1 virtual big
    sentinel start).  At most 1 + ceil(log2(hi - low + 1)) probes.
    """
    if low > hi:
        raise ValueError("need low <= hi")
    if not probe_is_big(low):
        return low
    lo_big, hi_small = low, hi + 1
    while hi_small - lo_big > 1:
        mid = (lo_big + hi_small) // 2
        if probe_is_big(mid):
            lo_big = mid
        else:
            hi_small = mid
    return hi_small if hi_small <= hi else None


def log_sat_search(
    phi: DnfFormula,
    universe: SymbolicUniverse,
    base: BaseSample,
    hi_thresh: NumberLike,
    low: int,
    hi: int,
    src: RandomSource,
    stats: Optional[RoundStats] = None,
    impl: Optional[str] = None,
) -> Optional[int]:
    """Galloping search for the first level whose cell estimate stays below
    the threshold; None when even the finest level saturates."""

    def probe(p: int) -> bool:
        return bsat(phi, universe, base, p, hi_thresh, src, stats, impl).saturated

    return _boundary_search(probe, low, hi)


@dataclass(frozen=True)
class RoundOutcome:
    """One driver round: (cell_count, sol_count) on success, Nones on the
    search sentinel; instrumentation either way."""

    cell_count: Optional[int]
    sol_count: Optional[Fraction]
    p: Optional[int]
    probes: int
    trials: int
    max_bsat_trials: int
    states_visited: int

    @property
    def ok(self) -> bool:
        return self.cell_count is not None


def _start_constraints(n: int, w_min: int, hi_thresh: Fraction) -> int:
    """Initial constraint count: floor(n - w_min - log2(hi_thresh)), clamped
    at zero.  Cells above this level are provably saturated on average."""
    target = Fraction(1 << (n - w_min), 1) / hi_thresh
    if target < 1:
        return 0
    return _floor_log2_frac(target)


def _direct_exact_count(phi: DnfFormula, ctx: _PackedFormula) -> int:
    """Canonical enumeration of the whole universe (the small-q short
    circuit): count each valid state whose assignment has no earlier cube."""
    if ctx.exact_value is not None:
        return ctx.exact_value
    count = 0
    masks, pats = ctx.mask_i, ctx.pat_i
    for i, fl in enumerate(ctx.free_lists):
        pat = pats[i]
        for r in range(1 << len(fl)):
            x = pat
            rr = r
            while rr:
                t = (rr & -rr).bit_length() - 1
                rr &= rr - 1
                x |= 1 << fl[t]
            canonical = True
            for j in range(i):
                if (x & masks[j]) == pats[j]:
                    canonical = False
                    break
            if canonical:
                count += 1
    ctx.exact_value = count
    return count


def core(
    phi: DnfFormula,
    params: CounterParams,
    src: RandomSource,
    universe: Optional[SymbolicUniverse] = None,
    impl: Optional[str] = None,
) -> RoundOutcome:
    """One estimation round: sample a base, search for the first unsaturated
    level, estimate that cell.  Failure is a value, not an exception."""
    if universe is None:
        universe = build_universe(phi)
    ctx = _packed_formula(phi, universe)
    q, m = universe.q, phi.m
    # Entire hashed space within the trial budget: count exactly instead.
    if (1 << q) * params.hi_thresh.denominator <= m * params.hi_thresh.numerator:
        value = _direct_exact_count(phi, ctx)
        return RoundOutcome(1, Fraction(value), 0, 0, 0, 0, 0)
    s_init = _start_constraints(phi.n, universe.w_min, params.hi_thresh)
    base = sample_base(q, s_init, src)
    stats = RoundStats()
    p = log_sat_search(
        phi, universe, base, params.hi_thresh, s_init, q - 1, src, stats, impl
    )
    if p is None:
        return RoundOutcome(
            None, None, None,
            stats.probes, stats.trials, stats.max_bsat_trials, stats.states_visited,
        )
    est = bsat(phi, universe, base, p, params.hi_thresh, src, stats, impl)
    return RoundOutcome(
        1 << p, est.value, p,
        stats.probes, stats.trials, stats.max_bsat_trials, stats.states_visited,
    )


@dataclass(frozen=True)
class CountEstimate:
    """Median-of-rounds estimate; value None when every round failed."""

    value: Optional[Fraction]
    p_used: Tuple[int, ...]
    rounds: Tuple[Tuple[int, Fraction], ...]
    failed_rounds: int
    trials: int
    probes: int
    max_bsat_trials: int
    threshold_trials: Optional[int]

    @property
    def ok(self) -> bool:
        return self.value is not None

    @property
    def rounds_used(self) -> int:
        return len(self.rounds)


def _lower_median(values: List[Fraction]) -> Fraction:
    return sorted(values)[(len(values) - 1) // 2]


def approx_count(
    phi: DnfFormula,
    epsilon: NumberLike,
    delta: NumberLike,
    seed: int,
    threads: int = 1,
    impl: Optional[str] = None,
) -> CountEstimate:
    """Estimate |R_phi| within factor 1+epsilon at confidence 1-delta.

    Runs t independent rounds on split child streams keyed by round index and
    takes the lower median of the successful round products, so the result is
    identical for any thread count.
    """
    params = CounterParams.make(epsilon, delta, seed)
    if phi.is_tautology:
        return CountEstimate(
            Fraction(1 << phi.n), (), (), 0, 0, 0, 0, None
        )
    if phi.is_false:
        return CountEstimate(Fraction(0), (), (), 0, 0, 0, 0, None)
    universe = build_universe(phi)
    ctx = _packed_formula(phi, universe)
    # Resolve the short-circuit value once so concurrent rounds share it.
    if (1 << universe.q) * params.hi_thresh.denominator <= phi.m * params.hi_thresh.numerator:
        _direct_exact_count(phi, ctx)
    master = RandomSource(seed, _COUNTER_STREAM)
    sources = [master.split(r) for r in range(params.t)]

    def run_round(r: int) -> RoundOutcome:
        return core(phi, params, sources[r], universe, impl)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run_round, range(params.t)))
    else:
        outcomes = [run_round(r) for r in range(params.t)]

    rounds = [(o.cell_count, o.sol_count) for o in outcomes if o.ok]
    p_used = tuple(o.p for o in outcomes if o.ok)
    failed = sum(1 for o in outcomes if not o.ok)
    value = (
        _lower_median([c * s for c, s in rounds]) if rounds else None
    )
    return CountEstimate(
        value,
        p_used,
        tuple(rounds),
        failed,
        sum(o.trials for o in outcomes),
        sum(o.probes for o in outcomes),
        max((o.max_bsat_trials for o in outcomes), default=0),
        params.threshold_trials(phi.m),
    )
