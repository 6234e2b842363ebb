"""2-universal XOR hash families over GF(2).

Two families are provided: fully random XOR hashes (dense A·x ⊕ b) and
row-echelon XOR hashes [I_p | D]·z ⊕ b, whose structure makes cell members
enumerable by single-bit Gray steps.  A row-echelon hash is never sampled at
one level; instead a base system is drawn once and prefixes of increasing
length are extracted from it, so the cells at level p+1 refine the cells at
level p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, List, Optional, Tuple

from .gf2 import BitMat, BitVec, RandomSource, mat_vec_mul, next_gray_bit

__all__ = [
    "XorHash",
    "BaseSample",
    "RexHash",
    "UniversalityReport",
    "sample_hxor",
    "sample_base",
    "extract",
    "enum_next_rex",
    "cell_members",
    "verify_universality",
]

_FAMILY_BITS_LIMIT = 24


@dataclass(frozen=True)
class XorHash:
    """Fully random XOR hash h(x) = A·x ⊕ b mapping q bits to p bits."""

    a: BitMat
    b: BitVec

    def __post_init__(self):
        if self.a.nrows != self.b.n:
            raise ValueError("offset length must equal the row count")

    @property
    def q(self) -> int:
        return self.a.cols

    @property
    def p(self) -> int:
        return self.a.nrows

    def apply(self, x: BitVec) -> BitVec:
        return mat_vec_mul(self.a, x) ^ self.b


def sample_hxor(q: int, p: int, src: RandomSource) -> XorHash:
    """Uniform member of the dense family: p*q matrix bits, then p offset bits."""
    if not 0 <= p <= q:
        raise ValueError("need 0 <= p <= q")
    rows = [src.rand_bits(q) for _ in range(p)]
    b = src.rand_bits(p)
    return XorHash(BitMat.from_rows(rows, q), b)


@dataclass(frozen=True)
class BaseSample:
    """Base system for row-echelon extraction.

    ``dhat`` has q-1 rows over q-s_init columns: the first s_init rows are
    fully random, the remaining rows form an upper-triangular block with unit
    diagonal (row i of that block has column i-s_init set, zeros below it).
    ``bhat`` and ``yhat`` are the offset and cell selector, one bit per row.
    """

    q: int
    s_init: int
    dhat: BitMat
    bhat: BitVec
    yhat: BitVec

    def __post_init__(self):
        q, s = self.q, self.s_init
        if q < 1 or not 0 <= s <= q - 1:
            raise ValueError("need q >= 1 and 0 <= s_init <= q-1")
        if self.dhat.nrows != q - 1 or self.dhat.cols != q - s:
            raise ValueError("base matrix must be (q-1) x (q-s_init)")
        if self.bhat.n != q - 1 or self.yhat.n != q - 1:
            raise ValueError("offset and cell selector must have q-1 bits")
        for i in range(s, q - 1):
            col = i - s
            row = self.dhat.row_bits[i]
            if not (row >> col) & 1 or row & ((1 << col) - 1):
                raise ValueError("triangular block must have unit diagonal, zeros below")


def sample_base(q: int, s_init: int, src: RandomSource) -> BaseSample:
    """Draw a base system: random block rows first, then the strict upper
    entries of each triangular row, then the offset, then the cell selector."""
    if q < 1 or not 0 <= s_init <= q - 1:
        raise ValueError("need q >= 1 and 0 <= s_init <= q-1")
    cols = q - s_init
    rows: List[BitVec] = [src.rand_bits(cols) for _ in range(s_init)]
    for i in range(cols - 1):
        upper = src.rand_bits(cols - 1 - i)
        rows.append(BitVec(cols, (1 << i) | (int(upper) << (i + 1))))
    dhat = BitMat.from_rows(rows, cols)
    bhat = src.rand_bits(q - 1)
    yhat = src.rand_bits(q - 1)
    return BaseSample(q, s_init, dhat, bhat, yhat)


@dataclass(frozen=True)
class RexHash:
    """Row-echelon XOR hash [I_p | D]·z ⊕ b with selected cell y.

    The first p coordinates of z are dependent, the remaining q-p free.
    Every cell has exactly 2^(q-p) members.
    """

    q: int
    p: int
    d: BitMat
    b: BitVec
    y: BitVec

    def __post_init__(self):
        if not 0 <= self.p <= self.q - 1:
            raise ValueError("need 0 <= p <= q-1")
        if self.d.nrows != self.p or self.d.cols != self.q - self.p:
            raise ValueError("free block must be p x (q-p)")
        if self.b.n != self.p or self.y.n != self.p:
            raise ValueError("offset and cell must have p bits")

    @property
    def solution_count(self) -> int:
        return 1 << (self.q - self.p)

    def matrix(self) -> BitMat:
        """The full system matrix [I_p | D]."""
        return BitMat.identity(self.p).hstack(self.d)

    def apply(self, z: BitVec) -> BitVec:
        if z.n != self.q:
            raise ValueError("input length must be q")
        u = z.take(0, self.p)
        v = z.take(self.p, self.q)
        return u ^ mat_vec_mul(self.d, v) ^ self.b

    def in_cell(self, z: BitVec) -> bool:
        return self.apply(z) == self.y


def extract(base: BaseSample, p: int) -> RexHash:
    """Row-echelon hash induced by the first p base rows.

    Rows s_init..p-1 eliminate the column under their unit diagonal from all
    preceding rows; the surviving columns p-s_init.. become the free block D.
    Extractions at increasing p nest: each level-(p+1) cell refines a level-p
    cell.
    """
    if not base.s_init <= p <= base.q - 1:
        raise ValueError("need s_init <= p <= q-1")
    rows = [base.dhat.row_bits[i] for i in range(p)]
    b = [(base.bhat.bits >> i) & 1 for i in range(p)]
    y = [(base.yhat.bits >> i) & 1 for i in range(p)]
    for i in range(base.s_init, p):
        col = i - base.s_init
        ri, bi, yi = rows[i], b[i], y[i]
        for j in range(i):
            if (rows[j] >> col) & 1:
                rows[j] ^= ri
                b[j] ^= bi
                y[j] ^= yi
    shift = p - base.s_init
    width = base.q - p
    d_rows = [BitVec(width, r >> shift) for r in rows]
    b_bits = sum(bit << i for i, bit in enumerate(b))
    y_bits = sum(bit << i for i, bit in enumerate(y))
    return RexHash(
        base.q,
        p,
        BitMat.from_rows(d_rows, width) if d_rows else BitMat.zeros(0, width),
        BitVec(p, b_bits),
        BitVec(p, y_bits),
    )


def enum_next_rex(d: BitMat, u: BitVec, v: BitVec, k: int) -> Tuple[BitVec, BitVec]:
    """One Gray step of the cell walk: flip free bit k, patch the dependent
    part by column k of D."""
    if not 0 <= k < d.cols:
        raise ValueError("free bit index out of range")
    if u.n != d.nrows or v.n != d.cols:
        raise ValueError("dimension mismatch")
    return u ^ d.col(k), v.flipped(k)


def cell_members(h: RexHash) -> Iterator[BitVec]:
    """All 2^(q-p) members of the cell, one Gray step apart."""
    f = h.q - h.p
    u = h.b ^ h.y
    v = BitVec.zeros(f)
    total = 1 << f
    for j in range(total):
        yield u.concat(v)
        if j == total - 1:
            break
        u, v = enum_next_rex(h.d, u, v, next_gray_bit(f, j))


@dataclass(frozen=True)
class UniversalityReport:
    """Exact or sampled hash family statistics.

    Probabilities are Fractions in exhaustive mode, floats in sampled mode.
    ``collision_zero_iff_free_zero`` reports the structural property of the
    row-echelon family (None when not checked).
    """

    family: str
    q: int
    p: int
    mode: str
    functions: int
    point_prob_min: object
    point_prob_max: object
    collision_prob_max: object
    collision_zero_iff_free_zero: Optional[bool]
    two_universal: bool
    ci_halfwidth: Optional[float] = None

    @property
    def target(self) -> Fraction:
        return Fraction(1, 1 << self.p)


def _family_functions(family: str, q: int, p: int) -> Iterator[List[int]]:
    """Enumerate every member as a list of p row ints over q columns plus the
    offset appended as the last element."""
    if family == "rex":
        d_bits = p * (q - p)
        for dv in range(1 << d_bits):
            rows = []
            for j in range(p):
                drow = (dv >> (j * (q - p))) & ((1 << (q - p)) - 1)
                rows.append((1 << j) | (drow << p))
            for bv in range(1 << p):
                yield rows + [bv]
    elif family == "xor":
        a_bits = p * q
        for av in range(1 << a_bits):
            rows = [(av >> (j * q)) & ((1 << q) - 1) for j in range(p)]
            for bv in range(1 << p):
                yield rows + [bv]
    else:
        raise ValueError("family must be 'rex' or 'xor'")


def _apply_rows(rows: List[int], b: int, x: int, p: int) -> int:
    h = b
    for j in range(p):
        if (rows[j] & x).bit_count() & 1:
            h ^= 1 << j
    return h


def verify_universality(
    family: str,
    q: int,
    p: int,
    mode: str = "exhaustive",
    src: Optional[RandomSource] = None,
    samples: int = 20000,
) -> UniversalityReport:
    """Measure point and collision probabilities of a hash family.

    Exhaustive mode enumerates every function (family parameter space up to
    24 bits) and returns exact Fractions; sampled mode draws ``samples``
    functions and returns estimates with a binomial half-width sized for a
    family-wise 3-sigma confidence level across all cells and pairs.
    """
    if not 1 <= p <= q - 1:
        raise ValueError("need 1 <= p <= q-1")
    n_points = 1 << q
    pairs = list(combinations(range(n_points), 2))
    target = Fraction(1, 1 << p)
    if mode == "exhaustive":
        fam_bits = p * (q - p) + p if family == "rex" else p * q + p
        if fam_bits > _FAMILY_BITS_LIMIT:
            raise ValueError(
                f"exhaustive enumeration capped at {_FAMILY_BITS_LIMIT} family bits, got {fam_bits}"
            )
        total = 0
        point_counts = [[0] * (1 << p) for _ in range(n_points)]
        pair_counts = [0] * len(pairs)
        for func in _family_functions(family, q, p):
            rows, b = func[:-1], func[-1]
            total += 1
            values = [_apply_rows(rows, b, x, p) for x in range(n_points)]
            for x in range(n_points):
                point_counts[x][values[x]] += 1
            for idx, (x1, x2) in enumerate(pairs):
                if values[x1] == values[x2]:
                    pair_counts[idx] += 1
        point_probs = [
            Fraction(point_counts[x][y], total)
            for x in range(n_points)
            for y in range(1 << p)
        ]
        coll_probs = [Fraction(c, total) for c in pair_counts]
        zero_iff_free = None
        if family == "rex":
            zero_iff_free = all(
                (prob == 0) == (((x1 ^ x2) >> p) == 0)
                for prob, (x1, x2) in zip(coll_probs, pairs)
            )
        two_universal = (
            min(point_probs) == target == max(point_probs)
            and max(coll_probs) <= target
        )
        return UniversalityReport(
            family,
            q,
            p,
            mode,
            total,
            min(point_probs),
            max(point_probs),
            max(coll_probs) if coll_probs else Fraction(0),
            zero_iff_free,
            two_universal,
        )
    if mode != "sampled":
        raise ValueError("mode must be 'exhaustive' or 'sampled'")
    if src is None:
        raise ValueError("sampled mode needs a RandomSource")
    if q > 8:
        raise ValueError("sampled mode enumerates points, capped at q <= 8")
    point_counts = [[0] * (1 << p) for _ in range(n_points)]
    pair_counts = [0] * len(pairs)
    for _ in range(samples):
        if family == "rex":
            rows = [
                (1 << j) | (int(src.rand_bits(q - p)) << p) for j in range(p)
            ]
            b = int(src.rand_bits(p))
        else:
            h = sample_hxor(q, p, src)
            rows = list(h.a.row_bits)
            b = h.b.bits
        values = [_apply_rows(rows, b, x, p) for x in range(n_points)]
        for x in range(n_points):
            point_counts[x][values[x]] += 1
        for idx, (x1, x2) in enumerate(pairs):
            if values[x1] == values[x2]:
                pair_counts[idx] += 1
    tf = float(target)
    # The pass test takes min/max over every cell and pair, so the band must
    # hold jointly: size the per-cell half-width for a family-wise two-sided
    # 3-sigma level, bounding the per-cell quantile by the subgaussian tail
    # z = sqrt(2 ln(2 ncomp / alpha)).
    ncomp = n_points * (1 << p) + len(pairs)
    alpha = 0.0027
    z = math.sqrt(2.0 * math.log(2.0 * ncomp / alpha))
    ci = z * (tf * (1.0 - tf) / samples) ** 0.5
    point_probs_f = [
        point_counts[x][y] / samples for x in range(n_points) for y in range(1 << p)
    ]
    coll_probs_f = [c / samples for c in pair_counts]
    two_universal = (
        min(point_probs_f) >= tf - ci
        and max(point_probs_f) <= tf + ci
        and max(coll_probs_f) <= tf + ci
    )
    return UniversalityReport(
        family,
        q,
        p,
        mode,
        samples,
        min(point_probs_f),
        max(point_probs_f),
        max(coll_probs_f) if coll_probs_f else 0.0,
        None,
        two_universal,
        ci_halfwidth=ci,
    )
