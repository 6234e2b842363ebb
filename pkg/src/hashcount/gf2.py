"""Packed GF(2) vectors and matrices, linear solving, Gray codes, seeded randomness.

Bit 0 of a ``BitVec`` is the logically first coordinate; every module in this
package shares that convention, so the integer value of a vector has its first
coordinate in the least significant bit.
"""

from __future__ import annotations

from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

__all__ = [
    "BitVec",
    "BitMat",
    "RandomSource",
    "mat_vec_mul",
    "rref",
    "enumerate_solutions",
    "next_gray_bit",
    "mix64",
]

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_SEED_SALT = 0x8BB84B93962EACC9
_STREAM_SALT = 0x2545F4914F6CDD1D
_SPLIT_SALT = 0xD1B54A32D192ED03


def mix64(z: int) -> int:
    """Bijective 64-bit finalizer (SplitMix64 mixing function)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class BitVec:
    """Immutable fixed-length bit vector packed into an int.

    Bits at positions >= len are always zero.  Instances are hashable and
    safe to share across threads; all operations return new vectors.
    """

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int = 0):
        if n < 0:
            raise ValueError("length must be nonnegative")
        if bits < 0 or bits >> n:
            raise ValueError("bits beyond the vector length must be zero")
        self.n = n
        self.bits = bits

    @classmethod
    def from_bits(cls, values: Iterable[int]) -> "BitVec":
        bits = 0
        n = 0
        for v in values:
            if v:
                bits |= 1 << n
            n += 1
        return cls(n, bits)

    @classmethod
    def zeros(cls, n: int) -> "BitVec":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BitVec":
        return cls(n, (1 << n) - 1)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"bit index {i} out of range for length {self.n}")
        return (self.bits >> i) & 1

    def __int__(self) -> int:
        return self.bits

    def __index__(self) -> int:
        return self.bits

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVec)
            and self.n == other.n
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def __xor__(self, other: "BitVec") -> "BitVec":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return BitVec(self.n, self.bits ^ other.bits)

    def __and__(self, other: "BitVec") -> "BitVec":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return BitVec(self.n, self.bits & other.bits)

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        for _ in range(self.n):
            yield bits & 1
            bits >>= 1

    def popcount(self) -> int:
        return self.bits.bit_count()

    def parity(self) -> int:
        return self.bits.bit_count() & 1

    def flipped(self, i: int) -> "BitVec":
        if not 0 <= i < self.n:
            raise IndexError(f"bit index {i} out of range for length {self.n}")
        return BitVec(self.n, self.bits ^ (1 << i))

    def concat(self, other: "BitVec") -> "BitVec":
        """[self | other]: self occupies the first len(self) coordinates."""
        return BitVec(self.n + other.n, self.bits | (other.bits << self.n))

    def take(self, start: int, stop: int) -> "BitVec":
        """Subvector over coordinates [start, stop)."""
        if not 0 <= start <= stop <= self.n:
            raise IndexError("slice out of range")
        width = stop - start
        return BitVec(width, (self.bits >> start) & ((1 << width) - 1))

    def __repr__(self) -> str:
        s = "".join(str((self.bits >> i) & 1) for i in range(self.n))
        return f"BitVec('{s}')"


class BitMat:
    """Immutable bit matrix over GF(2); each row follows the BitVec convention."""

    __slots__ = ("cols", "row_bits")

    def __init__(self, cols: int, row_bits: Sequence[int]):
        if cols < 0:
            raise ValueError("column count must be nonnegative")
        rows = tuple(row_bits)
        for r in rows:
            if r < 0 or r >> cols:
                raise ValueError("row bits beyond the column count must be zero")
        self.cols = cols
        self.row_bits = rows

    @classmethod
    def from_rows(cls, rows: Sequence[BitVec], cols: Optional[int] = None) -> "BitMat":
        if cols is None:
            if not rows:
                raise ValueError("cols is required for an empty matrix")
            cols = rows[0].n
        for r in rows:
            if r.n != cols:
                raise ValueError("all rows must share the column count")
        return cls(cols, [r.bits for r in rows])

    @classmethod
    def identity(cls, n: int) -> "BitMat":
        return cls(n, [1 << i for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, cols: int) -> "BitMat":
        return cls(cols, [0] * nrows)

    @property
    def nrows(self) -> int:
        return len(self.row_bits)

    def row(self, i: int) -> BitVec:
        return BitVec(self.cols, self.row_bits[i])

    def entry(self, i: int, j: int) -> int:
        if not 0 <= j < self.cols:
            raise IndexError("column index out of range")
        return (self.row_bits[i] >> j) & 1

    def col(self, j: int) -> BitVec:
        """Column j as a vector over the rows."""
        if not 0 <= j < self.cols:
            raise IndexError("column index out of range")
        bits = 0
        for i, r in enumerate(self.row_bits):
            if (r >> j) & 1:
                bits |= 1 << i
        return BitVec(self.nrows, bits)

    def vstack(self, other: "BitMat") -> "BitMat":
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return BitMat(self.cols, self.row_bits + other.row_bits)

    def hstack(self, other: "BitMat") -> "BitMat":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        rows = [a | (b << self.cols) for a, b in zip(self.row_bits, other.row_bits)]
        return BitMat(self.cols + other.cols, rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMat)
            and self.cols == other.cols
            and self.row_bits == other.row_bits
        )

    def __hash__(self) -> int:
        return hash((self.cols, self.row_bits))

    def __repr__(self) -> str:
        body = ", ".join(repr(self.row(i)) for i in range(self.nrows))
        return f"BitMat({self.nrows}x{self.cols}, [{body}])"


def mat_vec_mul(a: BitMat, x: BitVec) -> BitVec:
    """A·x over GF(2): bit i of the result is the parity of row i AND x."""
    if a.cols != x.n:
        raise ValueError("dimension mismatch")
    bits = 0
    xb = x.bits
    for i, r in enumerate(a.row_bits):
        if (r & xb).bit_count() & 1:
            bits |= 1 << i
    return BitVec(a.nrows, bits)


def rref(a: BitMat, aug: BitVec) -> Tuple[BitMat, BitVec, int, bool]:
    """Reduced row echelon form of [A | aug].

    Returns (R, r_aug, rank, consistent): pivot rows come first in column
    order, zero rows last, and every pivot column is cleared above and below.
    ``consistent`` is False when a zero row carries a nonzero augmented bit.
    """
    if aug.n != a.nrows:
        raise ValueError("augmented column length must equal the row count")
    cols = a.cols
    # Tag the augmented bit onto each row past the real columns.
    work: List[int] = [
        r | (((aug.bits >> i) & 1) << cols) for i, r in enumerate(a.row_bits)
    ]
    rank = 0
    for col in range(cols):
        pivot = None
        for i in range(rank, len(work)):
            if (work[i] >> col) & 1:
                pivot = i
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        prow = work[rank]
        for i in range(len(work)):
            if i != rank and (work[i] >> col) & 1:
                work[i] ^= prow
        rank += 1
        if rank == len(work):
            break
    # Rows below the rank have zero real part; only their augmented bit matters.
    consistent = all(w >> cols == 0 for w in work[rank:])
    mask = (1 << cols) - 1
    r_rows = [w & mask for w in work]
    r_aug = 0
    for i, w in enumerate(work):
        if w >> cols:
            r_aug |= 1 << i
    return BitMat(cols, r_rows), BitVec(a.nrows, r_aug), rank, consistent


def enumerate_solutions(a: BitMat, b: BitVec, y: BitVec, limit: int) -> List[BitVec]:
    """Up to ``limit`` distinct solutions of A·x ⊕ b = y.

    Solutions are emitted by walking the free coordinates in Gray-code order,
    so consecutive outputs differ by one basis vector.  Returns [] when the
    system is inconsistent.
    """
    if limit < 0:
        raise ValueError("limit must be nonnegative")
    rhs = b ^ y
    red, raug, rank, consistent = rref(a, rhs)
    if not consistent:
        return []
    pivots: List[int] = []
    for i in range(rank):
        row = red.row_bits[i]
        pivots.append((row & -row).bit_length() - 1)
    pivot_set = set(pivots)
    free_cols = [c for c in range(a.cols) if c not in pivot_set]
    x0 = 0
    for i, c in enumerate(pivots):
        if (raug.bits >> i) & 1:
            x0 |= 1 << c
    basis: List[int] = []
    for fc in free_cols:
        vec = 1 << fc
        for i, c in enumerate(pivots):
            if (red.row_bits[i] >> fc) & 1:
                vec |= 1 << c
        basis.append(vec)
    f = len(free_cols)
    count = min(1 << f, limit)
    out: List[BitVec] = []
    x = x0
    for j in range(count):
        if j:
            x ^= basis[next_gray_bit(f, j - 1)]
        out.append(BitVec(a.cols, x))
    return out


def next_gray_bit(l: int, j: int) -> int:
    """Bit flipped between the j-th and (j+1)-th Gray codewords on l bits."""
    if not 0 <= j < (1 << l) - 1:
        raise ValueError(f"j={j} out of range for l={l}")
    n = j + 1
    return (n & -n).bit_length() - 1


class RandomSource:
    """Deterministic counter-based random stream (SplitMix64 sequence).

    Identical (seed, stream) pairs yield identical outputs on every platform
    and implementation.  ``split`` derives an independent child stream from a
    label, so concurrent tasks draw reproducibly regardless of scheduling.
    A RandomSource must not be shared between threads; split instead.
    """

    __slots__ = ("seed", "stream", "_state")

    def __init__(self, seed: int, stream: int = 0):
        self.seed = seed & _MASK64
        self.stream = stream & _MASK64
        self._state = mix64(self.seed ^ _SEED_SALT) ^ mix64(self.stream ^ _STREAM_SALT)

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return mix64(self._state)

    def rand_bits(self, k: int) -> BitVec:
        """Uniform BitVec of length k (draws ceil(k/64) words)."""
        if k < 0:
            raise ValueError("bit count must be nonnegative")
        val = 0
        for w in range((k + 63) // 64):
            val |= self.next_u64() << (64 * w)
        return BitVec(k, val & ((1 << k) - 1))

    def rand_below(self, m: int) -> int:
        """Uniform integer in [0, m) by rejection; no modulo bias."""
        if m <= 0:
            raise ValueError("bound must be positive")
        if m <= 1 << 64:
            # 2^64 mod m rejected off the top; mirrors the compiled kernel.
            rem = ((1 << 64) - m) % m
            full = (1 << 64) - rem
            while True:
                u = self.next_u64()
                if u < full:
                    return u % m
        k = (m - 1).bit_length()
        while True:
            v = int(self.rand_bits(k))
            if v < m:
                return v

    def split(self, label: int) -> "RandomSource":
        """Child stream keyed by (seed, parent stream, label); independent of
        how much the parent has already drawn."""
        child = mix64(self.stream ^ mix64((label & _MASK64) ^ _SPLIT_SALT))
        return RandomSource(self.seed, child)

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed:#x}, stream={self.stream:#x})"
