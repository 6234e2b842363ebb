"""Pure-Python kernels: cell walks, bounded Gaussian counting, brute-force counting.

Each function has a compiled twin in ``_rexcore``; both consume the random
stream identically, so results are bit-for-bit interchangeable.  The walk
state machine below is the reference semantics; the compiled version mirrors
it word by word.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import List, Sequence, Tuple

import numpy as np

IMPL_NAME = "python"

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def next_u64(state: int) -> Tuple[int, int]:
    state = (state + _GAMMA) & _MASK64
    return _mix64(state), state


def rand_below(state: int, m: int) -> Tuple[int, int]:
    rem = ((1 << 64) - m) % m
    full = (1 << 64) - rem
    while True:
        u, state = next_u64(state)
        if u < full:
            return u % m, state


def bsat_from_base(ctx, base, p: int, threshold: int, state: int):
    """Walk one row-echelon cell, stochastically counting each valid state.

    Returns (trials, saturated, states_visited, state).  The walk stops as
    soon as the trial total reaches ``threshold``; the caller guarantees
    s_init <= p <= q-1.
    """
    q = ctx.q
    m = ctx.m
    masks = ctx.mask_i
    pats = ctx.pat_i
    offsets = ctx.offsets_i
    free_lists = ctx.free_lists
    s_init = base.s_init
    shift = p - s_init

    # Reduce the first p base rows to row-echelon form [I_p | D], tracking
    # only b xor y, which is all the walk needs.
    drows = list(base.dhat_ints[:p])
    ub = [(base.bx_int >> i) & 1 for i in range(p)]
    for i in range(s_init, p):
        col = i - s_init
        ri, ui = drows[i], ub[i]
        for j in range(i):
            if (drows[j] >> col) & 1:
                drows[j] ^= ri
                ub[j] ^= ui
    f = q - p
    dcols = []
    for k in range(f):
        colbits = 0
        for j in range(p):
            if (drows[j] >> (shift + k)) & 1:
                colbits |= 1 << j
        dcols.append(colbits)
    u = 0
    for j in range(p):
        if ub[j]:
            u |= 1 << j

    S = offsets[m]
    v = 0
    total = 1 << f
    trials = 0
    visited = 0
    j = 0
    while True:
        visited += 1
        s = u | (v << p)
        if s < S:
            i = bisect_right(offsets, s) - 1
            r = s - offsets[i]
            x = pats[i]
            fl = free_lists[i]
            rr = r
            while rr:
                t = (rr & -rr).bit_length() - 1
                rr &= rr - 1
                x |= 1 << fl[t]
            cx = 0
            while trials + cx < threshold:
                jd, state = rand_below(state, m)
                cx += 1
                if (x & masks[jd]) == pats[jd]:
                    break
            trials += cx
            if trials >= threshold:
                return trials, True, visited, state
        if j == total - 1:
            break
        k = ((j + 1) & -(j + 1)).bit_length() - 1
        u ^= dcols[k]
        v ^= 1 << k
        j += 1
    return trials, False, visited, state


def ge_bsat_cells(
    n: int,
    masks: Sequence[int],
    pats: Sequence[int],
    rows: Sequence[int],
    rhs: Sequence[int],
    stop_at: int,
) -> Tuple[int, int]:
    """Distinct solutions of (some cube holds) AND (A·x = rhs), capped at stop_at.

    Per cube the forced values are substituted into the XOR system, the
    remainder is reduced, and solutions are enumerated into a shared set.
    A single cube whose cell already holds stop_at solutions ends the scan
    immediately.  Returns (count, assignments_enumerated).
    """
    full = (1 << n) - 1
    p = len(rows)
    sols = set()
    enumerated = 0
    for ci in range(len(masks)):
        fmask = masks[ci]
        fpat = pats[ci]
        freemask = full & ~fmask
        rr: List[int] = []
        rb: List[int] = []
        for j in range(p):
            rr.append(rows[j] & freemask)
            rb.append(rhs[j] ^ ((rows[j] & fpat).bit_count() & 1))
        rank = 0
        pivcols: List[int] = []
        tmp = freemask
        while tmp and rank < p:
            col = (tmp & -tmp).bit_length() - 1
            tmp &= tmp - 1
            pivot = -1
            for r in range(rank, p):
                if (rr[r] >> col) & 1:
                    pivot = r
                    break
            if pivot < 0:
                continue
            rr[rank], rr[pivot] = rr[pivot], rr[rank]
            rb[rank], rb[pivot] = rb[pivot], rb[rank]
            for r in range(p):
                if r != rank and (rr[r] >> col) & 1:
                    rr[r] ^= rr[rank]
                    rb[r] ^= rb[rank]
            pivcols.append(col)
            rank += 1
        if any(rb[r] for r in range(rank, p)):
            continue
        nf = n - fmask.bit_count() - rank
        if nf >= 63 or (1 << nf) >= stop_at:
            # This cube alone certifies the cell holds at least stop_at.
            return stop_at, enumerated
        x0 = fpat
        for r in range(rank):
            if rb[r]:
                x0 |= 1 << pivcols[r]
        bm = freemask
        for c in pivcols:
            bm &= ~(1 << c)
        basis: List[int] = []
        while bm:
            fc = (bm & -bm).bit_length() - 1
            bm &= bm - 1
            vec = 1 << fc
            for r in range(rank):
                if (rr[r] >> fc) & 1:
                    vec |= 1 << pivcols[r]
            basis.append(vec)
        x = x0
        for t in range(1 << nf):
            if t:
                x ^= basis[(t & -t).bit_length() - 1]
            enumerated += 1
            sols.add(x)
            if len(sols) >= stop_at:
                return stop_at, enumerated
    return len(sols), enumerated


def exact_count_small(n: int, masks: Sequence[int], pats: Sequence[int]) -> int:
    """Satisfying assignments by chunked vectorized enumeration of all 2^n."""
    total = 1 << n
    chunk = 1 << min(n, 20)
    count = 0
    masks_u = [np.uint64(v) for v in masks]
    pats_u = [np.uint64(v) for v in pats]
    for start in range(0, total, chunk):
        xs = np.arange(start, start + chunk, dtype=np.uint64)
        sat = np.zeros(chunk, dtype=bool)
        for mk, pt in zip(masks_u, pats_u):
            sat |= (xs & mk) == pt
        count += int(sat.sum())
    return count
