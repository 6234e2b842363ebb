# distutils: language = c++
"""Compiled hot kernels: cell walks, bounded Gaussian counting, brute-force counting.

Pure-Python twins live in ``_purepy``; both sides consume the random stream
identically, so results are bit-for-bit interchangeable.  See the twins for
the commented reference semantics.
"""

from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t
from libc.stdlib cimport free, malloc
from libcpp.unordered_set cimport unordered_set

cdef extern from *:
    """
    static inline int hc_ctz64(unsigned long long x) { return __builtin_ctzll(x); }
    static inline int hc_pop64(unsigned long long x) { return __builtin_popcountll(x); }
    """
    int hc_ctz64(unsigned long long x) nogil
    int hc_pop64(unsigned long long x) nogil

IMPL_NAME = "native"

cdef uint64_t GAMMA = <uint64_t>0x9E3779B97F4A7C15


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline uint64_t c_next_u64(uint64_t* state) nogil:
    state[0] = state[0] + GAMMA
    return mix64(state[0])


cdef inline uint64_t c_rand_below(uint64_t* state, uint64_t m) nogil:
    # 2^64 mod m rejected off the top; mirrors RandomSource.rand_below.
    cdef uint64_t rem = (<uint64_t>0 - m) % m
    cdef uint64_t full = <uint64_t>0 - rem
    cdef uint64_t u
    while True:
        u = c_next_u64(state)
        if rem == 0 or u < full:
            return u % m


def py_next_u64(state):
    """Expose the stream step for parity tests."""
    cdef uint64_t s = <uint64_t>state
    cdef uint64_t v = c_next_u64(&s)
    return v, s


def py_rand_below(state, m):
    """Expose the bounded draw for parity tests."""
    cdef uint64_t s = <uint64_t>state
    cdef uint64_t v = c_rand_below(&s, <uint64_t>m)
    return v, s


def bsat_from_base(ctx, base, int p, long long threshold, state_in):
    cdef uint64_t state = <uint64_t>state_in
    cdef int q = ctx.q
    cdef int m = ctx.m
    cdef int nwn = ctx.nwn
    cdef int nwq = ctx.nwq
    cdef const uint64_t[:, ::1] mask_w = ctx.mask_w
    cdef const uint64_t[:, ::1] pat_w = ctx.pat_w
    cdef const uint64_t[:, ::1] off_w = ctx.off_w
    cdef const int32_t[::1] free_idx = ctx.free_idx
    cdef const int32_t[::1] free_start = ctx.free_start
    cdef int s_init = base.s_init
    cdef const uint64_t[::1] dhat = base.dhat_w
    cdef const uint8_t[::1] bx = base.bx_bits

    cdef int f = q - p
    cdef int shift = p - s_init
    cdef int nwp = (p + 63) >> 6
    if nwp == 0:
        nwp = 1

    cdef uint64_t* drows = <uint64_t*>malloc(sizeof(uint64_t) * (p if p else 1))
    cdef uint8_t* ub = <uint8_t*>malloc(sizeof(uint8_t) * (p if p else 1))
    cdef uint64_t* colw = <uint64_t*>malloc(sizeof(uint64_t) * f * nwp)
    cdef uint64_t* uw = <uint64_t*>malloc(sizeof(uint64_t) * nwp)
    cdef uint64_t* zw = <uint64_t*>malloc(sizeof(uint64_t) * nwq)
    cdef uint64_t* rw = <uint64_t*>malloc(sizeof(uint64_t) * nwq)
    cdef uint64_t* xw = <uint64_t*>malloc(sizeof(uint64_t) * nwn)
    if not (drows and ub and colw and uw and zw and rw and xw):
        free(drows); free(ub); free(colw); free(uw); free(zw); free(rw); free(xw)
        raise MemoryError()

    cdef int i, j2, w, col, k, poff, pbit, cmp, lo, hi_, mid, le, ok, nf, fs, t, idx, jdi
    cdef uint64_t di, row, v, total, jj, bits, d, ow
    cdef uint8_t ui
    cdef int64_t trials = 0, visited = 0, cx
    cdef int saturated = 0
    cdef int borrow

    with nogil:
        for i in range(p):
            drows[i] = dhat[i]
            ub[i] = bx[i]
        for i in range(s_init, p):
            col = i - s_init
            di = drows[i]
            ui = ub[i]
            for j2 in range(i):
                if (drows[j2] >> col) & 1:
                    drows[j2] ^= di
                    ub[j2] ^= ui
        for i in range(f * nwp):
            colw[i] = 0
        for j2 in range(p):
            row = drows[j2] >> shift
            while row:
                k = hc_ctz64(row)
                row &= row - 1
                colw[k * nwp + (j2 >> 6)] |= (<uint64_t>1) << (j2 & 63)
        for w in range(nwp):
            uw[w] = 0
        for j2 in range(p):
            if ub[j2]:
                uw[j2 >> 6] |= (<uint64_t>1) << (j2 & 63)

        v = 0
        total = (<uint64_t>1) << f
        poff = p >> 6
        pbit = p & 63
        jj = 0
        while True:
            visited += 1
            for w in range(nwq):
                zw[w] = uw[w] if w < nwp else 0
            zw[poff] |= v << pbit
            if pbit != 0 and poff + 1 < nwq:
                zw[poff + 1] |= v >> (64 - pbit)
            # padding when the state value is not below the universe size
            cmp = 0
            for w in range(nwq - 1, -1, -1):
                if zw[w] != off_w[m, w]:
                    cmp = 1 if zw[w] > off_w[m, w] else -1
                    break
            if cmp < 0:
                lo = 0
                hi_ = m
                while lo + 1 < hi_:
                    mid = (lo + hi_) >> 1
                    le = 1
                    for w in range(nwq - 1, -1, -1):
                        if off_w[mid, w] != zw[w]:
                            le = 1 if off_w[mid, w] < zw[w] else 0
                            break
                    if le:
                        lo = mid
                    else:
                        hi_ = mid
                i = lo
                borrow = 0
                for w in range(nwq):
                    ow = off_w[i, w]
                    d = zw[w] - ow - <uint64_t>borrow
                    if zw[w] < ow or (zw[w] == ow and borrow):
                        borrow = 1
                    else:
                        borrow = 0
                    rw[w] = d
                for w in range(nwn):
                    xw[w] = pat_w[i, w]
                fs = free_start[i]
                nf = free_start[i + 1] - fs
                for w in range((nf + 63) >> 6):
                    bits = rw[w]
                    while bits:
                        t = hc_ctz64(bits)
                        bits &= bits - 1
                        idx = free_idx[fs + (w << 6) + t]
                        xw[idx >> 6] |= (<uint64_t>1) << (idx & 63)
                cx = 0
                while trials + cx < threshold:
                    jdi = <int>c_rand_below(&state, <uint64_t>m)
                    cx += 1
                    ok = 1
                    for w in range(nwn):
                        if (xw[w] & mask_w[jdi, w]) != pat_w[jdi, w]:
                            ok = 0
                            break
                    if ok:
                        break
                trials += cx
                if trials >= threshold:
                    saturated = 1
                    break
            if jj == total - 1:
                break
            k = hc_ctz64(jj + 1)
            for w in range(nwp):
                uw[w] ^= colw[k * nwp + w]
            v ^= (<uint64_t>1) << k
            jj += 1

    free(drows); free(ub); free(colw); free(uw); free(zw); free(rw); free(xw)
    return int(trials), bool(saturated), int(visited), int(state)


def ge_bsat_cells(int n, const uint64_t[::1] masks, const uint64_t[::1] pats,
                  const uint64_t[::1] rows, const uint8_t[::1] rhs,
                  long long stop_at):
    cdef uint64_t full = <uint64_t>0xFFFFFFFFFFFFFFFF if n == 64 else ((<uint64_t>1 << n) - 1)
    cdef int m = masks.shape[0]
    cdef int p = rows.shape[0]
    cdef int cap = p if p else 1
    cdef uint64_t* rr = <uint64_t*>malloc(sizeof(uint64_t) * cap)
    cdef uint8_t* rb = <uint8_t*>malloc(sizeof(uint8_t) * cap)
    cdef int* pivcols = <int*>malloc(sizeof(int) * cap)
    cdef uint64_t* basis = <uint64_t*>malloc(sizeof(uint64_t) * (n if n else 1))
    if not (rr and rb and pivcols and basis):
        free(rr); free(rb); free(pivcols); free(basis)
        raise MemoryError()
    cdef unordered_set[uint64_t] sols
    cdef int64_t enumerated = 0
    cdef int ci, j, r, rank, pivot, col, nf, nb, fc
    cdef uint64_t fmask, fpat, freemask, tmp, x0, bm, vec, x, t, tot, trr
    cdef int inconsistent

    try:
        for ci in range(m):
            fmask = masks[ci]
            fpat = pats[ci]
            freemask = full & (~fmask)
            for j in range(p):
                rr[j] = rows[j] & freemask
                rb[j] = rhs[j] ^ <uint8_t>(hc_pop64(rows[j] & fpat) & 1)
            rank = 0
            tmp = freemask
            while tmp and rank < p:
                col = hc_ctz64(tmp)
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
                pivcols[rank] = col
                rank += 1
            inconsistent = 0
            for r in range(rank, p):
                if rb[r]:
                    inconsistent = 1
                    break
            if inconsistent:
                continue
            nf = n - hc_pop64(fmask) - rank
            if nf >= 63 or ((<int64_t>1) << nf) >= stop_at:
                return int(stop_at), int(enumerated)
            x0 = fpat
            for r in range(rank):
                if rb[r]:
                    x0 |= (<uint64_t>1) << pivcols[r]
            bm = freemask
            for r in range(rank):
                bm &= ~((<uint64_t>1) << pivcols[r])
            nb = 0
            while bm:
                fc = hc_ctz64(bm)
                bm &= bm - 1
                vec = (<uint64_t>1) << fc
                for r in range(rank):
                    if (rr[r] >> fc) & 1:
                        vec |= (<uint64_t>1) << pivcols[r]
                basis[nb] = vec
                nb += 1
            x = x0
            tot = (<uint64_t>1) << nf
            t = 0
            while t < tot:
                if t:
                    x ^= basis[hc_ctz64(t)]
                enumerated += 1
                sols.insert(x)
                if <int64_t>sols.size() >= stop_at:
                    return int(stop_at), int(enumerated)
                t += 1
        return int(sols.size()), int(enumerated)
    finally:
        free(rr); free(rb); free(pivcols); free(basis)


def exact_count_small(int n, const uint64_t[::1] masks, const uint64_t[::1] pats):
    cdef int m = masks.shape[0]
    cdef uint64_t x = 0
    cdef uint64_t total = (<uint64_t>1) << n
    cdef int64_t count = 0
    cdef int i
    with nogil:
        while x < total:
            for i in range(m):
                if (x & masks[i]) == pats[i]:
                    count += 1
                    break
            x += 1
    return int(count)
