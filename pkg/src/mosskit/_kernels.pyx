# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trial loops and CIS enumeration.

Same xoshiro256** generator and draw sequence as the pure-Python path, so
a fixed seed produces identical tallies on either backend.
"""

from libc.stdint cimport int8_t, int64_t, uint8_t, uint64_t
from libc.stdlib cimport free, malloc


cdef inline uint64_t _rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t _next_u64(uint64_t* s) noexcept nogil:
    cdef uint64_t result = _rotl(s[1] * 5, 7) * 9
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


cdef inline uint64_t _randbelow(uint64_t* s, uint64_t n) noexcept nogil:
    # bias-free rejection; (0 - n) % n == 2^64 mod n in uint64 arithmetic
    cdef uint64_t rem = (0 - n) % n
    cdef uint64_t r, limit
    if rem == 0:
        return _next_u64(s) % n
    limit = 0 - rem
    r = _next_u64(s)
    while r >= limit:
        r = _next_u64(s)
    return r % n


cdef inline uint64_t _randint1(uint64_t* s, uint64_t n) noexcept nogil:
    return _randbelow(s, n) + 1


cdef inline int64_t _lower_bound_u64(const uint64_t* arr, int64_t lo, int64_t hi,
                                     uint64_t val) noexcept nogil:
    # first index in [lo, hi) with arr[idx] >= val
    cdef int64_t mid
    while lo < hi:
        mid = lo + ((hi - lo) >> 1)
        if arr[mid] < val:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline int64_t _find_pos(const int64_t* indices, int64_t lo, int64_t hi,
                              int64_t target) noexcept nogil:
    # binary search in a sorted adjacency block; target must be present
    cdef int64_t mid
    while lo < hi:
        mid = lo + ((hi - lo) >> 1)
        if indices[mid] < target:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline bint _has_edge(const int64_t* indptr, const int64_t* indices,
                           int64_t a, int64_t b) noexcept nogil:
    cdef int64_t da = indptr[a + 1] - indptr[a]
    cdef int64_t db = indptr[b + 1] - indptr[b]
    cdef int64_t lo, hi, mid
    if db < da:
        a, b = b, a
    lo = indptr[a]
    hi = indptr[a + 1]
    while lo < hi:
        mid = lo + ((hi - lo) >> 1)
        if indices[mid] < b:
            lo = mid + 1
        elif indices[mid] > b:
            hi = mid
        else:
            return True
    return False


cdef inline int64_t _rank_upper_bound(const int64_t* arr, int64_t lo, int64_t hi,
                                      int64_t val) noexcept nogil:
    # first index in [lo, hi) with arr[idx] > val
    cdef int64_t mid
    while lo < hi:
        mid = lo + ((hi - lo) >> 1)
        if arr[mid] <= val:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline int64_t _skip1(uint64_t* s, int64_t d, int64_t excl) noexcept nogil:
    # uniform 0-based position in [0, d) avoiding one excluded position
    cdef int64_t j = <int64_t> _randint1(s, <uint64_t> (d - 1)) - 1
    if j >= excl:
        j += 1
    return j


cdef inline int64_t _skip2(uint64_t* s, int64_t d, int64_t e1, int64_t e2) noexcept nogil:
    # avoid two distinct excluded positions, applied in ascending order
    cdef int64_t lo_e = e1 if e1 < e2 else e2
    cdef int64_t hi_e = e2 if e1 < e2 else e1
    cdef int64_t j = <int64_t> _randint1(s, <uint64_t> (d - 2)) - 1
    if j >= lo_e:
        j += 1
    if j >= hi_e:
        j += 1
    return j


def run_sampler(int code, int64_t budget,
                const int64_t[:] indptr, const int64_t[:] indices,
                const int64_t[:] degrees,
                const int64_t[:] order_adj, const int64_t[:] order_adj_rank,
                const int64_t[:] rank,
                const uint64_t[:] acc_gamma, const uint64_t[:] acc_gamma_check,
                const uint64_t[:] acc_gamma1, const uint64_t[:] acc_gamma2,
                const uint64_t[:] acc_sigma, const uint64_t[:] acc_sigma_check,
                const int64_t[:] sigma_sum, const int64_t[:] gamma_check,
                const int64_t[:] gamma2,
                const uint8_t[:] tau_fallback,
                uint64_t total_gamma, uint64_t total_gamma_check,
                uint64_t total_gamma1, uint64_t total_gamma2,
                const int8_t[:] mask_to_id4, const int8_t[:] mask_to_id5,
                uint64_t[:] state, int64_t[:] hits, int64_t[:] counters):
    """Run `budget` trials of one method (0=moss4 1=moss4min 2=t5 3=path5)."""
    cdef uint64_t s[4]
    cdef int64_t n = indptr.shape[0] - 1
    cdef int64_t k, v, u, w, r, t
    cdef int64_t lo_v, hi_v, lo_u, hi_u, lo_w, hi_w
    cdef int64_t u_pos, w_pos, r_pos, t_pos, v_pos, pos_v, d_vu, d_uv
    cdef int64_t wu, total, running, hole_lo, mask
    cdef uint64_t rnd
    cdef const int64_t* p_indptr = &indptr[0]
    cdef const int64_t* p_indices = &indices[0]
    s[0] = state[0]
    s[1] = state[1]
    s[2] = state[2]
    s[3] = state[3]

    with nogil:
        for k in range(budget):
            if code == 0:
                # --- moss4 ---
                rnd = _randint1(s, total_gamma)
                v = _lower_bound_u64(&acc_gamma[0], 0, n, rnd)
                lo_v = indptr[v]
                hi_v = indptr[v + 1]
                rnd = _randint1(s, <uint64_t> sigma_sum[v])
                u_pos = _lower_bound_u64(&acc_sigma[0], lo_v, hi_v, rnd) - lo_v
                u = indices[lo_v + u_pos]
                w_pos = _skip1(s, degrees[v], u_pos)
                w = indices[lo_v + w_pos]
                lo_u = indptr[u]
                hi_u = indptr[u + 1]
                v_pos = _find_pos(p_indices, lo_u, hi_u, v) - lo_u
                r_pos = _skip1(s, degrees[u], v_pos)
                r = indices[lo_u + r_pos]
                if r == w:
                    counters[0] += 1
                    continue
                mask = 0b010011  # v-u, v-w, u-r
                if _has_edge(p_indptr, p_indices, v, r):
                    mask |= 1 << 2
                if _has_edge(p_indptr, p_indices, u, w):
                    mask |= 1 << 3
                if _has_edge(p_indptr, p_indices, w, r):
                    mask |= 1 << 5
                hits[mask_to_id4[mask]] += 1
            elif code == 1:
                # --- moss4min ---
                rnd = _randint1(s, total_gamma_check)
                v = _lower_bound_u64(&acc_gamma_check[0], 0, n, rnd)
                lo_v = indptr[v]
                hi_v = indptr[v + 1]
                rnd = _randint1(s, <uint64_t> gamma_check[v])
                u_pos = _lower_bound_u64(&acc_sigma_check[0], lo_v, hi_v, rnd) - lo_v
                u = order_adj[lo_v + u_pos]
                d_vu = (hi_v - lo_v) - 1 - u_pos
                rnd = _randint1(s, <uint64_t> d_vu)
                w = order_adj[lo_v + u_pos + <int64_t> rnd]
                lo_u = indptr[u]
                hi_u = indptr[u + 1]
                pos_v = _rank_upper_bound(&order_adj_rank[0], lo_u, hi_u, rank[v]) - lo_u
                d_uv = (hi_u - lo_u) - pos_v
                rnd = _randint1(s, <uint64_t> d_uv)
                r = order_adj[lo_u + pos_v + <int64_t> rnd - 1]
                if r == w:
                    counters[0] += 1
                    continue
                mask = 0b010011
                if _has_edge(p_indptr, p_indices, v, r):
                    mask |= 1 << 2
                if _has_edge(p_indptr, p_indices, u, w):
                    mask |= 1 << 3
                if _has_edge(p_indptr, p_indices, w, r):
                    mask |= 1 << 5
                # credit only when the sampled w-r pair is adjacent: cycles and
                # cliques always are, and this keeps each diamond's number of
                # crediting tuples at exactly 2 under any node order
                if (mask >> 5) & 1 and (mask_to_id4[mask] == 3 or
                                        mask_to_id4[mask] == 5 or
                                        mask_to_id4[mask] == 6):
                    hits[mask_to_id4[mask]] += 1
                else:
                    counters[1] += 1
            elif code == 2:
                # --- t5 ---
                rnd = _randint1(s, total_gamma1)
                v = _lower_bound_u64(&acc_gamma1[0], 0, n, rnd)
                lo_v = indptr[v]
                hi_v = indptr[v + 1]
                rnd = _randint1(s, <uint64_t> sigma_sum[v])
                u_pos = _lower_bound_u64(&acc_sigma[0], lo_v, hi_v, rnd) - lo_v
                u = indices[lo_v + u_pos]
                w_pos = _skip1(s, degrees[v], u_pos)
                w = indices[lo_v + w_pos]
                r_pos = _skip2(s, degrees[v], u_pos, w_pos)
                r = indices[lo_v + r_pos]
                lo_u = indptr[u]
                hi_u = indptr[u + 1]
                v_pos = _find_pos(p_indices, lo_u, hi_u, v) - lo_u
                t_pos = _skip1(s, degrees[u], v_pos)
                t = indices[lo_u + t_pos]
                if t == w or t == r:
                    counters[0] += 1
                    continue
                mask = (1 << 0) | (1 << 1) | (1 << 2) | (1 << 6)
                if _has_edge(p_indptr, p_indices, v, t):
                    mask |= 1 << 3
                if _has_edge(p_indptr, p_indices, u, w):
                    mask |= 1 << 4
                if _has_edge(p_indptr, p_indices, u, r):
                    mask |= 1 << 5
                if _has_edge(p_indptr, p_indices, w, r):
                    mask |= 1 << 7
                if _has_edge(p_indptr, p_indices, w, t):
                    mask |= 1 << 8
                if _has_edge(p_indptr, p_indices, r, t):
                    mask |= 1 << 9
                hits[mask_to_id5[mask]] += 1
            else:
                # --- path5 ---
                rnd = _randint1(s, total_gamma2)
                v = _lower_bound_u64(&acc_gamma2[0], 0, n, rnd)
                lo_v = indptr[v]
                hi_v = indptr[v + 1]
                total = sigma_sum[v]
                if tau_fallback[v]:
                    rnd = _randint1(s, <uint64_t> gamma2[v])
                    running = 0
                    u_pos = 0
                    while u_pos < hi_v - lo_v:
                        wu = degrees[indices[lo_v + u_pos]] - 1
                        running += wu * (total - wu)
                        if <int64_t> rnd <= running:
                            break
                        u_pos += 1
                    u = indices[lo_v + u_pos]
                else:
                    while True:
                        rnd = _randint1(s, <uint64_t> total)
                        u_pos = _lower_bound_u64(&acc_sigma[0], lo_v, hi_v, rnd) - lo_v
                        wu = degrees[indices[lo_v + u_pos]] - 1
                        if <int64_t> _randint1(s, <uint64_t> total) > wu:
                            break
                    u = indices[lo_v + u_pos]
                wu = degrees[u] - 1
                rnd = _randint1(s, <uint64_t> (total - wu))
                hole_lo = <int64_t> acc_sigma[lo_v + u_pos - 1] if u_pos > 0 else 0
                if <int64_t> rnd > hole_lo:
                    rnd += <uint64_t> wu
                w_pos = _lower_bound_u64(&acc_sigma[0], lo_v, hi_v, rnd) - lo_v
                w = indices[lo_v + w_pos]
                lo_u = indptr[u]
                hi_u = indptr[u + 1]
                v_pos = _find_pos(p_indices, lo_u, hi_u, v) - lo_u
                r_pos = _skip1(s, degrees[u], v_pos)
                r = indices[lo_u + r_pos]
                lo_w = indptr[w]
                hi_w = indptr[w + 1]
                v_pos = _find_pos(p_indices, lo_w, hi_w, v) - lo_w
                t_pos = _skip1(s, degrees[w], v_pos)
                t = indices[lo_w + t_pos]
                if t == u or r == w or t == r:
                    counters[0] += 1
                    continue
                mask = (1 << 0) | (1 << 1) | (1 << 5) | (1 << 8)
                if _has_edge(p_indptr, p_indices, v, r):
                    mask |= 1 << 2
                if _has_edge(p_indptr, p_indices, v, t):
                    mask |= 1 << 3
                if _has_edge(p_indptr, p_indices, u, w):
                    mask |= 1 << 4
                if _has_edge(p_indptr, p_indices, u, t):
                    mask |= 1 << 6
                if _has_edge(p_indptr, p_indices, w, r):
                    mask |= 1 << 7
                if _has_edge(p_indptr, p_indices, r, t):
                    mask |= 1 << 9
                hits[mask_to_id5[mask]] += 1

    state[0] = s[0]
    state[1] = s[1]
    state[2] = s[2]
    state[3] = s[3]


# ---------------------------------------------------------------------------
# Connected-induced-subgraph enumeration (exclusion-ordered expansion)
# ---------------------------------------------------------------------------

cdef struct EnumCtx:
    const int64_t* indptr
    const int64_t* indices
    int64_t* ext        # k stacked extension buffers of size n each
    uint8_t* blocked
    int64_t* counts
    const int8_t* table
    int64_t n
    int k
    int64_t cap
    int64_t found
    bint aborted


cdef inline int64_t _mask_of_c(EnumCtx* ctx, int64_t* sub, int k) noexcept nogil:
    cdef int64_t mask = 0
    cdef int bit = 0
    cdef int i, j
    for i in range(k):
        for j in range(i + 1, k):
            if _has_edge(ctx.indptr, ctx.indices, sub[i], sub[j]):
                mask |= <int64_t> 1 << bit
            bit += 1
    return mask


cdef void _enum_rec(EnumCtx* ctx, int depth, int64_t* sub,
                    int64_t ext_len) noexcept nogil:
    cdef int64_t* ext = ctx.ext + depth * ctx.n
    cdef int64_t* next_ext = ctx.ext + (depth + 1) * ctx.n
    cdef int64_t cur_len, idx, w, x, next_len, added, root
    cdef int64_t a
    root = sub[0]
    if depth == ctx.k - 1:
        for idx in range(ext_len):
            ctx.found += 1
            if ctx.found > ctx.cap:
                ctx.aborted = True
                return
            sub[ctx.k - 1] = ext[idx]
            ctx.counts[ctx.table[_mask_of_c(ctx, sub, ctx.k)]] += 1
        return
    cur_len = ext_len
    while cur_len > 0:
        cur_len -= 1
        w = ext[cur_len]
        # child extension: the remaining entries plus w's exclusive neighbors
        next_len = 0
        for idx in range(cur_len):
            next_ext[next_len] = ext[idx]
            next_len += 1
        added = next_len
        for idx in range(ctx.indptr[w], ctx.indptr[w + 1]):
            x = ctx.indices[idx]
            if x > root and not ctx.blocked[x]:
                next_ext[next_len] = x
                next_len += 1
                ctx.blocked[x] = 1
        sub[depth] = w
        _enum_rec(ctx, depth + 1, sub, next_len)
        for idx in range(added, next_len):
            ctx.blocked[next_ext[idx]] = 0
        if ctx.aborted:
            return


def enumerate_cis(int k, const int64_t[:] indptr, const int64_t[:] indices,
                  const int8_t[:] mask_to_id4, const int8_t[:] mask_to_id5,
                  int64_t cap, int64_t[:] counts):
    """Fill per-class counts; returns total found, or -1 if the cap was hit."""
    cdef int64_t n = indptr.shape[0] - 1
    cdef EnumCtx ctx
    cdef int64_t sub[5]
    cdef int64_t v, idx, x, ext_len
    cdef int64_t result
    if n == 0:
        return 0
    ctx.indptr = &indptr[0]
    ctx.indices = &indices[0]
    ctx.counts = &counts[0]
    if k == 4:
        ctx.table = &mask_to_id4[0]
    else:
        ctx.table = &mask_to_id5[0]
    ctx.n = n
    ctx.k = k
    ctx.cap = cap
    ctx.found = 0
    ctx.aborted = False
    ctx.ext = <int64_t*> malloc(k * n * sizeof(int64_t))
    ctx.blocked = <uint8_t*> malloc(n * sizeof(uint8_t))
    if ctx.ext == NULL or ctx.blocked == NULL:
        free(ctx.ext)
        free(ctx.blocked)
        raise MemoryError()
    with nogil:
        for v in range(n):
            for idx in range(n):
                ctx.blocked[idx] = 0
            ctx.blocked[v] = 1
            # depth-1 call reads the buffer at offset 1 * n
            ext_len = 0
            for idx in range(ctx.indptr[v], ctx.indptr[v + 1]):
                x = ctx.indices[idx]
                if x > v:
                    ctx.ext[ctx.n + ext_len] = x
                    ctx.blocked[x] = 1
                    ext_len += 1
            sub[0] = v
            _enum_rec(&ctx, 1, sub, ext_len)
            if ctx.aborted:
                break
    result = -1 if ctx.aborted else ctx.found
    free(ctx.ext)
    free(ctx.blocked)
    return result
