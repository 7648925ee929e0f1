# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled bitset graph kernels for n <= 64 vertices.

Same contracts as hgcsp._purekern; the dispatcher in hgcsp.kernels falls
back to the pure version for larger vertex counts or when this module
is not built.
"""

from libc.stdint cimport uint64_t

IMPLEMENTATION = "compiled"

cdef int _bit_index(uint64_t m):
    cdef int i = 0
    while not (m & 1):
        m >>= 1
        i += 1
    return i


cdef uint64_t _reach(int n, uint64_t *adj, uint64_t seed, uint64_t allowed):
    cdef uint64_t reached = seed & allowed
    cdef uint64_t frontier = reached
    cdef uint64_t grown, m, low
    while frontier:
        grown = 0
        m = frontier
        while m:
            low = m & (~m + 1)
            grown |= adj[_bit_index(low)]
            m ^= low
        frontier = grown & allowed & ~reached
        reached |= frontier
    return reached


cdef void _load_adj(int n, object adj, uint64_t *buf) except *:
    cdef int i
    for i in range(n):
        buf[i] = <uint64_t> adj[i]


def reachable(int n, adj, seed_mask, allowed_mask=-1):
    cdef uint64_t buf[64]
    cdef uint64_t allowed
    if n > 64:
        raise ValueError("compiled kernel limited to 64 vertices")
    _load_adj(n, adj, buf)
    if allowed_mask == -1:
        allowed = (<uint64_t>1 << n) - 1 if n < 64 else <uint64_t>0xFFFFFFFFFFFFFFFF
    else:
        allowed = <uint64_t> allowed_mask
    return int(_reach(n, buf, <uint64_t> seed_mask, allowed))


def connected_components(int n, adj, within_mask=-1):
    cdef uint64_t buf[64]
    cdef uint64_t remaining, low, comp
    if n > 64:
        raise ValueError("compiled kernel limited to 64 vertices")
    _load_adj(n, adj, buf)
    if within_mask == -1:
        remaining = (<uint64_t>1 << n) - 1 if n < 64 else <uint64_t>0xFFFFFFFFFFFFFFFF
    else:
        remaining = <uint64_t> within_mask
    comps = []
    while remaining:
        low = remaining & (~remaining + 1)
        comp = _reach(n, buf, low, remaining)
        comps.append(int(comp))
        remaining &= ~comp
    return comps


def is_clique(adj, mask):
    cdef uint64_t m = <uint64_t> mask
    cdef uint64_t full = m
    cdef uint64_t low
    cdef int v
    while m:
        low = m & (~m + 1)
        m ^= low
        v = _bit_index(low)
        if (full & ~low) & ~(<uint64_t> adj[v]):
            return False
    return True


cdef list _out
cdef int _stack[64]


cdef void _extend(int n, uint64_t *adj, uint64_t ymask, int depth,
                  int last, uint64_t path_mask):
    cdef uint64_t cand, forbidden, low
    cdef int v, i
    if (<uint64_t>1 << last) & ymask:
        _out.append(tuple([_stack[i] for i in range(depth)]))
    cand = adj[last] & ~path_mask
    forbidden = path_mask & ~(<uint64_t>1 << last)
    while cand:
        low = cand & (~cand + 1)
        cand ^= low
        v = _bit_index(low)
        if adj[v] & forbidden:
            continue
        _stack[depth] = v
        _extend(n, adj, ymask, depth + 1, v, path_mask | low)


def enumerate_minimal_paths(int n, adj, xmask, ymask):
    global _out
    cdef uint64_t buf[64]
    cdef uint64_t starts, low, ym
    cdef int v
    if n > 64:
        raise ValueError("compiled kernel limited to 64 vertices")
    _load_adj(n, adj, buf)
    starts = <uint64_t> xmask
    ym = <uint64_t> ymask
    _out = []
    while starts:
        low = starts & (~starts + 1)
        starts ^= low
        v = _bit_index(low)
        _stack[0] = v
        _extend(n, buf, ym, 1, v, low)
    result = _out
    _out = []
    result.sort()
    return result
