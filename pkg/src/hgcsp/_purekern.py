"""Pure-Python bitset graph kernels.

Vertices are integer indices 0..n-1; vertex sets are int bitmasks and
``adj[i]`` is the neighbour mask of vertex i (self bit excluded).  These
functions sit in the innermost loops of path enumeration, component
splitting and reachability closures; a compiled twin lives in
``_fastkern.pyx`` and :mod:`hgcsp.kernels` picks between the two.
"""

IMPLEMENTATION = "pure"


def reachable(n, adj, seed_mask, allowed_mask=-1):
    """Closure of seed_mask under adjacency, restricted to allowed_mask."""
    if allowed_mask == -1:
        allowed_mask = (1 << n) - 1
    reached = seed_mask & allowed_mask
    frontier = reached
    while frontier:
        grown = 0
        m = frontier
        while m:
            low = m & -m
            grown |= adj[low.bit_length() - 1]
            m ^= low
        frontier = grown & allowed_mask & ~reached
        reached |= frontier
    return reached


def connected_components(n, adj, within_mask=-1):
    """Components of the subgraph induced by within_mask, ordered by
    lowest contained vertex index."""
    if within_mask == -1:
        within_mask = (1 << n) - 1
    remaining = within_mask
    comps = []
    while remaining:
        low = remaining & -remaining
        comp = reachable(n, adj, low, remaining)
        comps.append(comp)
        remaining &= ~comp
    return comps


def is_clique(adj, mask):
    """True iff every pair inside mask is adjacent."""
    m = mask
    while m:
        low = m & -m
        m ^= low
        v = low.bit_length() - 1
        if (mask & ~low) & ~adj[v]:
            return False
    return True


def enumerate_minimal_paths(n, adj, xmask, ymask):
    """All minimal paths whose first vertex lies in xmask and last vertex
    in ymask, as index tuples in lexicographic order.

    Minimal: v_i, v_j non-adjacent whenever |i-j| > 1.  Includes the
    zero-length paths at vertices of xmask & ymask.
    """
    out = []
    stack_path = []

    def extend(last, path_mask):
        if (1 << last) & ymask:
            out.append(tuple(stack_path))
        cand = adj[last] & ~path_mask
        forbidden = path_mask & ~(1 << last)
        while cand:
            low = cand & -cand
            cand ^= low
            v = low.bit_length() - 1
            if adj[v] & forbidden:
                continue
            stack_path.append(v)
            extend(v, path_mask | low)
            stack_path.pop()

    starts = xmask
    while starts:
        low = starts & -starts
        starts ^= low
        v = low.bit_length() - 1
        stack_path.append(v)
        extend(v, low)
        stack_path.pop()
    out.sort()
    return out
