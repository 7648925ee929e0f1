"""Tree decompositions and exact minimum f-width.

The optimiser works over potential maximal cliques (PMCs) of the primal
graph: every hyperedge is a primal clique, hence contained in some bag of
any decomposition, and refining bags to the maximal cliques of an induced
minimal triangulation never increases a monotone cost.  The DP below is
the classical block/PMC dynamic program with the bag cost abstracted to an
arbitrary monotone function; tests cross-validate it against an exhaustive
elimination-ordering search.
"""

from . import kernels
from .errors import DomainError, ResourceLimitError
from .hypergraph import primal_graph

PMC_CAP = 16


class TreeDecomposition:
    """Rooted tree of bags; node ids are ints, exactly one root."""

    def __init__(self, bags, parent):
        self.bags = {int(t): frozenset(b) for t, b in bags.items()}
        self.parent = {int(t): (None if p is None else int(p))
                       for t, p in parent.items()}
        if set(self.bags) != set(self.parent):
            raise DomainError("bag/parent node sets differ")
        roots = [t for t, p in self.parent.items() if p is None]
        if len(self.bags) and len(roots) != 1:
            raise DomainError("decomposition must have exactly one root")
        # reject cycles / dangling parents
        for t in self.bags:
            seen = set()
            cur = t
            while cur is not None:
                if cur in seen:
                    raise DomainError("cycle in parent links")
                seen.add(cur)
                cur = self.parent[cur]
                if cur is not None and cur not in self.bags:
                    raise DomainError("parent points to unknown node")

    @property
    def nodes(self):
        return sorted(self.bags)

    def root(self):
        return next(t for t, p in self.parent.items() if p is None)

    def children(self, t):
        return sorted(u for u, p in self.parent.items() if p == t)

    def width_under(self, f):
        return max(f(b) for b in self.bags.values())

    def to_text(self):
        lines = []
        for t in self.nodes:
            p = self.parent[t]
            bag = " ".join(sorted(self.bags[t]))
            lines.append(f"node {t} parent {'-' if p is None else p} bag {bag}".rstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        bags, parent = {}, {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            if toks[0] != "node" or toks[2] != "parent" or toks[4] != "bag":
                raise DomainError(f"bad decomposition line: {line!r}")
            t = int(toks[1])
            bags[t] = frozenset(toks[5:])
            parent[t] = None if toks[3] == "-" else int(toks[3])
        return cls(bags, parent)

    def __repr__(self):
        return f"TreeDecomposition({len(self.bags)} bags)"


def validate_decomposition(H, T):
    """Check both decomposition conditions; returns (ok, violations)."""
    violations = []
    vset = set(H.vertices)
    for t, b in T.bags.items():
        extra = b - vset
        if extra:
            violations.append(f"bag {t} contains unknown vertices {sorted(extra)}")
    for e in H.edges:
        if not any(e <= b for b in T.bags.values()):
            violations.append(f"edge {sorted(e)} not contained in any bag")
    for v in H.vertices:
        nodes = {t for t, b in T.bags.items() if v in b}
        if not nodes:
            continue
        # connectivity in the tree: walk up from each node to the root,
        # the occurrence set must induce a subtree
        start = next(iter(nodes))
        seen = {start}
        frontier = [start]
        while frontier:
            t = frontier.pop()
            for u in list(T.children(t)) + ([T.parent[t]] if T.parent[t] is not None else []):
                if u in nodes and u not in seen:
                    seen.add(u)
                    frontier.append(u)
        if seen != nodes:
            violations.append(f"occurrences of vertex {v} are not connected")
    return not violations, violations


def _bits(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _neighborhood(adj, mask):
    nb = 0
    for i in _bits(mask):
        nb |= adj[i]
    return nb & ~mask


def enumerate_potential_maximal_cliques(G, cap=PMC_CAP):
    """All vertex sets that are maximal cliques of some minimal
    triangulation of G.

    A non-empty S qualifies iff (a) no component of G - S sees all of S,
    and (b) every non-adjacent pair in S is seen together by some
    component of G - S.
    """
    n = G.n
    if n > cap:
        raise ResourceLimitError(f"|V|={n} exceeds PMC cap {cap}")
    adj = G.adjacency
    full = (1 << n) - 1
    out = []
    for S in range(1, full + 1):
        comps = kernels.connected_components(n, adj, full & ~S)
        comp_nbs = []
        ok = True
        for c in comps:
            nb = _neighborhood(adj, c) & S
            if nb == S:
                ok = False
                break
            comp_nbs.append(nb)
        if not ok:
            continue
        # completion check for non-adjacent pairs inside S
        for i in _bits(S):
            rest = S & ~((1 << (i + 1)) - 1) & ~adj[i]
            for j in _bits(rest):
                if not any((nb >> i & 1) and (nb >> j & 1) for nb in comp_nbs):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(S)
    out.sort()
    return [G.names_of(m) for m in out]


class _WidthDP:
    def __init__(self, G, cost):
        self.G = G
        self.adj = G.adjacency
        self.n = G.n
        self.cost = cost
        self.pmcs = [G.mask_of(s) for s in
                     enumerate_potential_maximal_cliques(G, cap=PMC_CAP)]
        self.block_memo = {}

    def blocks_under(self, omega, inside_mask):
        """Full blocks (N(C), C) for components C of G - omega within inside_mask."""
        out = []
        for c in kernels.connected_components(self.n, self.adj, inside_mask & ~omega):
            out.append((_neighborhood(self.adj, c), c))
        return out

    def block_cost(self, S, C):
        key = (S, C)
        if key in self.block_memo:
            return self.block_memo[key]
        best = None
        best_choice = None
        region = S | C
        for omega in self.pmcs:
            if omega & ~region or not (omega & C) or (S & ~omega):
                continue
            val = self.cost(omega)
            sub = self.blocks_under(omega, C)
            ok = True
            for (S2, C2) in sub:
                v2, _ = self.block_cost(S2, C2)
                if v2 is None:
                    ok = False
                    break
                if v2 > val:
                    val = v2
            if ok and (best is None or val < best):
                best, best_choice = val, omega
        self.block_memo[key] = (best, best_choice)
        return self.block_memo[key]

    def solve_component(self, comp_mask):
        best, best_choice = None, None
        for omega in self.pmcs:
            if omega & ~comp_mask:
                continue
            val = self.cost(omega)
            ok = True
            for (S2, C2) in self.blocks_under(omega, comp_mask):
                v2, _ = self.block_cost(S2, C2)
                if v2 is None:
                    ok = False
                    break
                if v2 > val:
                    val = v2
            if ok and (best is None or val < best):
                best, best_choice = val, omega
        assert best is not None, "DP found no decomposition (bug)"
        return best, best_choice

    def build_tree(self, omega, inside_mask, next_id, bags, parent, parent_id):
        t = next_id[0]
        next_id[0] += 1
        bags[t] = self.G.names_of(omega)
        parent[t] = parent_id
        for (S2, C2) in self.blocks_under(omega, inside_mask):
            _, choice = self.block_cost(S2, C2)
            self.build_tree(choice, C2, next_id, bags, parent, t)
        return t


def min_f_width(H, f, verify_monotone=False, monotone_cap=8):
    """Exact minimum f-width of H with a witness decomposition.

    f maps frozensets of vertex names to a totally ordered cost.  The
    caller asserts monotonicity; pass verify_monotone=True to check it
    exhaustively (only allowed at small vertex counts).
    """
    if verify_monotone:
        if H.n > monotone_cap:
            raise ResourceLimitError("monotonicity check too large")
        names = H.vertices
        for mask in range(1 << H.n):
            S = frozenset(names[i] for i in _bits(mask))
            for v in names:
                if v in S:
                    continue
                if f(S) > f(S | {v}):
                    raise DomainError(f"oracle not monotone at {sorted(S)} + {v}")
    G = primal_graph(H)
    if G.n == 0:
        return f(frozenset()), TreeDecomposition({0: frozenset()}, {0: None})
    cache = {}

    def cost(mask):
        val = cache.get(mask)
        if val is None:
            val = f(G.names_of(mask))
            cache[mask] = val
        return val

    dp = _WidthDP(G, cost)
    comps = kernels.connected_components(G.n, G.adjacency)
    width = None
    bags, parent = {}, {}
    next_id = [0]
    prev_root = None
    for comp in comps:
        val, choice = dp.solve_component(comp)
        if width is None or val > width:
            width = val
        root = dp.build_tree(choice, comp, next_id, bags, parent, prev_root)
        if prev_root is None:
            prev_root = root
    return width, TreeDecomposition(bags, parent)


def treewidth(H):
    """Minimum over decompositions of max bag size minus one."""
    return min_f_width(H, lambda b: len(b) - 1)


def generalized_hypertree_width(H):
    """Minimum over decompositions of the max integral edge cover of a bag."""
    from .fractional import edge_cover_number
    return min_f_width(H, lambda b: edge_cover_number(H, b))


def fractional_hypertree_width(H):
    """Minimum over decompositions of the max fractional edge cover of a bag."""
    from .fractional import fractional_edge_cover_number
    return min_f_width(H, lambda b: fractional_edge_cover_number(H, b)[0])


def mu_width(H, mu):
    """Minimum width under the modular cost mu (a fractional independent set)."""
    mu.validate(H)
    return min_f_width(H, mu.mass)


def b_width(H, b, verify=True):
    """Minimum width under a monotone edge-dominated cost with b(empty)=0.

    The three properties are verified exhaustively (domain error on
    failure) unless verify=False.
    """
    if verify:
        if b(frozenset()) != 0:
            raise DomainError("b(empty) != 0")
        for e in H.edges:
            if b(e) > 1:
                raise DomainError(f"b not edge-dominated at {sorted(e)}")
        return min_f_width(H, b, verify_monotone=True)
    return min_f_width(H, b)
