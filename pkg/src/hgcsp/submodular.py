"""Set-function oracles and the ordered-marginal machinery built on them:
property checking, the minimum-over-orderings transform b*, fractional
separator rounding with its 31x cost guarantee, the flow-to-submodular
oracle generator, and the decompose-or-highly-connected procedure.
"""

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .errors import CertificateError, DomainError, ResourceLimitError
from .fractional import (ConnectivityCertificate, FractionalIndependentSet,
                         fractional_edge_cover_number, is_mu_lambda_connected,
                         min_fractional_separator)
from .decomposition import TreeDecomposition, validate_decomposition
from .hypergraph import induced_subhypergraph

PROPERTY_CAP = 8
BSTAR_CAP = 14
PAIR_SEARCH_CAP = 10
ROUNDING_FACTOR = 31  # cost of the rounded separator is at most 31x the weight


def _parse_fraction(tok):
    return Fraction(tok)


class SetFunctionOracle:
    """Memoized evaluator for a cost function on vertex subsets."""

    def __init__(self, H, evaluator, kind="custom", label=""):
        self.H = H
        self._evaluator = evaluator
        self.kind = kind
        self.label = label
        self._memo = {}

    def value(self, S):
        key = self.H.mask_of(S)
        v = self._memo.get(key)
        if v is None:
            v = self._evaluator(frozenset(S))
            self._memo[key] = v
        return v

    __call__ = value

    @classmethod
    def modular(cls, H, weights):
        weights = {v: Fraction(w) for v, w in weights.items()}
        for v in weights:
            H.index(v)

        def ev(S):
            return sum((weights.get(v, Fraction(0)) for v in S), Fraction(0))

        return cls(H, ev, kind="modular")

    @classmethod
    def coverage(cls, H, weighted_sets):
        """b(S) = total weight of the given sets intersecting S."""
        sets = [(frozenset(T), Fraction(w)) for T, w in weighted_sets]
        for T, w in sets:
            if w < 0:
                raise DomainError("negative coverage weight")
            for v in T:
                H.index(v)

        def ev(S):
            return sum((w for T, w in sets if T & S), Fraction(0))

        return cls(H, ev, kind="coverage")

    @classmethod
    def rho_star(cls, H):
        """b(S) = exact fractional edge cover number of S in H."""
        return cls(H, lambda S: fractional_edge_cover_number(H, S)[0],
                   kind="rho-star")

    @classmethod
    def from_flow(cls, H, flow):
        return cls.coverage(H, [(p.vertex_set(), w) for p, w in flow.items()])

    @classmethod
    def from_table(cls, H, table):
        table = {frozenset(S): Fraction(v) for S, v in table.items()}
        if len(table) != 1 << H.n:
            raise DomainError("table must list every subset once")

        def ev(S):
            return table[frozenset(S)]

        return cls(H, ev, kind="table")

    @classmethod
    def from_text(cls, H, text):
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise DomainError("empty oracle definition")
        kind, body = lines[0], lines[1:]
        if kind == "modular":
            weights = {}
            for ln in body:
                name, val = ln.split()
                weights[name] = _parse_fraction(val)
            return cls.modular(H, weights)
        if kind == "coverage":
            sets = []
            for ln in body:
                toks = ln.split()
                sets.append((toks[1:], _parse_fraction(toks[0])))
            return cls.coverage(H, sets)
        if kind == "rho-star":
            return cls.rho_star(H)
        if kind == "flow":
            sets = []
            for ln in body:
                toks = ln.split()
                sets.append((toks[1:], _parse_fraction(toks[0])))
            return cls.coverage(H, sets)
        if kind == "table":
            table = {}
            for ln in body:
                toks = ln.split()
                table[frozenset(toks[1:])] = _parse_fraction(toks[0])
            return cls.from_table(H, table)
        raise DomainError(f"unknown oracle kind {kind!r}")


@dataclass
class PropertyReport:
    monotone: bool
    submodular: bool
    edge_dominated: bool
    zero_on_empty: bool
    counterexamples: dict = field(default_factory=dict)

    def all_ok(self):
        return (self.monotone and self.submodular and self.edge_dominated
                and self.zero_on_empty)


def check_properties(b, H, cap=PROPERTY_CAP):
    """Exhaustive property verdicts with counterexamples when false."""
    n = H.n
    if n > cap:
        raise ResourceLimitError(f"|V|={n} exceeds property-check cap {cap}")
    names = H.vertices
    subsets = [frozenset(names[i] for i in range(n) if m >> i & 1)
               for m in range(1 << n)]
    vals = {S: b(S) for S in subsets}
    cx = {}
    zero_on_empty = vals[frozenset()] == 0
    if not zero_on_empty:
        cx["zero_on_empty"] = vals[frozenset()]
    monotone = True
    for S in subsets:
        for v in names:
            if v not in S and vals[S] > vals[S | {v}]:
                monotone = False
                cx.setdefault("monotone", (S, v))
    submodular = True
    for X in subsets:
        for Y in subsets:
            if vals[X] + vals[Y] < vals[X & Y] + vals[X | Y]:
                submodular = False
                cx.setdefault("submodular", (X, Y))
    edge_dominated = True
    for e in H.edges:
        if vals[frozenset(e)] > 1:
            edge_dominated = False
            cx.setdefault("edge_dominated", e)
    return PropertyReport(monotone, submodular, edge_dominated, zero_on_empty, cx)


def preceding_neighbors(H, pi, v):
    """Neighbors of v that come before v in the ordering pi."""
    adj = H.adjacency
    iv = H.index(v)
    out = set()
    for u in pi:
        if u == v:
            break
        if adj[iv] >> H.index(u) & 1:
            out.add(u)
    return frozenset(out)


def marginal(b, H, pi, Z, v):
    """Marginal value of v with respect to its Z-neighbors preceding it."""
    P = preceding_neighbors(H, pi, v) & frozenset(Z)
    return b(P | {v}) - b(P)


def b_pi(b, H, pi, Z):
    """Sum of ordered marginals of the members of Z under pi."""
    Z = frozenset(Z)
    zero = b(frozenset()) - b(frozenset())  # zero of the oracle's value type
    total = zero
    for v in Z:
        total = total + marginal(b, H, pi, Z, v)
    return total


def b_star(b, H, Z, cap=BSTAR_CAP):
    """Minimum of b_pi(Z) over all orderings, with a witness ordering.

    Only the induced order of Z matters, so the minimum is computed by a
    subset DP over Z (placing one vertex at a time).  The witness is
    returned as a full ordering of V(H): Z first, the rest canonical.
    """
    Z = frozenset(Z)
    k = len(Z)
    if k > cap:
        raise ResourceLimitError(f"|Z|={k} exceeds b* cap {cap}")
    rest = tuple(v for v in H.vertices if v not in Z)
    if k == 0:
        return b(frozenset()), rest
    zs = sorted(Z)
    adj = H.adjacency
    zidx = {v: i for i, v in enumerate(zs)}
    nb = []  # neighbor mask of each member of Z, within Z
    for v in zs:
        m = 0
        for u in zs:
            if u != v and adj[H.index(v)] >> H.index(u) & 1:
                m |= 1 << zidx[u]
        nb.append(m)

    zero = b(frozenset())
    best = {0: (zero, -1)}
    for mask in range(1, 1 << k):
        cur = None
        arg = -1
        m = mask
        while m:
            low = m & -m
            m ^= low
            i = low.bit_length() - 1
            before = mask ^ low
            prev = best[before][0]
            P = frozenset(zs[j] for j in _bits(nb[i] & before))
            cand = prev + (b(P | {zs[i]}) - b(P))
            if cur is None or cand < cur:
                cur, arg = cand, i
        best[mask] = (cur, arg)
    order = []
    mask = (1 << k) - 1
    while mask:
        i = best[mask][1]
        order.append(zs[i])
        mask ^= 1 << i
    order.reverse()
    return best[(1 << k) - 1][0], tuple(order) + rest


def _bits(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def independent_set_from_ordering(b, H, W, pi):
    """Fractional independent set mu(v) = ordered marginal of v in W.

    Verifies the defining inequalities; a failure means the supplied
    oracle is not edge-dominated monotone submodular.
    """
    W = frozenset(W)
    weights = {}
    for v in W:
        m = marginal(b, H, pi, W, v)
        if not isinstance(m, (int, Fraction)):
            raise DomainError("oracle values must be rational here")
        if m < 0:
            raise CertificateError(f"negative marginal at {v}: oracle not monotone")
        if m:
            weights[v] = Fraction(m)
    mu = FractionalIndependentSet(weights)
    for e in H.edges:
        if mu.mass(e) > 1:
            raise CertificateError("marginals exceed 1 on an edge: bad oracle")
    if mu.mass(W) != b_pi(b, H, pi, W):
        raise CertificateError("mass mismatch against ordered marginals")
    return mu


@dataclass
class RoundingState:
    x: dict
    d: dict           # missing keys: unreachable from X
    kappa: dict       # None encodes infinite class (x = 0)
    alpha: dict
    ordering: tuple
    out_digraph: dict  # vertex -> set of successors in the orientation


@dataclass
class RoundingResult:
    separator: frozenset
    cost: Fraction        # ordered-marginal cost of the returned set
    b_value: Fraction
    threshold: Fraction
    state: RoundingState


def _vertex_load(H, s):
    load = {v: Fraction(0) for v in H.vertices}
    for e, wt in s.weights.items():
        for v in e:
            load[v] += wt
    return load


def round_fractional_separator(H, X, Y, s, b):
    """Round a fractional (X,Y)-separator into a vertex separator whose
    ordered-marginal cost is at most 31 times the fractional weight."""
    X, Y = frozenset(X), frozenset(Y)
    s.validate(H)
    w = s.weight()
    x = {v: min(Fraction(1), load) for v, load in _vertex_load(H, s).items()}

    # vertex-weighted shortest distances from X (weight of v included)
    d = {}
    heap = []
    for v in sorted(X):
        if x[v] < d.get(v, None) if v in d else True:
            d[v] = x[v]
            heapq.heappush(heap, (x[v], v))
    adj = H.adjacency
    names = H.vertices
    done = set()
    while heap:
        dist, v = heapq.heappop(heap)
        if v in done or d[v] != dist:
            continue
        done.add(v)
        for j in _bits(adj[H.index(v)]):
            u = names[j]
            cand = dist + x[u]
            if u not in d or cand < d[u]:
                d[u] = cand
                heapq.heappush(heap, (cand, u))

    if not any(v in d for v in Y):
        empty = frozenset()
        state = RoundingState(x, d, {}, {}, tuple(H.vertices), {})
        return RoundingResult(empty, Fraction(0), b(empty), Fraction(0), state)

    kappa, alpha = {}, {}
    for v in d:
        if x[v] == 0:
            kappa[v] = None
            alpha[v] = Fraction(0)
            continue
        k = 0
        while x[v] <= Fraction(1, 2 ** (k + 1)):
            k += 1
        kappa[v] = k
        period = 2 * Fraction(1, 2 ** k)
        alpha[v] = d[v] - (d[v] / period).__floor__() * period

    def sort_key(v):
        if v not in d:
            return (2, 0, 0, v)
        if kappa[v] is None:
            return (1, 0, 0, v)
        return (0, kappa[v], alpha[v], v)

    pi = tuple(sorted(H.vertices, key=sort_key))
    pos = {v: i for i, v in enumerate(pi)}

    # orientation of the primal graph along pi, as in-neighbor masks
    in_adj = [0] * H.n
    out_digraph = {v: set() for v in H.vertices}
    for v in H.vertices:
        for j in _bits(adj[H.index(v)]):
            u = names[j]
            if pos[u] < pos[v]:
                in_adj[H.index(v)] |= 1 << j
                out_digraph[u].add(v)

    cost_of = {}  # marginal of v wrt all preceding neighbors
    for v in H.vertices:
        cost_of[v] = marginal(b, H, pi, H.vertices, v)

    breakpoints = {Fraction(0), Fraction(1)}
    for v in d:
        for t in (d[v] - x[v], d[v]):
            if 0 <= t <= 1:
                breakpoints.add(t)
    bps = sorted(breakpoints)
    candidates = list(bps)
    for a, c in zip(bps, bps[1:]):
        candidates.append((a + c) / 2)
    candidates.sort()

    best = None
    for t in candidates:
        smask = 0
        for v in d:
            if d[v] - x[v] <= t <= d[v]:
                smask |= 1 << H.index(v)
        if smask == 0:
            continue
        closure = kernels.reachable(H.n, in_adj, smask)
        cost = sum((cost_of[names[i]] for i in _bits(closure)), Fraction(0))
        if best is None or cost < best[0]:
            best = (cost, t, closure)
    assert best is not None
    cost, t_star, closure = best
    sep = H.names_of(closure)

    if cost > ROUNDING_FACTOR * w:
        raise CertificateError(f"rounding exceeded {ROUNDING_FACTOR}x bound")
    _assert_separates(H, X, Y, sep)
    state = RoundingState(x, d, kappa, alpha, pi, out_digraph)
    return RoundingResult(sep, cost, b(sep), t_star, state)


def _assert_separates(H, X, Y, S):
    if (X & Y) - S:
        raise CertificateError("common endpoints survive the separator")
    smask = H.mask_of(S)
    xm = H.mask_of(X) & ~smask
    ym = H.mask_of(Y) & ~smask
    if xm and ym:
        reach = kernels.reachable(H.n, H.adjacency, xm, H.full_mask() & ~smask)
        if reach & ym:
            raise CertificateError("rounded set does not separate X from Y")


def flow_to_submodular(H, flow):
    """Oracle b(S) = total weight of the flow's paths meeting S."""
    return SetFunctionOracle.from_flow(H, flow)


@dataclass
class DecomposeResult:
    kind: str  # 'decomposition' | 'connected'
    w: Fraction
    lam: Fraction
    decomposition: TreeDecomposition = None
    bag_costs: dict = None
    W: frozenset = None
    mu: FractionalIndependentSet = None
    certificate: ConnectivityCertificate = None


class _Connected(Exception):
    def __init__(self, W, mu, cert):
        self.W, self.mu, self.cert = W, mu, cert


def decompose_or_highly_connected(H, b, w, lam=Fraction(1, 1000),
                                  bstar_cap=BSTAR_CAP,
                                  pair_cap=PAIR_SEARCH_CAP):
    """Either a decomposition whose bags have b* cost at most 3/2(w+1), or
    a (mu, lam)-connected W with mu(W) >= w; exactly one branch, verified.
    """
    w = Fraction(w)
    lam = Fraction(lam)
    if lam >= Fraction(1, ROUNDING_FACTOR):
        raise DomainError(f"lambda must be below 1/{ROUNDING_FACTOR}")
    bound = Fraction(3, 2) * (w + 1)

    def bstar(Hs, Z):
        return b_star(b, Hs, Z, cap=bstar_cap)

    def grow(Hs, W):
        order = sorted(set(Hs.vertices) - W)
        val = bstar(Hs, W)[0]
        for u in order:
            if val >= w:
                break
            W = W | {u}
            val = bstar(Hs, W)[0]
        if val > w + 1:
            raise CertificateError("growth overshot w+1: oracle inconsistent")
        return W, val

    def recurse(Hs, W0):
        total, _ = bstar(Hs, frozenset(Hs.vertices))
        if total <= bound:
            bag = frozenset(Hs.vertices)
            return TreeDecomposition({0: bag}, {0: None}), 0
        W, val = grow(Hs, frozenset(W0))
        while True:
            _, pi = bstar(Hs, W)
            mu = independent_set_from_ordering(b, Hs, W, pi)
            cert = is_mu_lambda_connected(Hs, mu, W, lam, size_cap=pair_cap)
            if cert.verdict:
                if mu.mass(W) < w:
                    raise CertificateError("connected branch with mass below w")
                raise _Connected(W, mu, cert)
            A, B, sep = cert.witness
            rr = round_fractional_separator(Hs, A, B, sep, b)
            S = rr.separator
            comps = kernels.connected_components(
                Hs.n, Hs.adjacency, Hs.full_mask() & ~Hs.mask_of(S))
            if not comps:
                raise CertificateError("separator swallowed the hypergraph")
            if len(comps) == 1:
                Z = (Hs.names_of(comps[0]) & W) | S
                if not Z > W:
                    raise CertificateError("single-component step failed to grow")
                W, val = grow(Hs, Z)
                continue
            children = []
            for c in comps:
                Cnames = Hs.names_of(c)
                Hi = induced_subhypergraph(Hs, Cnames | S)
                Wi = (Cnames & W) | S
                children.append(recurse(Hi, Wi))
            bags = {0: frozenset(W0) | S}
            parent = {0: None}
            nxt = 1
            for td, mark in children:
                remap = {}
                for t in td.nodes:
                    remap[t] = nxt
                    nxt += 1
                for t in td.nodes:
                    bags[remap[t]] = td.bags[t]
                    p = td.parent[t]
                    parent[remap[t]] = remap[p] if p is not None else 0
            return TreeDecomposition(bags, parent), 0

    try:
        td, _ = recurse(H, frozenset())
    except _Connected as c:
        return DecomposeResult("connected", w, lam, W=c.W, mu=c.mu,
                               certificate=c.cert)
    ok, violations = validate_decomposition(H, td)
    if not ok:
        raise CertificateError(f"invalid decomposition built: {violations}")
    costs = {}
    for t in td.nodes:
        val, _ = b_star(b, H, td.bags[t], cap=max(bstar_cap, len(td.bags[t])))
        if val > bound:
            raise CertificateError("bag exceeds the 3/2(w+1) budget")
        costs[t] = val
    return DecomposeResult("decomposition", w, lam, decomposition=td,
                           bag_costs=costs)
