"""Fractional covers, separators, flows and connectivity.

All optimisation here goes through the exact LP solver, and every LP over
paths is restricted to minimal paths: shortcutting a path keeps its
endpoints and only shrinks the set of edges it meets, so separator and
flow optima are unchanged while the variable count stays finite.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linprog
from .errors import DomainError, ResourceLimitError
from .hypergraph import Path, enumerate_minimal_paths

DEFAULT_W_CAP = 10


@dataclass(frozen=True)
class FractionalIndependentSet:
    """Vertex weights with total at most 1 on every edge."""

    weights: dict

    def __call__(self, v):
        return self.weights.get(v, Fraction(0))

    def mass(self, X):
        return sum((self.weights.get(v, Fraction(0)) for v in X), Fraction(0))

    def validate(self, H):
        for v, w in self.weights.items():
            if w < 0:
                raise DomainError(f"negative weight on {v}")
            H.index(v)
        for e in H.edges:
            if self.mass(e) > 1:
                raise DomainError(f"edge {sorted(e)} carries mass > 1")
        return True

    @classmethod
    def uniform(cls, H):
        """mu(v) = 1 / (largest edge size); always feasible."""
        if not H.edges:
            return cls({})
        r = max(len(e) for e in H.edges)
        return cls({v: Fraction(1, r) for v in H.names_of(H.covered_mask())})


@dataclass(frozen=True)
class FractionalSeparator:
    """Edge weights covering every minimal X-Y path with total >= 1."""

    weights: dict  # frozenset edge -> Fraction
    X: frozenset
    Y: frozenset

    def weight(self):
        return sum(self.weights.values(), Fraction(0))

    def covers(self, H, path):
        tot = Fraction(0)
        pset = path.vertex_set() if isinstance(path, Path) else frozenset(path)
        for e, w in self.weights.items():
            if w and e & pset:
                tot += w
        return tot >= 1

    def validate(self, H):
        for e, w in self.weights.items():
            if w < 0:
                raise DomainError("negative separator weight")
            if frozenset(e) not in set(H.edges):
                raise DomainError("separator weight on a non-edge")
        for path in enumerate_minimal_paths(H, self.X, self.Y):
            if not self.covers(H, path):
                raise DomainError(f"uncovered path {path.vertices}")
        return True


@dataclass(frozen=True)
class Flow:
    """Weighted path family with total weight <= 1 across every edge."""

    paths: tuple  # ((Path, Fraction), ...), positive weights only

    def value(self):
        return sum((w for _, w in self.paths), Fraction(0))

    def items(self):
        return self.paths

    def edge_load(self, H):
        load = {e: Fraction(0) for e in H.edges}
        for p, w in self.paths:
            pset = p.vertex_set()
            for e in H.edges:
                if e & pset:
                    load[e] += w
        return load

    def validate(self, H, X=None, Y=None):
        for p, w in self.paths:
            if w <= 0:
                raise DomainError("non-positive path weight in flow support")
            if X is not None and p.first not in X:
                raise DomainError("path does not start in X")
            if Y is not None and p.second not in Y:
                raise DomainError("path does not end in Y")
        for e, load in self.edge_load(H).items():
            if load > 1:
                raise DomainError(f"edge {sorted(e)} overloaded: {load}")
        return True


@dataclass(frozen=True)
class ConnectivityCertificate:
    W: frozenset
    mu: FractionalIndependentSet
    lam: Fraction
    verdict: bool
    witness: tuple = None  # (A, B, FractionalSeparator) when verdict is False


def _check_coverable(H, X):
    covered = H.covered_mask()
    for v in X:
        if not covered >> H.index(v) & 1:
            raise DomainError(f"vertex {v} lies in no edge")


def fractional_edge_cover_number(H, X):
    """Minimum total weight of edge weights covering every vertex of X.

    Returns (value, gamma) with gamma an optimal edge weighting.
    """
    X = frozenset(X)
    _check_coverable(H, X)
    if not X:
        return Fraction(0), {e: Fraction(0) for e in H.edges}
    ne = len(H.edges)
    rows = []
    for v in X:
        iv = H.index(v)
        rows.append(([Fraction(1 if em >> iv & 1 else 0) for em in H.edge_masks],
                     linprog.GE, Fraction(1)))
    lp = linprog.LinearProgram(False, [Fraction(1)] * ne, rows, [True] * ne)
    sol = linprog.solve(lp)
    assert sol.status == linprog.OPTIMAL
    gamma = {e: sol.primal[i] for i, e in enumerate(H.edges)}
    return sol.objective, gamma


def edge_cover_number(H, X):
    """Exact minimum number of edges covering X (branch and bound)."""
    X = frozenset(X)
    _check_coverable(H, X)
    xm = H.mask_of(X)
    if not xm:
        return 0
    edges = sorted(H.edge_masks, key=lambda m: -bin(m & xm).count("1"))
    best = len(edges) + 1
    memo = {}

    def search(uncovered, used):
        nonlocal best
        if not uncovered:
            best = min(best, used)
            return
        if used + 1 >= best:
            return
        prev = memo.get(uncovered)
        if prev is not None and prev <= used:
            return
        memo[uncovered] = used
        low = uncovered & -uncovered
        for em in edges:
            if em & low:
                search(uncovered & ~em, used + 1)

    search(xm, 0)
    return best


def _path_lp_columns(H, paths):
    """Per-edge incidence rows over a list of Path columns."""
    inc = []
    for em in H.edge_masks:
        inc.append([Fraction(1 if em & H.mask_of(p.vertices) else 0) for p in paths])
    return inc


def min_fractional_separator(H, X, Y):
    """Minimum-weight edge assignment covering every minimal X-Y path."""
    X, Y = frozenset(X), frozenset(Y)
    paths = enumerate_minimal_paths(H, X, Y)
    zero = {e: Fraction(0) for e in H.edges}
    if not paths:
        return Fraction(0), FractionalSeparator(zero, X, Y)
    ne = len(H.edges)
    rows = []
    for p in paths:
        pm = H.mask_of(p.vertices)
        rows.append(([Fraction(1 if em & pm else 0) for em in H.edge_masks],
                     linprog.GE, Fraction(1)))
    lp = linprog.LinearProgram(False, [Fraction(1)] * ne, rows, [True] * ne)
    sol = linprog.solve(lp)
    assert sol.status == linprog.OPTIMAL
    weights = {e: sol.primal[i] for i, e in enumerate(H.edges)}
    return sol.objective, FractionalSeparator(weights, X, Y)


def max_flow(H, X, Y):
    """Maximum-value (X,Y)-flow over minimal paths; equals the minimum
    fractional separator weight exactly."""
    X, Y = frozenset(X), frozenset(Y)
    paths = enumerate_minimal_paths(H, X, Y)
    if not paths:
        return Fraction(0), Flow(())
    inc = _path_lp_columns(H, paths)
    rows = [(r, linprog.LE, Fraction(1)) for r in inc]
    lp = linprog.LinearProgram(True, [Fraction(1)] * len(paths), rows,
                               [True] * len(paths))
    sol = linprog.solve(lp)
    assert sol.status == linprog.OPTIMAL
    support = tuple((p, w) for p, w in zip(paths, sol.primal) if w > 0)
    return sol.objective, Flow(support)


@dataclass(frozen=True)
class MulticommodityFlowResult:
    value: Fraction
    flows: tuple  # one Flow per pair
    dual_edges: dict
    dual_vertices: dict


def max_mu_demand_multicommodity_flow(H, pairs, mu):
    """Maximum total multicommodity flow between the pairs (A_i, B_i) where
    per-vertex first/second endpoint loads are capped by mu.

    Requires (A_1,...,A_r,B_1,...,B_r) to be a partition of their union.
    """
    pairs = [(frozenset(a), frozenset(b)) for a, b in pairs]
    mu.validate(H)
    groups = [g for ab in pairs for g in ab]
    union = set()
    for g in groups:
        if not g:
            raise DomainError("empty endpoint group")
        if union & g:
            raise DomainError("endpoint groups must form a partition")
        union |= g
    columns = []  # (pair index, u, v, Path)
    for i, (A, B) in enumerate(pairs):
        for u in sorted(A):
            for v in sorted(B):
                for p in enumerate_minimal_paths(H, {u}, {v}):
                    columns.append((i, u, v, p))
    nv = len(columns)
    rows = []
    for em in H.edge_masks:
        rows.append(([Fraction(1 if em & H.mask_of(c[3].vertices) else 0)
                      for c in columns], linprog.LE, Fraction(1)))
    endpoint_rows = []  # (kind, i, vertex)
    for i, (A, B) in enumerate(pairs):
        for u in sorted(A):
            rows.append(([Fraction(1 if (c[0] == i and c[1] == u) else 0)
                          for c in columns], linprog.LE, mu(u)))
            endpoint_rows.append(("first", i, u))
        for v in sorted(B):
            rows.append(([Fraction(1 if (c[0] == i and c[2] == v) else 0)
                          for c in columns], linprog.LE, mu(v)))
            endpoint_rows.append(("second", i, v))
    if nv == 0:
        return MulticommodityFlowResult(
            Fraction(0), tuple(Flow(()) for _ in pairs),
            {e: Fraction(0) for e in H.edges}, {v: Fraction(0) for v in sorted(union)})
    lp = linprog.LinearProgram(True, [Fraction(1)] * nv, rows, [True] * nv)
    sol = linprog.solve(lp)
    assert sol.status == linprog.OPTIMAL
    per_pair = [[] for _ in pairs]
    for c, w in zip(columns, sol.primal):
        if w > 0:
            per_pair[c[0]].append((c[3], w))
    ne = len(H.edges)
    dual_edges = {e: sol.dual[i] for i, e in enumerate(H.edges)}
    dual_vertices = {}
    for (kind, i, v), y in zip(endpoint_rows, sol.dual[ne:]):
        dual_vertices[v] = y
    return MulticommodityFlowResult(
        sol.objective, tuple(Flow(tuple(fp)) for fp in per_pair),
        dual_edges, dual_vertices)


@dataclass(frozen=True)
class ConcurrentFlowResult:
    epsilon: Fraction
    flows: dict  # (i, j) -> Flow, i < j
    dual_edges: dict
    dual_ell: dict


def max_uniform_concurrent_flow(H, parts):
    """Largest epsilon with compatible (X_i, X_j)-flows of value >= epsilon
    for every pair of parts."""
    parts = [frozenset(p) for p in parts]
    if len(parts) < 2:
        raise DomainError("need at least two parts")
    seen = set()
    for p in parts:
        if not p:
            raise DomainError("empty part")
        if seen & p:
            raise DomainError("parts must be disjoint")
        seen |= p
    k = len(parts)
    columns = []  # ((i, j), Path)
    for i, j in itertools.combinations(range(k), 2):
        for p in enumerate_minimal_paths(H, parts[i], parts[j]):
            columns.append(((i, j), p))
    nv = len(columns)  # + 1 for epsilon below
    rows = []
    for em in H.edge_masks:
        rows.append(([Fraction(1 if em & H.mask_of(c[1].vertices) else 0)
                      for c in columns] + [Fraction(0)], linprog.LE, Fraction(1)))
    pair_rows = []
    for i, j in itertools.combinations(range(k), 2):
        rows.append(([Fraction(1 if c[0] == (i, j) else 0) for c in columns]
                     + [Fraction(-1)], linprog.GE, Fraction(0)))
        pair_rows.append((i, j))
    objective = [Fraction(0)] * nv + [Fraction(1)]
    lp = linprog.LinearProgram(True, objective, rows, [True] * (nv + 1))
    sol = linprog.solve(lp)
    assert sol.status == linprog.OPTIMAL
    flows = {}
    for (ij, p), w in zip(columns, sol.primal[:nv]):
        if w > 0:
            flows.setdefault(ij, []).append((p, w))
    ne = len(H.edges)
    dual_edges = {e: sol.dual[i] for i, e in enumerate(H.edges)}
    dual_ell = {ij: -sol.dual[ne + t] for t, ij in enumerate(pair_rows)}
    return ConcurrentFlowResult(
        sol.objective,
        {ij: Flow(tuple(fp)) for ij, fp in sorted(flows.items())},
        dual_edges, dual_ell)


def disjoint_subset_pairs(W):
    """Unordered pairs of disjoint non-empty subsets of W, in nondecreasing
    |A|+|B| order, then lexicographic; A holds the smallest member."""
    W = sorted(W)
    out = []
    for assignment in itertools.product((0, 1, 2), repeat=len(W)):
        A = frozenset(v for v, a in zip(W, assignment) if a == 1)
        B = frozenset(v for v, a in zip(W, assignment) if a == 2)
        if not A or not B:
            continue
        if min(A) > min(B):
            continue
        out.append((A, B))
    out.sort(key=lambda ab: (len(ab[0]) + len(ab[1]),
                             sorted(ab[0]), sorted(ab[1])))
    return out


def is_mu_lambda_connected(H, mu, W, lam, size_cap=DEFAULT_W_CAP):
    """Exhaustive check that every disjoint A,B within W needs a fractional
    separator of weight >= lam * min(mu(A), mu(B))."""
    W = frozenset(W)
    mu.validate(H)
    covered = H.covered_mask()
    for v in W:
        if not covered >> H.index(v) & 1:
            raise DomainError(f"isolated vertex {v} not allowed in W")
    if len(W) > size_cap:
        raise ResourceLimitError(f"|W|={len(W)} exceeds cap {size_cap}")
    lam = Fraction(lam)
    for A, B in disjoint_subset_pairs(W):
        demand = lam * min(mu.mass(A), mu.mass(B))
        if demand <= 0:
            continue
        weight, sep = min_fractional_separator(H, A, B)
        if weight < demand:
            return ConnectivityCertificate(W, mu, lam, False, (A, B, sep))
    return ConnectivityCertificate(W, mu, lam, True)


def _best_mu_for(H, W):
    """Fractional independent set maximising mass on W (exact LP)."""
    W = sorted(W)
    idx = {v: i for i, v in enumerate(W)}
    rows = []
    for em in H.edge_masks:
        coeff = [Fraction(0)] * len(W)
        hit = False
        for v in W:
            if em >> H.index(v) & 1:
                coeff[idx[v]] = Fraction(1)
                hit = True
        if hit:
            rows.append((coeff, linprog.LE, Fraction(1)))
    rows += [([Fraction(1 if i == j else 0) for j in range(len(W))],
              linprog.LE, Fraction(1)) for i in range(len(W))]
    lp = linprog.LinearProgram(True, [Fraction(1)] * len(W), rows, [True] * len(W))
    sol = linprog.solve(lp)
    assert sol.status == linprog.OPTIMAL
    return FractionalIndependentSet({v: sol.primal[i] for v, i in idx.items()
                                     if sol.primal[i] > 0})


def con_lambda_lower_bound(H, lam, size_cap=4, budget=2000):
    """Best certified mu(W) over a bounded search; a lower bound on the
    maximum over all (mu, lambda)-connected sets."""
    lam = Fraction(lam)
    covered = sorted(H.names_of(H.covered_mask()))
    best_value = Fraction(0)
    best_cert = None
    examined = 0
    for size in range(1, min(size_cap, len(covered)) + 1):
        for W in itertools.combinations(covered, size):
            if examined >= budget:
                return best_value, best_cert
            examined += 1
            candidates = [_best_mu_for(H, W), FractionalIndependentSet.uniform(H)]
            for mu in candidates:
                mass = mu.mass(W)
                if mass <= best_value:
                    continue
                cert = is_mu_lambda_connected(H, mu, W, lam, size_cap=size_cap)
                if cert.verdict:
                    best_value, best_cert = mass, cert
                    break
    return best_value, best_cert
