"""3SAT-to-CSP reduction, graph-into-hypergraph embeddings with their depth
calculus, embedding-based CSP simulation, the concurrent-flow embedding
pipeline, and decomposition transfer along an embedding."""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .csp import CspInstance
from .decomposition import TreeDecomposition, validate_decomposition
from .errors import DomainError, ResourceLimitError
from .fractional import (FractionalIndependentSet, max_uniform_concurrent_flow)
from .hypergraph import Graph, Hypergraph, primal_graph, touch

EMBED_NODE_BUDGET = 200_000


@dataclass(frozen=True)
class CnfFormula:
    num_variables: int
    clauses: tuple  # tuples of signed 1-based literals

    def __post_init__(self):
        for clause in self.clauses:
            if len(clause) > 3:
                raise DomainError("clauses may hold at most three literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_variables:
                    raise DomainError(f"literal {lit} out of range")

    @classmethod
    def from_dimacs(cls, text):
        n = m = None
        clauses = []
        current = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("c"):
                continue
            if line.startswith("p"):
                toks = line.split()
                if len(toks) != 4 or toks[1] != "cnf":
                    raise DomainError(f"bad problem line: {raw!r}")
                n, m = int(toks[2]), int(toks[3])
                continue
            for tok in line.split():
                lit = int(tok)
                if lit == 0:
                    clauses.append(tuple(current))
                    current = []
                else:
                    current.append(lit)
        if current:
            raise DomainError("clause not terminated by 0")
        if n is None:
            raise DomainError("missing problem line")
        if m is not None and m != len(clauses):
            raise DomainError(f"expected {m} clauses, found {len(clauses)}")
        return cls(n, tuple(clauses))

    def to_dimacs(self):
        lines = [f"p cnf {self.num_variables} {len(self.clauses)}"]
        for clause in self.clauses:
            lines.append(" ".join(str(l) for l in clause) + " 0")
        return "\n".join(lines) + "\n"


def cnf_brute_force(phi):
    """Truth-table satisfiability for small formulas."""
    n = phi.num_variables
    for bits in range(1 << n):
        ok = True
        for clause in phi.clauses:
            if not any((bits >> (abs(l) - 1) & 1) == (l > 0) for l in clause):
                ok = False
                break
        if ok:
            return True
    return False


def sat_to_csp(phi):
    """Equisatisfiable CSP over domain {1,2,3}: one variable per formula
    variable, one per clause; a binary constraint per literal saying
    "either the variable takes the literal's polarity or the clause is
    satisfied elsewhere".  Clauses shorter than three literals restrict
    their clause variable to the positions present; an empty clause
    yields an unsatisfiable restriction."""
    n, m = phi.num_variables, len(phi.clauses)
    variables = [f"x{i}" for i in range(1, n + 1)] + \
        [f"y{j}" for j in range(1, m + 1)]
    domain = ["1", "2", "3"]
    constraints = []
    for j, clause in enumerate(phi.clauses, start=1):
        yj = f"y{j}"
        for pos, lit in enumerate(clause, start=1):
            xi = f"x{abs(lit)}"
            want = "1" if lit > 0 else "2"
            rel = {(a, l) for a in domain for l in domain
                   if a == want or l != str(pos)}
            constraints.append(((xi, yj), rel))
        if len(clause) < 3:
            allowed = {(str(p),) for p in range(1, len(clause) + 1)}
            constraints.append(((yj,), allowed))
    return CspInstance(variables, domain, constraints)


@dataclass
class Embedding:
    """Map from graph vertices to non-empty vertex sets of a hypergraph."""

    mapping: dict  # vertex of G -> frozenset of V(H)

    def image(self, v):
        return self.mapping[v]

    def to_text(self):
        lines = []
        for v in sorted(self.mapping):
            img = " ".join(sorted(self.mapping[v]))
            lines.append(f"vertex: {v} -> {{{img}}}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        mapping = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if not line.startswith("vertex:") or "->" not in line:
                raise DomainError(f"bad embedding line: {raw!r}")
            head, img = line[len("vertex:"):].split("->")
            img = img.strip()
            if not (img.startswith("{") and img.endswith("}")):
                raise DomainError(f"bad image syntax: {raw!r}")
            mapping[head.strip()] = frozenset(img[1:-1].split())
        return cls(mapping)


@dataclass
class DepthReport:
    vertex_depth: int
    edge_depth: int
    weak_edge_depth: int


def embedding_depths(G, H, psi):
    depth = {v: 0 for v in H.vertices}
    for u in G.vertices:
        for v in psi.mapping.get(u, ()):
            depth[v] += 1
    vertex_depth = max(depth.values(), default=0)
    edge_depth = 0
    weak = 0
    for e in H.edges:
        edge_depth = max(edge_depth, sum(depth[v] for v in e))
        weak = max(weak, sum(1 for u in G.vertices
                             if psi.mapping.get(u, frozenset()) & e))
    return DepthReport(vertex_depth, edge_depth, weak)


def validate_embedding(G, H, psi):
    """Images connected, adjacency preserved as touching; returns
    (ok, DepthReport, violations)."""
    violations = []
    vset = set(H.vertices)
    for u in G.vertices:
        img = psi.mapping.get(u)
        if not img:
            violations.append(f"vertex {u} has no image")
            continue
        if not img <= vset:
            violations.append(f"image of {u} leaves the hypergraph")
            continue
        mask = H.mask_of(img)
        low = mask & -mask
        if kernels.reachable(H.n, H.adjacency, low, mask) != mask:
            violations.append(f"image of {u} is not connected")
    for e in G.edges:
        u, v = sorted(e)
        iu, iv = psi.mapping.get(u), psi.mapping.get(v)
        if iu and iv and not touch(H, iu, iv):
            violations.append(f"images of adjacent {u},{v} do not touch")
    return not violations, embedding_depths(G, H, psi), violations


def simulate_csp_via_embedding(I1, H, psi, depth_kind="edge"):
    """Compile a binary CSP along an embedding of its primal graph into H.

    Every edge of H gets one constraint over per-vertex codes of local
    assignments; the relation sizes stay within |D1|^q for q the chosen
    depth notion ("edge" or "weak").
    """
    if any(len(s) > 2 for s, _ in I1.constraints):
        raise DomainError("only binary instances can be simulated")
    G = primal_graph(I1.hypergraph())
    ok, report, violations = validate_embedding(G, H, psi)
    if not ok:
        raise DomainError("invalid embedding: " + "; ".join(violations))
    q = report.edge_depth if depth_kind == "edge" else report.weak_edge_depth

    D1 = I1.domain
    users = {v: tuple(sorted(u for u in G.vertices
                             if v in psi.mapping.get(u, frozenset())))
             for v in H.vertices}

    def assignments(over):
        return itertools.product(D1, repeat=len(over))

    code_of = {}
    for v in H.vertices:
        code_of[v] = {assign: str(i + 1)
                      for i, assign in enumerate(assignments(users[v]))}
    max_code = max((len(c) for c in code_of.values()), default=1)
    domain2 = [str(i + 1) for i in range(max(max_code, 1))]

    constraints = []
    for e in H.edges:
        scope = tuple(sorted(e))
        covered = sorted({u for v in scope for u in users[v]})
        relevant = [(s, r) for s, r in I1.constraints if set(s) <= set(covered)]
        rel = set()
        for assign in assignments(covered):
            a = dict(zip(covered, assign))
            if all(tuple(a[x] for x in s) in r for s, r in relevant):
                rel.add(tuple(code_of[v][tuple(a[u] for u in users[v])]
                              for v in scope))
        if len(rel) > len(D1) ** q:
            raise DomainError("relation exceeded its depth bound (bug)")
        constraints.append((scope, rel))
    return CspInstance(H.vertices, domain2, constraints)


def line_graph_of_complete(k):
    """Line graph of the complete graph on k vertices: one vertex per
    unordered pair, adjacency by shared index."""
    if k < 2:
        raise DomainError("need k >= 2")
    names = {}
    for i, j in itertools.combinations(range(1, k + 1), 2):
        names[(i, j)] = f"{i}-{j}"
    edges = []
    for (p1, n1), (p2, n2) in itertools.combinations(sorted(names.items()), 2):
        if set(p1) & set(p2):
            edges.append((n1, n2))
    return Graph(names.values(), edges)


def _pair_of(name):
    i, j = name.split("-")
    return int(i), int(j)


def embed_into_line_graph(G, k, node_budget=EMBED_NODE_BUDGET):
    """Embedding of G into the k-th complete line graph, by exhaustive
    search over small connected images with a greedy star fallback."""
    L = line_graph_of_complete(k)
    budget_depth = max(1, math.ceil(130 * len(G.edges) / k ** 2))
    exhaustive = _search_line_embedding(G, L, budget_depth, node_budget)
    if exhaustive is not None:
        return exhaustive
    # fallback: map each vertex to a full star; any two stars touch
    stars = {}
    for idx in range(1, k + 1):
        stars[idx] = frozenset(n for p, n in
                               ((_pair_of(n), n) for n in L.vertices)
                               if idx in p)
    mapping = {}
    order = sorted(G.vertices)
    for pos, u in enumerate(order):
        mapping[u] = stars[(pos % k) + 1]
    psi = Embedding(mapping)
    report = embedding_depths(G, L.as_hypergraph(), psi)
    if report.vertex_depth > budget_depth:
        raise ResourceLimitError(
            f"no embedding within vertex depth {budget_depth}; raise k")
    return psi


def _search_line_embedding(G, L, depth_cap, node_budget):
    Lh = L.as_hypergraph()
    n = Lh.n
    adj = Lh.adjacency
    singles = [1 << i for i in range(n)]
    pairs = [(1 << i) | (1 << j) for i in range(n) for j in range(i + 1, n)
             if adj[i] >> j & 1]
    candidates = singles + pairs
    reach = [m | _mask_neighborhood(adj, m) for m in candidates]
    order = sorted(G.vertices, key=lambda v: (-bin(G.adjacency[G.index(v)]).count("1"), v))
    gadj = G.adjacency
    budget = [node_budget]

    for target_depth in (1, 2):
        load = [0] * n
        chosen = {}

        def place(i):
            if budget[0] <= 0:
                return False
            budget[0] -= 1
            if i == len(order):
                return True
            u = order[i]
            for ci, cand in enumerate(candidates):
                ok = True
                m = cand
                while m:
                    low = m & -m
                    m ^= low
                    if load[low.bit_length() - 1] + 1 > target_depth:
                        ok = False
                        break
                if not ok:
                    continue
                for w in chosen:
                    if gadj[G.index(u)] >> G.index(w) & 1:
                        if not (reach[ci] & chosen[w]):
                            ok = False
                            break
                if not ok:
                    continue
                chosen[u] = cand
                m = cand
                while m:
                    low = m & -m
                    m ^= low
                    load[low.bit_length() - 1] += 1
                if place(i + 1):
                    return True
                del chosen[u]
                m = cand
                while m:
                    low = m & -m
                    m ^= low
                    load[low.bit_length() - 1] -= 1
            return False

        if target_depth <= depth_cap and place(0):
            return Embedding({u: Lh.names_of(m) for u, m in chosen.items()})
    return None


def _mask_neighborhood(adj, mask):
    nb = 0
    m = mask
    while m:
        low = m & -m
        m ^= low
        nb |= adj[low.bit_length() - 1]
    return nb & ~mask


@dataclass
class EmbeddingConstruction:
    embedding: Embedding
    report: DepthReport
    cliques: tuple
    epsilon: Fraction
    line_vertex_depth: int


def harvest_cliques(H, mu=None):
    """Greedy disjoint cliques of mu-mass at least 1/2, carved from edges."""
    mu = mu or FractionalIndependentSet.uniform(H)
    used = set()
    cliques = []
    while True:
        best = None
        for e in H.edges:
            K = frozenset(e) - used
            if K and mu.mass(K) >= Fraction(1, 2):
                key = (mu.mass(K), sorted(K))
                if best is None or key > best[0]:
                    best = (key, K)
        if best is None:
            break
        cliques.append(best[1])
        used |= best[1]
    return cliques, mu


def construct_embedding(G, H, mu=None, node_budget=EMBED_NODE_BUDGET):
    """Embed G into a connected H: harvest cliques, route a uniform
    concurrent flow between them, embed G into the matching complete line
    graph, then replace each line-graph vertex by flow paths."""
    comps = kernels.connected_components(H.n, H.adjacency)
    if len(comps) != 1:
        raise DomainError("host hypergraph must be connected")
    cliques, mu0 = harvest_cliques(H, mu)
    if len(cliques) < 2:
        big = max(H.edges, key=len)
        if len(big) < 2:
            raise DomainError("clique stage failed: no edge with two vertices")
        u, w = sorted(big)[:2]
        cliques = [frozenset({u}), frozenset({w})]
        mu0 = FractionalIndependentSet({u: Fraction(1, 2), w: Fraction(1, 2)})
    k = len(cliques)

    flow_res = max_uniform_concurrent_flow(H, cliques)
    eps = flow_res.epsilon
    if eps <= 0:
        raise DomainError("flow stage failed: no concurrent flow")

    psi_line = embed_into_line_graph(G, k, node_budget=node_budget)
    L = line_graph_of_complete(k)
    q = embedding_depths(G, L.as_hypergraph(), psi_line).vertex_depth

    remaining = {}
    path_sets = {}
    for (i, j), flow in flow_res.flows.items():
        name = f"{i + 1}-{j + 1}"
        paths = []
        for p, wgt in flow.items():
            cap = math.ceil(Fraction(q, eps) * wgt)
            paths.append([p, cap])
        remaining[name] = paths
        path_sets[name] = paths
    mapping = {}
    for u in sorted(G.vertices):
        img = set()
        for lv in sorted(psi_line.mapping[u]):
            paths = remaining.get(lv)
            if not paths:
                raise DomainError(f"routing stage failed: no flow for {lv}")
            slot = next((ps for ps in paths if ps[1] > 0), None)
            if slot is None:
                raise DomainError(f"routing stage failed: capacity at {lv}")
            slot[1] -= 1
            img |= set(slot[0].vertices)
        mapping[u] = frozenset(img)
    psi = Embedding(mapping)
    ok, report, violations = validate_embedding(G, H, psi)
    if not ok:
        raise DomainError("assembled embedding invalid: " + "; ".join(violations))
    best = EmbeddingConstruction(psi, report, tuple(cliques), eps, q)
    if k >= len(G.vertices):
        # tiny graphs: one clique per vertex beats path routing when valid
        direct = Embedding({u: cliques[i]
                            for i, u in enumerate(sorted(G.vertices))})
        ok, report, _ = validate_embedding(G, H, direct)
        if ok and report.edge_depth < best.report.edge_depth:
            best = EmbeddingConstruction(direct, report, tuple(cliques), eps, 1)
    return best


def transfer_decomposition(G, H, psi, T):
    """Pull a decomposition of H back along an embedding: each bag keeps
    the G-vertices whose images it meets."""
    ok, report, violations = validate_embedding(G, H, psi)
    if not ok:
        raise DomainError("invalid embedding: " + "; ".join(violations))
    bags = {}
    for t in T.nodes:
        bag = T.bags[t]
        bags[t] = frozenset(u for u in G.vertices
                            if psi.mapping[u] & bag)
    out = TreeDecomposition(bags, dict(T.parent))
    ok, violations = validate_decomposition(G.as_hypergraph(), out)
    if not ok:
        raise DomainError("transferred decomposition invalid: "
                          + "; ".join(violations))
    return out
