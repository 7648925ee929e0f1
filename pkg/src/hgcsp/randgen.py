"""Seeded random fixture generators shared by the test suite and the
`check` CLI command.  Everything is exact-rational and deterministic for
a fixed seed.
"""

import random
from fractions import Fraction

from .csp import CspInstance
from .fractional import FractionalIndependentSet
from .hypergraph import Hypergraph
from .submodular import SetFunctionOracle


def rng_from_seed(seed):
    return random.Random(seed)


def random_hypergraph(rng, min_vertices=2, max_vertices=8, max_edge_size=4,
                      connected=False):
    n = rng.randint(min_vertices, max_vertices)
    names = [f"v{i}" for i in range(n)]
    m = rng.randint(max(2, n // 2), n + 3)
    edges = []
    for _ in range(m):
        size = rng.randint(1, min(max_edge_size, n))
        edges.append(rng.sample(names, size))
    covered = set()
    for e in edges:
        covered.update(e)
    edges.extend([v] for v in names if v not in covered)
    H = Hypergraph(edges)
    if connected:
        H = _connect(rng, H)
    return H


def _connect(rng, H):
    from . import kernels
    comps = kernels.connected_components(H.n, H.adjacency)
    if len(comps) <= 1:
        return H
    edges = [list(e) for e in H.edges]
    reps = [H.vertices[(c & -c).bit_length() - 1] for c in comps]
    for a, b in zip(reps, reps[1:]):
        edges.append([a, b])
    return Hypergraph(edges)


def random_vertex_subset(rng, H, allow_empty=False):
    k = rng.randint(0 if allow_empty else 1, H.n)
    return frozenset(rng.sample(list(H.vertices), k))


def random_fractional_independent_set(rng, H, denominator=8):
    weights = {v: Fraction(rng.randint(0, denominator), denominator)
               for v in H.vertices}
    worst = max((sum((weights[v] for v in e), Fraction(0)) for e in H.edges),
                default=Fraction(0))
    if worst > 1:
        weights = {v: w / worst for v, w in weights.items()}
    return FractionalIndependentSet({v: w for v, w in weights.items() if w > 0})


def random_coverage_oracle(rng, H, denominator=8):
    """Random edge-dominated monotone submodular oracle (weighted coverage)."""
    count = rng.randint(1, 2 * H.n)
    sets = []
    for _ in range(count):
        size = rng.randint(1, min(3, H.n))
        sets.append((rng.sample(list(H.vertices), size),
                     Fraction(rng.randint(1, denominator), denominator)))
    worst = Fraction(0)
    for e in H.edges:
        val = sum((w for T, w in sets if set(T) & e), Fraction(0))
        worst = max(worst, val)
    if worst > 1:
        sets = [(T, w / worst) for T, w in sets]
    return SetFunctionOracle.coverage(H, sets)


def random_submodular_oracle(rng, H):
    """Random edge-dominated monotone submodular oracle: weighted coverage
    or modular (modular is the degenerate singleton-coverage case).

    Note the fractional cover number itself is *not* submodular in
    general, so it never appears here.
    """
    if rng.randint(0, 2) == 0:
        mu = random_fractional_independent_set(rng, H)
        return SetFunctionOracle.modular(H, dict(mu.weights))
    return random_coverage_oracle(rng, H)


def random_csp(rng, max_vars=5, max_dom=4, max_constraints=5, tightness=0.6,
               hypergraph=None):
    if hypergraph is not None:
        variables = list(hypergraph.vertices)
        scopes = [tuple(sorted(e)) for e in hypergraph.edges]
    else:
        nv = rng.randint(2, max_vars)
        variables = [f"x{i}" for i in range(nv)]
        scopes = []
        for _ in range(rng.randint(1, max_constraints)):
            size = rng.randint(1, min(3, nv))
            scopes.append(tuple(sorted(rng.sample(variables, size))))
    nd = rng.randint(2, max_dom)
    domain = [f"d{i}" for i in range(nd)]
    constraints = []
    for scope in scopes:
        tuples = set()
        for combo in _all_tuples(domain, len(scope)):
            if rng.random() < tightness:
                tuples.add(combo)
        if not tuples and rng.random() < 0.8:
            tuples.add(tuple(rng.choice(domain) for _ in scope))
        constraints.append((scope, tuples))
    return CspInstance(variables, domain, constraints)


def _all_tuples(domain, k):
    if k == 0:
        yield ()
        return
    for rest in _all_tuples(domain, k - 1):
        for d in domain:
            yield rest + (d,)


def random_3sat(rng, max_vars=8, max_clauses=8, allow_short=True):
    """Clause list over variables 1..n with distinct variables per clause."""
    n = rng.randint(1, max_vars)
    m = rng.randint(1, max_clauses)
    clauses = []
    for _ in range(m):
        width = rng.randint(1, 3) if allow_short else 3
        width = min(width, n)
        vs = rng.sample(range(1, n + 1), width)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return n, clauses
