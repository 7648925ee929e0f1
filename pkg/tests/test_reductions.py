import itertools
from fractions import Fraction as F

import pytest

from hgcsp.csp import CspInstance, brute_force_solve
from hgcsp.decomposition import TreeDecomposition, min_f_width
from hgcsp.errors import DomainError
from hgcsp.fractional import FractionalIndependentSet
from hgcsp.hypergraph import Graph, Hypergraph, primal_graph
from hgcsp.randgen import random_3sat, random_csp, random_hypergraph, rng_from_seed
from hgcsp.reductions import (CnfFormula, Embedding, construct_embedding,
                              embed_into_line_graph, embedding_depths,
                              line_graph_of_complete, sat_to_csp,
                              simulate_csp_via_embedding,
                              transfer_decomposition, validate_embedding)


def cnf_truth_table_sat(phi):
    """Independent oracle: evaluate the formula on all assignments."""
    for bits in itertools.product((False, True), repeat=phi.num_variables):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in clause)
               for clause in phi.clauses):
            return True
    return False


def identity_embedding(H):
    return Embedding({v: frozenset({v}) for v in H.vertices})


def test_dimacs_round_trip():
    text = "c comment\np cnf 3 2\n1 -2 0\n2 3 0\n"
    phi = CnfFormula.from_dimacs(text)
    assert phi.num_variables == 3 and phi.clauses == ((1, -2), (2, 3))
    assert CnfFormula.from_dimacs(phi.to_dimacs()) == phi


def test_sat_to_csp_shape_and_fixtures():
    phi = CnfFormula(3, ((1, 2, 3),))
    I = sat_to_csp(phi)
    assert len(I.variables) == 4
    assert len(I.constraints) == 3
    assert brute_force_solve(I) is not None
    contradiction = sat_to_csp(CnfFormula(1, ((1,), (-1,))))
    assert brute_force_solve(contradiction) is None
    free = sat_to_csp(CnfFormula(2, ()))
    assert len(free.variables) == 2 and brute_force_solve(free) is not None
    empty_clause = sat_to_csp(CnfFormula(1, ((),)))
    assert brute_force_solve(empty_clause) is None


def test_sat_to_csp_equisatisfiable_random():
    rng = rng_from_seed(81)
    for _ in range(60):
        n, clauses = random_3sat(rng, max_vars=5, max_clauses=6)
        phi = CnfFormula(n, tuple(clauses))
        I = sat_to_csp(phi)
        assert (brute_force_solve(I) is not None) == cnf_truth_table_sat(phi)


def test_validate_embedding_and_depths():
    H = Hypergraph([["a", "b", "c"], ["c", "d"]])
    G = primal_graph(H)
    psi = identity_embedding(H)
    ok, report, violations = validate_embedding(G, H, psi)
    assert ok and not violations
    assert report.vertex_depth == 1
    assert report.edge_depth == 3  # the size of the largest edge
    assert report.weak_edge_depth == 3
    broken = Embedding({**psi.mapping, "a": frozenset({"a", "d"})})
    ok, _, violations = validate_embedding(G, H, broken)
    assert not ok and any("not connected" in v for v in violations)


def test_depths_match_recount():
    rng = rng_from_seed(82)
    for _ in range(15):
        H = random_hypergraph(rng, max_vertices=6, connected=True)
        G = primal_graph(H)
        mapping = {}
        for u in G.vertices:
            seed = rng.choice(list(H.vertices))
            img = {seed}
            while rng.random() < 0.4:
                nbrs = sorted(H.names_of(
                    H.adjacency[H.index(rng.choice(sorted(img)))]))
                if not nbrs:
                    break
                img.add(rng.choice(nbrs))
            mapping[u] = frozenset(img)
        psi = Embedding(mapping)
        report = embedding_depths(G, H, psi)
        depth = {v: sum(1 for u in G.vertices if v in mapping[u])
                 for v in H.vertices}
        assert report.vertex_depth == max(depth.values())
        assert report.edge_depth == max(sum(depth[v] for v in e)
                                        for e in H.edges)
        assert report.weak_edge_depth == max(
            sum(1 for u in G.vertices if mapping[u] & e) for e in H.edges)


def test_simulate_identity_and_depth_bound():
    rng = rng_from_seed(83)
    done = 0
    while done < 12:
        I1 = random_csp(rng, max_vars=4, max_dom=3)
        if any(len(s) > 2 for s, _ in I1.constraints):
            continue
        H = I1.hypergraph()
        if not H.edges:
            continue
        psi = identity_embedding(H)
        G = primal_graph(H)
        report = embedding_depths(G, H, psi)
        for kind in ("edge", "weak"):
            I2 = simulate_csp_via_embedding(I1, H, psi, depth_kind=kind)
            q = report.edge_depth if kind == "edge" else report.weak_edge_depth
            assert all(len(r) <= len(I1.domain) ** q
                       for _, r in I2.constraints)
            assert ((brute_force_solve(I2) is not None)
                    == (brute_force_solve(I1) is not None))
        done += 1


def test_simulate_unsat_fixture():
    I1 = CspInstance(["u", "v"], ["0", "1"],
                     [(("u", "v"), {("0", "1"), ("1", "0")}),
                      (("u",), {("0",)}), (("v",), {("0",)})])
    assert brute_force_solve(I1) is None
    H = I1.hypergraph()
    I2 = simulate_csp_via_embedding(I1, H, identity_embedding(H))
    assert brute_force_solve(I2) is None


def test_simulate_into_larger_host():
    # compile a 3-variable chain into a 2-edge host covering two variables
    I1 = CspInstance(["a", "b", "c"], ["0", "1"],
                     [(("a", "b"), {("0", "0"), ("1", "1")}),
                      (("b", "c"), {("0", "1"), ("1", "0")})])
    H = Hypergraph([["p", "q"], ["q", "r"]])
    psi = Embedding({"a": frozenset({"p"}), "b": frozenset({"q"}),
                     "c": frozenset({"r"})})
    I2 = simulate_csp_via_embedding(I1, H, psi)
    assert (brute_force_solve(I2) is not None) and (
        brute_force_solve(I1) is not None)


def test_line_graph_and_embeddings():
    L3 = line_graph_of_complete(3)
    assert L3.n == 3 and len(L3.edges) == 3
    psi = embed_into_line_graph(L3, 3)
    ok, report, _ = validate_embedding(L3, L3.as_hypergraph(), psi)
    assert ok and report.vertex_depth == 1
    triangle = Graph("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    psi3 = embed_into_line_graph(triangle, 3)
    ok, _, violations = validate_embedding(
        triangle, line_graph_of_complete(3).as_hypergraph(), psi3)
    assert ok, violations
    square = Graph("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")])
    psi4 = embed_into_line_graph(square, 4)
    ok, report4, violations = validate_embedding(
        square, line_graph_of_complete(4).as_hypergraph(), psi4)
    assert ok, violations
    assert report4.vertex_depth <= 2


def test_construct_embedding_single_edge_host():
    G = Graph("ab", [("a", "b")])
    H = Hypergraph([["u", "w", "z"]])
    res = construct_embedding(G, H)
    ok, report, violations = validate_embedding(G, H, res.embedding)
    assert ok, violations
    assert report.edge_depth <= 2
    assert res.report.edge_depth == report.edge_depth


def test_construct_embedding_k4_into_grid():
    G = Graph("abcd", [(u, v) for u, v in itertools.combinations("abcd", 2)])
    rows = [[f"g{r}{c}" for c in range(3)] for r in range(3)]
    edges = [row for row in rows] + \
        [[rows[r][c] for r in range(3)] for c in range(3)]
    H = Hypergraph(edges)
    res = construct_embedding(G, H)
    ok, report, violations = validate_embedding(G, H, res.embedding)
    assert ok, violations
    assert report.edge_depth == res.report.edge_depth
    assert res.epsilon > 0


def test_construct_embedding_random_hosts():
    rng = rng_from_seed(84)
    done = 0
    while done < 8:
        H = random_hypergraph(rng, min_vertices=3, max_vertices=6,
                              connected=True)
        if max(len(e) for e in H.edges) < 2:
            continue
        G = Graph("xyz", [("x", "y"), ("y", "z")])
        res = construct_embedding(G, H)
        ok, report, violations = validate_embedding(G, H, res.embedding)
        assert ok, violations
        assert report.edge_depth == res.report.edge_depth
        done += 1


def test_transfer_decomposition():
    H = Hypergraph([["a", "b"], ["b", "c"]])
    G = primal_graph(H)
    T = TreeDecomposition({0: frozenset("ab"), 1: frozenset("bc")},
                          {0: None, 1: 0})
    out = transfer_decomposition(G, H, identity_embedding(H), T)
    assert {frozenset(b) for b in out.bags.values()} == {
        frozenset("ab"), frozenset("bc")}

    # singleton-image embedding into a bigger host
    H2 = Hypergraph([["p", "q"], ["q", "r"], ["r", "s"]])
    G2 = Graph("uvw", [("u", "v"), ("v", "w")])
    psi = Embedding({"u": frozenset({"p"}), "v": frozenset({"q"}),
                     "w": frozenset({"r"})})
    T2 = TreeDecomposition({0: frozenset("pq"), 1: frozenset("qr"),
                            2: frozenset("rs")}, {0: None, 1: 0, 2: 1})
    out2 = transfer_decomposition(G2, H2, psi, T2)
    from hgcsp.decomposition import validate_decomposition
    ok, violations = validate_decomposition(G2.as_hypergraph(), out2)
    assert ok, violations


def test_transfer_bag_size_bound():
    rng = rng_from_seed(85)
    done = 0
    while done < 8:
        H = random_hypergraph(rng, min_vertices=3, max_vertices=6,
                              connected=True)
        if max(len(e) for e in H.edges) < 2:
            continue
        G = Graph("xyz", [("x", "y"), ("y", "z")])
        res = construct_embedding(G, H)
        q = res.report.edge_depth
        depth = {v: sum(1 for u in G.vertices if v in res.embedding.mapping[u])
                 for v in H.vertices}
        mu = FractionalIndependentSet(
            {v: F(d, q) for v, d in depth.items() if d})
        width, T = min_f_width(H, mu.mass)
        out = transfer_decomposition(G, H, res.embedding, T)
        for t in T.nodes:
            assert len(out.bags[t]) <= q * mu.mass(T.bags[t])
        done += 1
