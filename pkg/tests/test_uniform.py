import itertools
from fractions import Fraction as F

import pytest

from hgcsp.csp import CspInstance, PowerBound, brute_force_solve, solutions
from hgcsp.decomposition import fractional_hypertree_width
from hgcsp.errors import DomainError
from hgcsp.randgen import random_csp, rng_from_seed
from hgcsp.submodular import check_properties
from hgcsp.uniform import (LogLinValue, SplitTrace, build_submodular_from_uniform,
                           is_uniform, max_extensions, solve_fpt, split_uniform)

from test_csp import oracle_solutions


def oracle_max_extensions(I, A, B):
    solA = oracle_solutions(I, A)
    solB = oracle_solutions(I, B)
    if not A:
        return 1
    if not B:
        return len(solA)
    if not solB:
        return 0
    avars, bvars = sorted(A), sorted(B)
    positions = [avars.index(v) for v in bvars]
    best = 0
    for b in solB:
        cnt = sum(1 for t in solA if tuple(t[i] for i in positions) == b)
        best = max(best, cnt)
    return best


def test_log_lin_value_arithmetic():
    x = LogLinValue(F(3, 4), 2, 2, F(7, 64))     # 3/4*log2(2) + 7/64
    assert x == F(55, 64)
    assert x + F(1, 64) == F(56, 64)
    y = LogLinValue(F(3, 4), 2, 4, F(0))         # 3/2
    assert y > x
    assert y == F(3, 2)
    assert (y - x) == F(3, 2) - F(55, 64)
    assert LogLinValue(F(3, 4), 2, 3, F(0)) < F(3, 2)  # log2(3) < 2
    assert LogLinValue(F(3, 4), 2, 3, F(0)) > F(1)     # log2(3) > 4/3
    with pytest.raises(TypeError):
        LogLinValue(F(3, 4), 2, 3, F(0)) - LogLinValue(F(3, 4), 2, 2, F(0))
    assert max(x, y) is y


def test_max_extensions_fixtures_and_props():
    I = CspInstance(["x", "y"], ["a", "b"],
                    [(("x", "y"), {("a", "a"), ("a", "b"), ("b", "a")})])
    assert max_extensions(I, {"x", "y"}, {"x", "y"}) == 1
    assert max_extensions(I, {"x", "y"}, set()) == 3
    assert max_extensions(I, {"x", "y"}, {"x"}) == 2
    assert max_extensions(I, set(), set()) == 1
    with pytest.raises(DomainError):
        max_extensions(I, {"x"}, {"y"})
    rng = rng_from_seed(71)
    for _ in range(20):
        J = random_csp(rng, max_vars=4, max_dom=3)
        vs = list(J.variables)
        A = frozenset(rng.sample(vs, rng.randint(0, len(vs))))
        B = frozenset(rng.sample(sorted(A), rng.randint(0, len(A))))
        got = max_extensions(J, A, B)
        assert got == oracle_max_extensions(J, A, B)
        # extension counts only drop when both sides gain the same set
        C = frozenset(rng.sample(vs, rng.randint(0, len(vs))))
        assert got >= max_extensions(J, A | C, B | C)
        solA = len(oracle_solutions(J, A))
        solB = len(oracle_solutions(J, B))
        assert got * solB >= solA  # max(A|B) >= |sol(A)|/|sol(B)|


def test_is_uniform_fixtures():
    full = CspInstance(["x", "y"], ["a", "b"],
                       [(("x", "y"), {(u, v) for u in "ab" for v in "ab"})])
    ok, _ = is_uniform(full, 4, F(1), F(1, 2))
    assert ok
    skew = CspInstance(["x", "y"], ["a", "b", "c"],
                       [(("x", "y"), {("a", "a"), ("a", "b"), ("a", "c"),
                                      ("b", "a")})])
    # one x-value has 3 extensions, the other 1: 3 > N^eps * 4/2 for tiny eps
    ok, witness = is_uniform(skew, 4, F(1), F(1, 100))
    assert not ok and witness is not None


def test_split_trivial_and_uniform_passthrough():
    dead = CspInstance(["x"], ["a"], [(("x",), set())])
    outs, trace = split_uniform(dead, 1, F(1), F(1, 2))
    assert outs == [] and trace.nodes[0].dropped
    full = CspInstance(["x", "y"], ["a", "b"],
                       [(("x", "y"), {(u, v) for u in "ab" for v in "ab"})])
    outs, _ = split_uniform(full, 4, F(1), F(1, 2))
    assert len(outs) == 1
    assert (oracle_solutions(outs[0], set(outs[0].variables))
            == oracle_solutions(full, set(full.variables)))


def test_split_partitions_solutions_and_trace_invariants():
    rng = rng_from_seed(72)
    interesting = 0
    for _ in range(40):
        I = random_csp(rng, max_vars=4, max_dom=3)
        N = I.max_relation_size()
        if not N:
            continue
        eps = F(1, 8)  # small enough that splits actually happen
        outs, trace = split_uniform(I, N, F(1), eps)
        # every solution of I appears in exactly one piece
        base = oracle_solutions(I, set(I.variables))
        seen = {}
        for k, piece in enumerate(outs):
            for t in oracle_solutions(piece, set(piece.variables)):
                assert t not in seen
                seen[t] = k
            assert piece.is_refinement_of(I)
            ok, _ = is_uniform(piece, N, F(1), eps)
            assert ok
        assert set(seen) == base
        if len(outs) > 1:
            interesting += 1
        # weight decreases by >= (eps/2) log N between same-family nodes
        p, q = eps.numerator, eps.denominator
        for node in trace.nodes:
            if node.parent < 0 or node.dropped or node.weight_product is None:
                continue
            par = trace.nodes[node.parent]
            if par.family != node.family or par.weight_product is None:
                continue
            assert (node.weight_product ** (2 * q) * N ** p
                    <= par.weight_product ** (2 * q))
        # the large side always shrinks by the sqrt(N^eps) factor
        for node in trace.nodes:
            if node.split_sizes:
                nA, nB, nsmall, nlarge = node.split_sizes
                assert nsmall + nlarge == nB
                assert nlarge ** (2 * q) * N ** p <= nB ** (2 * q)
    assert interesting >= 3


def test_build_submodular_formula_values():
    I = CspInstance(["x0", "x1", "x2", "x3"], ["a", "b"],
                    [(("x0",), {("a",), ("b",)})])
    b = build_submodular_from_uniform(I, 2, F(1))
    assert b(frozenset()) == 0
    assert b({"x0"}) == F(55, 64)       # small singleton with |sol| = N
    assert b({"x1", "x2"}) == F(15, 16)  # non-small pair at c = 1
    report = check_properties(b, I.hypergraph(), cap=8)
    assert report.all_ok()


def test_build_submodular_random_instances_pass_checks():
    rng = rng_from_seed(73)
    built = 0
    while built < 6:
        I = random_csp(rng, max_vars=4, max_dom=3)
        N = I.max_relation_size()
        if not N or N < 2:
            continue
        outs, _ = split_uniform(I, N, F(1), F(1, len(I.variables)) ** 3)
        if not outs:
            continue
        b = build_submodular_from_uniform(outs[0], N, F(1))
        assert check_properties(b, outs[0].hypergraph(), cap=8).all_ok()
        built += 1


def test_solve_fpt_fixtures():
    dead = CspInstance(["x", "y"], ["a"], [(("x",), set())])
    assert solve_fpt(dead, F(1)).verdict == "UNSAT"
    single = CspInstance(["x", "y"], ["a", "b"],
                         [(("x", "y"), {("a", "b"), ("b", "a")})])
    res = solve_fpt(single, F(1))
    assert res.verdict == "SAT"
    assert (res.assignment["x"], res.assignment["y"]) in {("a", "b"), ("b", "a")}
    filler = CspInstance(["x"], ["a", "b"], [])
    assert solve_fpt(filler, F(1)).verdict == "SAT"


def test_solve_fpt_matches_brute_force():
    rng = rng_from_seed(74)
    agreements = 0
    for _ in range(40):
        I = random_csp(rng, max_vars=4, max_dom=3)
        H = I.hypergraph()
        from hgcsp.hypergraph import induced_subhypergraph
        covered = induced_subhypergraph(H, H.names_of(H.covered_mask()))
        c0 = fractional_hypertree_width(covered)[0] if I.constraints else F(1)
        res = solve_fpt(I, c0)
        brute = brute_force_solve(I)
        assert (res.verdict == "SAT") == (brute is not None)
        if res.verdict == "SAT":
            from hgcsp.csp import satisfies
            assert satisfies(I, res.assignment)
        agreements += 1
    assert agreements == 40
