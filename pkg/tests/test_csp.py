import itertools

import pytest

from hgcsp.csp import (CspInstance, PowerBound, SolutionsIndex, as_bound,
                       brute_force_solve, enumerate_M_small, is_nontrivial,
                       make_M_consistent, project_instance, satisfies,
                       solutions, solve_with_decomposition)
from hgcsp.decomposition import TreeDecomposition
from hgcsp.errors import DomainError
from hgcsp.randgen import random_csp, rng_from_seed


def oracle_solutions(I, S):
    """Independent filter over all |D|^|S| assignments."""
    svars = sorted(S)
    out = set()
    for combo in itertools.product(I.domain, repeat=len(svars)):
        a = dict(zip(svars, combo))
        ok = True
        for scope, rel in I.constraints:
            positions = [i for i, v in enumerate(scope) if v in S]
            if not positions:
                continue
            projected = {tuple(t[i] for i in positions) for t in rel}
            if tuple(a[scope[i]] for i in positions) not in projected:
                ok = False
                break
        if ok:
            out.add(combo)
    return out


def oracle_is_M_small(I, S, M):
    M = as_bound(M)
    for r in range(len(S) + 1):
        for sub in itertools.combinations(sorted(S), r):
            if not M.holds(len(oracle_solutions(I, set(sub)))):
                return False
    return True


def test_power_bound():
    b = PowerBound(3, 2)
    assert b.holds(9) and not b.holds(10)
    half = PowerBound(4, "1/2")
    assert half.holds(2) and not half.holds(3)
    assert half.floor() == 2
    assert PowerBound(2, "3/2").floor() == 2  # 2^1.5 ~ 2.83


def test_scope_normalization_and_merge():
    I = CspInstance(
        ["y", "x"], ["a", "b"],
        [(("y", "x"), {("a", "a"), ("b", "a")}),
         (("x", "y"), {("a", "a"), ("a", "b"), ("b", "b")})])
    assert len(I.constraints) == 1
    scope, rel = I.constraints[0]
    assert scope == ("x", "y")
    assert rel == {("a", "a"), ("a", "b")} & rel  # intersected, columns aligned
    assert ("a", "a") in rel and ("a", "b") in rel and len(rel) == 2


def test_projection_fixtures():
    I = CspInstance(["x", "y"], ["a", "b"],
                    [(("x", "y"), {("a", "b"), ("b", "b")})])
    assert project_instance(I, {"x", "y"}) == I
    P = project_instance(I, {"x"})
    assert P.constraints[0] == (("x",), frozenset({("a",), ("b",)}))
    with pytest.raises(DomainError):
        project_instance(I, set())


def test_projection_of_solution_solves_projection():
    rng = rng_from_seed(61)
    for _ in range(20):
        I = random_csp(rng, max_vars=4, max_dom=3)
        full = oracle_solutions(I, set(I.variables))
        for sub_size in range(1, min(3, len(I.variables)) + 1):
            sub = frozenset(rng.sample(list(I.variables), sub_size))
            proj = oracle_solutions(I, sub)
            svars = sorted(sub)
            order = [sorted(I.variables).index(v) for v in svars]
            for t in full:
                assert tuple(t[sorted(I.variables).index(v)] for v in svars) in proj


def test_solutions_fixtures_and_oracle():
    I = CspInstance(["x", "y"], ["a", "b"], [(("x",), {("a",)})])
    assert solutions(I, {"y"}).assignments == frozenset({("a",), ("b",)})
    assert solutions(I, {"x"}).assignments == frozenset({("a",)})
    rng = rng_from_seed(62)
    for _ in range(25):
        I = random_csp(rng)
        S = frozenset(rng.sample(list(I.variables),
                                 rng.randint(1, len(I.variables))))
        assert solutions(I, S).assignments == frozenset(oracle_solutions(I, S))


def test_enumerate_M_small():
    I = CspInstance(["x", "y"], ["a", "b"], [(("x", "y"), {("a", "a")})])
    family, _ = enumerate_M_small(I, 100)
    assert set(family) == {frozenset(), frozenset("x"), frozenset("y"),
                           frozenset("xy")}
    # a variable with two unary solutions is excluded at M=1
    J = CspInstance(["x", "y"], ["a", "b"],
                    [(("x",), {("a",)}), (("y",), {("a",), ("b",)})])
    fam1, _ = enumerate_M_small(J, 1)
    assert frozenset("y") not in fam1 and frozenset("x") in fam1
    rng = rng_from_seed(63)
    for _ in range(15):
        I = random_csp(rng, max_vars=4, max_dom=3)
        M = rng.randint(1, 8)
        family, _ = enumerate_M_small(I, M)
        for r in range(len(I.variables) + 1):
            for sub in itertools.combinations(I.variables, r):
                expected = oracle_is_M_small(I, set(sub), M)
                assert (frozenset(sub) in family) == expected
                if expected:
                    assert family[frozenset(sub)] == frozenset(
                        oracle_solutions(I, set(sub)))


def test_make_M_consistent_preserves_solutions():
    rng = rng_from_seed(64)
    for _ in range(20):
        I = random_csp(rng, max_vars=4, max_dom=3)
        M = rng.randint(1, 10)
        J = make_M_consistent(I, M)
        assert J.is_refinement_of(I)
        assert oracle_solutions(I, set(I.variables)) == oracle_solutions(
            J, set(J.variables))
        # consistency achieved: every M-small pair extends
        family, _ = enumerate_M_small(J, M)
        for A in family:
            for B in family:
                if B and B < A:
                    avars = sorted(A)
                    pos = [avars.index(v) for v in sorted(B)]
                    assert family[B] == {tuple(t[i] for i in pos)
                                         for t in family[A]}


def test_pruned_value_example():
    I = CspInstance(["x", "y"], ["a", "b"],
                    [(("x",), {("a",), ("b",)}),
                     (("x", "y"), {("a", "a")})])
    J = make_M_consistent(I, 4)
    assert solutions(J, {"x"}).assignments == frozenset({("a",)})


def test_is_nontrivial_and_prop46():
    assert is_nontrivial(CspInstance(["x"], ["a"], []))
    assert not is_nontrivial(CspInstance(["x"], ["a"], [(("x",), set())]))
    rng = rng_from_seed(65)
    checked = 0
    for _ in range(30):
        I = random_csp(rng, max_vars=4, max_dom=3)
        M = rng.randint(1, 6)
        J = make_M_consistent(I, M)
        if not is_nontrivial(J):
            continue
        family, _ = enumerate_M_small(J, M)
        assert all(family[S] for S in family)
        checked += 1
    assert checked >= 5


def test_brute_force_fixtures():
    I = CspInstance(["x", "y"], ["a", "b"], [])
    assert brute_force_solve(I) == {"x": "a", "y": "a"}
    J = CspInstance(["x"], ["a"], [(("x",), set())])
    assert brute_force_solve(J) is None
    # 3-clique search in a 5-vertex graph holding one triangle
    edges = [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5)]
    adjacency = {(str(u), str(v)) for u, v in edges} | \
        {(str(v), str(u)) for u, v in edges}
    rel = set(adjacency)
    K = CspInstance(["c1", "c2", "c3"], [str(i) for i in range(1, 6)],
                    [(("c1", "c2"), rel), (("c1", "c3"), rel),
                     (("c2", "c3"), rel)])
    found = brute_force_solve(K)
    assert found is not None
    picked = {found["c1"], found["c2"], found["c3"]}
    assert picked == {"1", "2", "3"}


def test_solve_with_decomposition():
    I = CspInstance(["x", "y", "z"], ["a", "b"],
                    [(("x", "y"), {("a", "a"), ("b", "a")}),
                     (("y", "z"), {("a", "b")})])
    J = make_M_consistent(I, 10)
    T = TreeDecomposition({0: frozenset("xy"), 1: frozenset("yz")},
                          {0: None, 1: 0})
    got = solve_with_decomposition(I, J, T, 10)
    assert satisfies(I, got)
    # single bag
    T1 = TreeDecomposition({0: frozenset("xyz")}, {0: None})
    got1 = solve_with_decomposition(I, J, T1, 10)
    assert satisfies(I, got1)
    # precondition violations are reported, not solved
    with pytest.raises(DomainError):
        solve_with_decomposition(I, I.with_constraint(("x",), set()), T, 10)


def test_text_and_json_round_trip():
    rng = rng_from_seed(66)
    for _ in range(10):
        I = random_csp(rng)
        assert CspInstance.from_text(I.to_text(), prune=False) == I
        assert CspInstance.from_json_dict(I.to_json_dict(), prune=False) == I


def test_domain_pruning_rules():
    constrained = CspInstance(["x"], ["a", "b"], [(("x",), {("a",)})])
    assert constrained.prune_domain().domain == ("a",)
    free = CspInstance(["x", "y"], ["a", "b"], [(("x",), {("a",)})])
    assert free.prune_domain().domain == ("a", "b")  # y still needs both
