"""Property/oracle check suites behind the `check` CLI command and the
acceptance test module.

Every suite pits an implementation against an independent route: LP primal
against LP dual, solver against brute force, constructions against
exhaustive definition checks.  All comparisons are exact.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .csp import brute_force_solve, satisfies
from .decomposition import (fractional_hypertree_width,
                            generalized_hypertree_width, min_f_width,
                            treewidth, validate_decomposition)
from .errors import DomainError
from .fractional import (FractionalIndependentSet, edge_cover_number,
                         fractional_edge_cover_number, is_mu_lambda_connected,
                         max_flow, min_fractional_separator)
from .hypergraph import Hypergraph, induced_subhypergraph, primal_graph
from .randgen import (random_3sat, random_csp, random_hypergraph,
                      random_submodular_oracle, rng_from_seed)
from .reductions import (CnfFormula, Embedding, cnf_brute_force,
                         construct_embedding, embedding_depths, sat_to_csp,
                         simulate_csp_via_embedding, transfer_decomposition,
                         validate_embedding)
from .submodular import (SetFunctionOracle, b_pi, b_star, check_properties,
                         decompose_or_highly_connected,
                         independent_set_from_ordering, marginal,
                         round_fractional_separator)
from .uniform import (build_submodular_from_uniform, is_uniform, solve_fpt,
                      split_uniform)


@dataclass
class CheckResult:
    criterion: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.criterion}: {self.detail}"


def _fano():
    return Hypergraph([[f"p{i}", f"p{(i + 1) % 7}", f"p{(i + 3) % 7}"]
                       for i in range(7)])


def _k4():
    return Hypergraph([[u, v] for u, v in itertools.combinations("ABCD", 2)])


def _q1():
    return Hypergraph([list("ABC"), list("CD"), list("DEF"),
                       list("EFGH"), list("HI")])


def check_width_fixtures(**_):
    """Named width values, exact."""
    failures = []
    for r in (2, 4, 6):
        H = Hypergraph([[f"v{i}" for i in range(r)]])
        if treewidth(H)[0] != r - 1:
            failures.append(f"tw(single edge of size {r})")
    q1 = _q1()
    if generalized_hypertree_width(q1)[0] != 1:
        failures.append("ghw(Q1)")
    if fractional_hypertree_width(q1)[0] != 1:
        failures.append("fhw(Q1)")
    k4 = _k4()
    if treewidth(k4)[0] != 3:
        failures.append("tw(K4)")
    if fractional_hypertree_width(k4)[0] != 2:
        failures.append("fhw(K4)")
    fano = _fano()
    if edge_cover_number(fano, fano.vertices) != 3:
        failures.append("rho(Fano)")
    if fractional_edge_cover_number(fano, fano.vertices)[0] != Fraction(7, 3):
        failures.append("rho*(Fano)")
    if fractional_hypertree_width(fano)[0] != Fraction(7, 3):
        failures.append("fhw(Fano)")
    detail = "all width fixtures exact" if not failures else \
        "wrong: " + ", ".join(failures)
    return CheckResult("width-fixtures", not failures, detail)


def check_lp_duality(seed=0, count=200, max_vertices=8, **_):
    """Max flow equals min fractional separator weight, exactly."""
    rng = rng_from_seed(seed)
    mismatches = 0
    for _ in range(count):
        H = random_hypergraph(rng, max_vertices=max_vertices)
        X = frozenset(rng.sample(list(H.vertices), rng.randint(1, 2)))
        Y = frozenset(rng.sample(list(H.vertices), rng.randint(1, 2)))
        wsep, sep = min_fractional_separator(H, X, Y)
        vflow, flow = max_flow(H, X, Y)
        if wsep != vflow:
            mismatches += 1
            continue
        flow.validate(H, X, Y)
        if wsep:
            sep.validate(H)
    return CheckResult(
        "lp-duality", mismatches == 0,
        f"{count} random instances, flow value == separator weight exactly"
        if not mismatches else f"{mismatches}/{count} duality gaps")


def check_ordered_marginal_suite(seed=0, count=50, max_vertices=6, **_):
    """Inequalities (1)-(6) of the ordered-marginal transform plus the
    additivity across independent components, all exact."""
    rng = rng_from_seed(seed)
    bad = []
    for index in range(count):
        H = random_hypergraph(rng, max_vertices=max_vertices)
        b = random_submodular_oracle(rng, H)
        names = list(H.vertices)
        subsets = [frozenset(c) for r in range(len(names) + 1)
                   for c in itertools.combinations(names, r)]
        star = {}
        for Z in subsets:
            star[Z], wit = b_star(b, H, Z)
            if b_pi(b, H, wit, Z) != star[Z]:
                bad.append((index, "witness", Z))
        for Z in subsets:
            if star[Z] < b(Z):
                bad.append((index, "lower-bound", Z))         # (1), (2)
            if len(Z) <= 4:
                for pi in itertools.permutations(sorted(Z)):
                    if b_pi(b, H, pi, Z) < b(Z):
                        bad.append((index, "ordering", (pi, Z)))
            if H.mask_of(Z) and kernels.is_clique(H.n, H.adjacency,
                                                  H.mask_of(Z)):
                if star[Z] != b(Z):
                    bad.append((index, "clique-equality", Z))  # (3)
        for X in subsets:
            for Y in subsets:
                if star[X | Y] > star[X] + star[Y]:
                    bad.append((index, "subadditive", (X, Y)))  # (6)
        pi = tuple(names)
        for v in names:
            nbr = sorted(H.names_of(H.adjacency[H.index(v)]))
            for r in range(len(nbr) + 1):
                for P in itertools.combinations(nbr, r):
                    for u in P:
                        smaller = frozenset(P) - {u}
                        if marginal(b, H, pi, frozenset(P) | {v}, v) > \
                                marginal(b, H, pi, smaller | {v}, v):
                            bad.append((index, "marginal-monotone", (v, P)))  # (4), (5)
    # additivity on disconnected hosts
    for index in range(max(3, count // 10)):
        H1 = random_hypergraph(rng, max_vertices=3)
        H2 = Hypergraph([[f"w{v[1:]}" for v in e]
                         for e in random_hypergraph(rng, max_vertices=3).edges])
        H = Hypergraph([list(e) for e in H1.edges] + [list(e) for e in H2.edges])
        b = random_submodular_oracle(rng, H)
        A = frozenset(rng.sample(list(H1.vertices), rng.randint(1, H1.n)))
        B = frozenset(rng.sample(list(H2.vertices), rng.randint(1, H2.n)))
        if b_star(b, H, A | B)[0] != b_star(b, H, A)[0] + b_star(b, H, B)[0]:
            bad.append((index, "additivity", (A, B)))
    return CheckResult(
        "ordered-marginal-suite", not bad,
        f"{count} random oracles, inequalities (1)-(6) and additivity exact"
        if not bad else f"{len(bad)} violations, first {bad[0]}")


def check_cost_domination(seed=0, count=50, max_vertices=6, **_):
    """Edge-dominated monotone submodular costs sit below the fractional
    cover pointwise, and their widths below the fractional width."""
    rng = rng_from_seed(seed)
    bad = []
    for index in range(count):
        H = random_hypergraph(rng, max_vertices=max_vertices)
        b = random_submodular_oracle(rng, H)
        rho = {}
        names = list(H.vertices)
        for r in range(len(names) + 1):
            for c in itertools.combinations(names, r):
                S = frozenset(c)
                rho[S] = fractional_edge_cover_number(H, S)[0]
                if b(S) > rho[S]:
                    bad.append((index, "pointwise", S))
        fhw, _ = fractional_hypertree_width(H)
        bw, td = min_f_width(H, b)
        if bw > fhw:
            bad.append((index, "width", (bw, fhw)))
        ok, _ = validate_decomposition(H, td)
        if not ok:
            bad.append((index, "witness", None))
    return CheckResult(
        "cost-domination", not bad,
        f"{count} oracles: b <= rho* pointwise and b-width <= fhw"
        if not bad else f"{len(bad)} violations, first {bad[0]}")


def check_separator_rounding(seed=0, count=100, max_vertices=8, **_):
    """Rounded separators always separate and cost at most 31x the
    fractional weight (exact arithmetic)."""
    rng = rng_from_seed(seed)
    done = 0
    bad = []
    while done < count:
        H = random_hypergraph(rng, max_vertices=max_vertices, connected=True)
        X = frozenset(rng.sample(list(H.vertices), rng.randint(1, 2)))
        Y = frozenset(rng.sample(list(H.vertices), rng.randint(1, 2)))
        w, s = min_fractional_separator(H, X, Y)
        if w == 0:
            continue
        if rng.random() < 0.5:  # also exercise non-optimal separators
            bumped = dict(s.weights)
            e = rng.choice(sorted(bumped))
            bumped[e] += Fraction(rng.randint(0, 4), 4)
            s = type(s)(bumped, s.X, s.Y)
            w = s.weight()
        b = random_submodular_oracle(rng, H)
        done += 1
        try:
            rr = round_fractional_separator(H, X, Y, s, b)
        except Exception as ex:  # separation/cost self-checks raise
            bad.append((done, repr(ex)))
            continue
        if rr.cost > 31 * w or rr.b_value > rr.cost:
            bad.append((done, "bound"))
    return CheckResult(
        "separator-rounding", not bad,
        f"{count} fixtures: verified separators with cost <= 31x weight"
        if not bad else f"{len(bad)} failures, first {bad[0]}")


def check_split_uniform(seed=0, count=100, max_vars=5, max_dom=4, **_):
    """Splitting yields uniform consistent nontrivial refinements whose
    solutions partition the input's, with the tracked weight dropping by
    the guaranteed amount at every step."""
    rng = rng_from_seed(seed)
    bad = []
    eps = Fraction(1, 8)
    pieces_total = 0
    for index in range(count):
        I = random_csp(rng, max_vars=max_vars, max_dom=max_dom)
        N = I.max_relation_size()
        if not N:
            continue
        outs, trace = split_uniform(I, N, Fraction(1), eps)
        pieces_total += len(outs)
        base = brute_solutions(I)
        seen = {}
        for piece in outs:
            if not piece.is_refinement_of(I):
                bad.append((index, "refinement"))
            ok, _ = is_uniform(piece, N, Fraction(1), eps)
            if not ok:
                bad.append((index, "uniformity"))
            for t in brute_solutions(piece):
                if t in seen:
                    bad.append((index, "overlap"))
                seen[t] = True
        if set(seen) != base:
            bad.append((index, "partition"))
        p, q = eps.numerator, eps.denominator
        for node in trace.nodes:
            if node.parent < 0 or node.weight_product is None:
                continue
            par = trace.nodes[node.parent]
            if par.family != node.family or par.weight_product is None:
                continue
            if node.weight_product ** (2 * q) * N ** p > \
                    par.weight_product ** (2 * q):
                bad.append((index, "weight-decrease"))
    return CheckResult(
        "uniform-split", not bad,
        f"{count} instances, {pieces_total} uniform pieces, partitions and"
        " weight decrease exact" if not bad
        else f"{len(bad)} failures, first {bad[0]}")


def brute_solutions(I):
    out = set()
    svars = sorted(I.variables)
    for combo in itertools.product(I.domain, repeat=len(svars)):
        a = dict(zip(svars, combo))
        if satisfies(I, a):
            out.add(combo)
    return out


def check_built_oracles(seed=0, count=40, **_):
    """Solution-count oracles from uniform instances pass the exhaustive
    monotone/submodular/edge-dominated checks."""
    rng = rng_from_seed(seed)
    built = 0
    bad = []
    while built < count:
        I = random_csp(rng, max_vars=4, max_dom=3)
        N = I.max_relation_size()
        if not N or N < 2:
            continue
        n = len(I.variables)
        outs, _ = split_uniform(I, N, Fraction(1), Fraction(1, n) ** 3)
        if not outs:
            continue
        piece = outs[0]
        b = build_submodular_from_uniform(piece, N, Fraction(1))
        built += 1
        report = check_properties(b, piece.hypergraph(), cap=8)
        if not report.all_ok():
            bad.append((built, report.counterexamples))
    return CheckResult(
        "built-oracles", not bad,
        f"{count} constructed oracles pass all property checks"
        if not bad else f"{len(bad)} failures, first {bad[0]}")


def check_end_to_end_solver(seed=0, count=200, max_vars=4, max_dom=3, **_):
    """The uniform-split solver agrees with brute force, with verified
    witnesses on every satisfiable instance.

    Every fourth instance is drawn over one of the named fixture
    hypergraphs; the rest use random scopes."""
    rng = rng_from_seed(seed)
    fixture_hosts = [_k4(), _q1(), _fano(),
                     Hypergraph([["a", "b"], ["b", "c"], ["c", "d"]])]
    bad = []
    for index in range(count):
        if index % 4 == 0:
            host = fixture_hosts[(index // 4) % len(fixture_hosts)]
            I = random_csp(rng, max_dom=max_dom, hypergraph=host)
        else:
            I = random_csp(rng, max_vars=max_vars, max_dom=max_dom)
        H = I.hypergraph()
        covered = induced_subhypergraph(H, H.names_of(H.covered_mask()))
        c0 = fractional_hypertree_width(covered)[0] if I.constraints \
            else Fraction(1)
        res = solve_fpt(I, c0)
        brute = brute_force_solve(I)
        if (res.verdict == "SAT") != (brute is not None):
            bad.append((index, "verdict"))
            continue
        if res.verdict == "SAT" and not satisfies(I, res.assignment):
            bad.append((index, "witness"))
    return CheckResult(
        "end-to-end-solver", not bad,
        f"{count} instances match brute force with verified witnesses"
        if not bad else f"{len(bad)} failures, first {bad[0]}")


def check_decompose_or_connected(seed=0, count=12, **_):
    """Either branch of decompose-or-highly-connected verifies."""
    rng = rng_from_seed(seed)
    bad = []
    fixtures = []
    for _ in range(count):
        H = random_hypergraph(rng, min_vertices=3, max_vertices=6)
        fixtures.append((H, random_submodular_oracle(rng, H),
                         Fraction(rng.choice((1, 1, 2, 4)), 2)))
    K6 = Hypergraph([[u, v] for u, v in itertools.combinations("abcdef", 2)])
    half = SetFunctionOracle.modular(K6, {v: Fraction(1, 2)
                                          for v in K6.vertices})
    fixtures.append((K6, half, Fraction(1, 2)))  # forces the connected branch
    P = Hypergraph([["a", "b"], ["b", "c"], ["c", "d"]])
    fixtures.append((P, SetFunctionOracle.modular(
        P, {v: Fraction(1, 2) for v in P.vertices}), Fraction(1)))
    decomposed = connected = 0
    for index, (H, b, w) in enumerate(fixtures):
        lam = Fraction(1, 1000)
        try:
            res = decompose_or_highly_connected(H, b, w, lam)
        except Exception as ex:
            bad.append((index, repr(ex)))
            continue
        if res.kind == "decomposition":
            decomposed += 1
            ok, violations = validate_decomposition(H, res.decomposition)
            if not ok:
                bad.append((index, violations))
            bound = Fraction(3, 2) * (w + 1)
            for t in res.decomposition.nodes:
                val, _ = b_star(b, H, res.decomposition.bags[t],
                                cap=max(10, len(res.decomposition.bags[t])))
                if val > bound:
                    bad.append((index, "bag-cost"))
        else:
            connected += 1
            if res.mu.mass(res.W) < w:
                bad.append((index, "mass"))
            cert = is_mu_lambda_connected(H, res.mu, res.W, lam)
            if not cert.verdict:
                bad.append((index, "certificate"))
    return CheckResult(
        "decompose-or-connected", not bad,
        f"{len(fixtures)} fixtures ({decomposed} decomposed, {connected}"
        " highly connected), certificates verified" if not bad
        else f"{len(bad)} failures, first {bad[0]}")


def check_sat_reduction(seed=0, count=500, max_vars=8, **_):
    """3SAT-to-CSP equisatisfiability against truth tables, plus the
    simulation relation-size bound on identity embeddings."""
    rng = rng_from_seed(seed)
    bad = []
    for index in range(count):
        n, clauses = random_3sat(rng, max_vars=max_vars, max_clauses=8)
        phi = CnfFormula(n, tuple(clauses))
        I = sat_to_csp(phi)
        expected = cnf_brute_force(phi)
        if (brute_force_solve(I) is not None) != expected:
            bad.append((index, "equisatisfiability"))
    sim_checked = 0
    while sim_checked < 10:
        I1 = random_csp(rng, max_vars=4, max_dom=3)
        if any(len(s) > 2 for s, _ in I1.constraints):
            continue
        H = I1.hypergraph()
        if not H.edges:
            continue
        psi = Embedding({v: frozenset({v}) for v in H.vertices})
        G = primal_graph(H)
        report = embedding_depths(G, H, psi)
        I2 = simulate_csp_via_embedding(I1, H, psi)
        sim_checked += 1
        if any(len(r) > len(I1.domain) ** report.edge_depth
               for _, r in I2.constraints):
            bad.append((sim_checked, "relation-size"))
        if (brute_force_solve(I2) is None) != (brute_force_solve(I1) is None):
            bad.append((sim_checked, "simulation"))
    return CheckResult(
        "sat-reduction", not bad,
        f"{count} formulas equisatisfiable, {sim_checked} simulations bounded"
        if not bad else f"{len(bad)} failures, first {bad[0]}")


def check_transfer(seed=0, count=10, **_):
    """Transferred decompositions validate with the exact bag-size bound."""
    rng = rng_from_seed(seed)
    bad = []
    done = 0
    while done < count:
        H = random_hypergraph(rng, min_vertices=3, max_vertices=6,
                              connected=True)
        if max(len(e) for e in H.edges) < 2:
            continue
        from .hypergraph import Graph
        G = Graph("xyz", [("x", "y"), ("y", "z")])
        res = construct_embedding(G, H)
        q = res.report.edge_depth
        depth = {v: sum(1 for u in G.vertices
                        if v in res.embedding.mapping[u]) for v in H.vertices}
        mu = FractionalIndependentSet({v: Fraction(d, q)
                                       for v, d in depth.items() if d})
        width, T = min_f_width(H, mu.mass)
        done += 1
        try:
            out = transfer_decomposition(G, H, res.embedding, T)
        except DomainError as ex:
            bad.append((done, repr(ex)))
            continue
        for t in T.nodes:
            if len(out.bags[t]) > q * mu.mass(T.bags[t]):
                bad.append((done, "bag-bound"))
    return CheckResult(
        "decomposition-transfer", not bad,
        f"{count} transfers validated with |bag| <= depth * mu-cost exactly"
        if not bad else f"{len(bad)} failures, first {bad[0]}")


SUITES = {
    "widths": check_width_fixtures,
    "duality": check_lp_duality,
    "prop52": check_ordered_marginal_suite,
    "domination": check_cost_domination,
    "rounding": check_separator_rounding,
    "split": check_split_uniform,
    "oracles": check_built_oracles,
    "solver": check_end_to_end_solver,
    "decompose": check_decompose_or_connected,
    "sat": check_sat_reduction,
    "transfer": check_transfer,
}


def run_suite(name, **kwargs):
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; choose from "
                          + ", ".join(sorted(SUITES)))
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    return SUITES[name](**kwargs)
