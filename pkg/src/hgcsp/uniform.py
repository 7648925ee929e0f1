"""Uniformity measures, instance splitting, and the end-to-end solver.

Everything that would classically use logarithms is computed exactly: a
value of the form a*log_N(m) + s (a, s rational, m a positive integer) is
kept in that symbolic form, and comparisons clear denominators into big
integer power comparisons.  Thresholds with fractional exponents are
likewise compared in integer form (see csp.PowerBound).
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .csp import (CspInstance, PowerBound, SolutionsIndex, as_bound,
                  brute_force_solve, enumerate_M_small, is_nontrivial,
                  make_M_consistent, pair_stats, satisfies,
                  solve_with_decomposition)
from .errors import BoundViolationError, DomainError, ResourceLimitError
from .submodular import SetFunctionOracle, check_properties

SPLIT_NODE_CAP = 100_000


class LogLinValue:
    """Exact value a*log_N(m) + s with rational a, s and integer m >= 1.

    Closed under addition (same a and N) and under adding rationals; all
    comparisons are exact big-integer power comparisons.  Subtraction is
    only defined when the mantissa quotient stays integral.
    """

    __slots__ = ("a", "N", "m", "s")

    def __init__(self, a, N, m, s):
        if N < 2:
            raise DomainError("log base must be at least 2")
        if m < 1:
            raise DomainError("mantissa must be positive")
        self.a = Fraction(a)
        self.N = int(N)
        self.m = int(m)
        self.s = Fraction(s)

    def _promote(self, other):
        if isinstance(other, LogLinValue):
            if other.a != self.a or other.N != self.N:
                raise TypeError("incompatible log-value parameters")
            return other
        if isinstance(other, (int, Fraction)):
            return LogLinValue(self.a, self.N, 1, Fraction(other))
        return NotImplemented

    def __add__(self, other):
        o = self._promote(other)
        if o is NotImplemented:
            return o
        return LogLinValue(self.a, self.N, self.m * o.m, self.s + o.s)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._promote(other)
        if o is NotImplemented:
            return o
        if self.m % o.m:
            raise TypeError("inexact log-value subtraction")
        return LogLinValue(self.a, self.N, self.m // o.m, self.s - o.s)

    def _cmp(self, other):
        """-1, 0, or 1 comparing self with other, exactly."""
        o = self._promote(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare with {other!r}")
        if self.m == o.m:
            return (self.s > o.s) - (self.s < o.s)
        if self.a == 0:
            return (self.s > o.s) - (self.s < o.s)
        delta = (o.s - self.s) / self.a  # compare log_N(m/m') with delta
        p, q = delta.numerator, delta.denominator
        lhs, rhs = self.m ** q, o.m ** q
        if p >= 0:
            rhs *= self.N ** p
        else:
            lhs *= self.N ** (-p)
        return (lhs > rhs) - (lhs < rhs)

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        raise TypeError("unhashable exact log value")

    def as_float(self):
        import math
        return float(self.a) * math.log(self.m, self.N) + float(self.s)

    def __repr__(self):
        return f"LogLinValue({self.a}*log_{self.N}({self.m}) + {self.s})"


def max_extensions(I, A, B, index=None):
    """Largest number of extensions of a partial solution on B to one on A."""
    A, B = frozenset(A), frozenset(B)
    if not B <= A:
        raise DomainError("B must be contained in A")
    if not A <= set(I.variables):
        raise DomainError("A has unknown variables")
    if not A:
        return 1
    index = index or SolutionsIndex(I)
    if not B:
        return len(index.sol(A))
    solB = index.sol(B)
    if not solB:
        return 0
    avars = sorted(A)
    positions = [avars.index(v) for v in sorted(B)]
    counts = {}
    for t in index.sol(A):
        key = tuple(t[i] for i in positions)
        counts[key] = counts.get(key, 0) + 1
    return max(counts.values(), default=0)


def _uniformity_holds(maxAB, nA, nB, N, p, q):
    """max(A|B) <= N^(p/q) * |sol(A)| / |sol(B)|, cleared of denominators."""
    if maxAB * nB <= nA:  # within the average: no power needed
        return True
    return (maxAB * nB) ** q <= N ** p * nA ** q


def is_uniform(I, N, c, eps, index=None, family=None, stats=None):
    """Every N^c-small set A satisfies the N^eps extension bound for all
    of its subsets; returns (verdict, witness_pair_or_None)."""
    eps = Fraction(eps)
    p, q = eps.numerator, eps.denominator
    if family is None:
        family, index = enumerate_M_small(I, PowerBound(N, c), index=index)
    if stats is None:
        stats = pair_stats(family)
    for (A, B) in sorted(stats, key=lambda ab: (len(ab[0]), sorted(ab[0]),
                                                len(ab[1]), sorted(ab[1]))):
        maxAB, _ = stats[(A, B)]
        if not _uniformity_holds(maxAB, len(family[A]), len(family[B]),
                                 N, p, q):
            return False, (A, B)
    return True, None


@dataclass
class TraceNode:
    node_id: int
    parent: int  # -1 at the root
    branch: str  # 'root' | 'small' | 'large'
    dropped: bool = False
    emitted_index: int = None
    family: frozenset = None
    weight_product: int = None  # product of max(A|B) over small pairs
    split_pair: tuple = None    # (A, B) chosen violating pair, if split
    split_sizes: tuple = None   # (|sol(A)|, |sol(B)|, |small|, |large|)


@dataclass
class SplitTrace:
    N: int
    c: Fraction
    eps: Fraction
    nodes: list = field(default_factory=list)

    def children(self, node_id):
        return [n for n in self.nodes if n.parent == node_id]


def _weight_product(family, stats):
    P = 1
    for (A, B), (maxAB, _) in stats.items():
        P *= max(maxAB, 1)
    return P


def split_uniform(I, N, c, eps, node_cap=SPLIT_NODE_CAP, record_weights=True):
    """Split I into uniform, consistent, nontrivial refinements whose
    solution sets partition sol(I); returns (instances, trace).

    record_weights=False skips the (potentially huge) exact weight
    bookkeeping on the trace; the instances returned are identical.
    """
    N = int(N)
    c = Fraction(c)
    eps = Fraction(eps)
    if N < 1 or c < 1 or eps <= 0:
        raise DomainError("need N >= 1, c >= 1, eps > 0")
    M = PowerBound(N, c)
    p, q = eps.numerator, eps.denominator
    trace = SplitTrace(N, c, eps)
    outputs = []

    def process(inst, parent, branch):
        node = TraceNode(len(trace.nodes), parent, branch)
        trace.nodes.append(node)
        if len(trace.nodes) > node_cap:
            raise ResourceLimitError("split recursion exceeded node cap")
        if not is_nontrivial(inst):
            node.dropped = True
            return
        refined = make_M_consistent(inst, M)
        if not is_nontrivial(refined):
            node.dropped = True
            return
        family, index = enumerate_M_small(refined, M)
        stats = pair_stats(family)
        if record_weights:
            node.family = frozenset(family)
            node.weight_product = _weight_product(family, stats)
        verdict, witness = is_uniform(refined, N, c, eps, family=family,
                                      stats=stats)
        if verdict:
            node.emitted_index = len(outputs)
            outputs.append(refined)
            return
        A, B = witness
        node.split_pair = (A, B)
        avars = sorted(A)
        positions = [avars.index(v) for v in sorted(B)]
        counts = {}
        for t in family[A]:
            key = tuple(t[i] for i in positions)
            counts[key] = counts.get(key, 0) + 1
        nA, nB = len(family[A]), len(family[B])
        small, large = set(), set()
        for t in family[B]:
            cnt = counts.get(t, 0)
            # cnt <= sqrt(N^eps) |sol(A)| / |sol(B)|, ties to the small side
            if (cnt * nB) ** (2 * q) <= N ** p * nA ** (2 * q):
                small.add(t)
            else:
                large.add(t)
        node.split_sizes = (nA, nB, len(small), len(large))
        scope = tuple(sorted(B))
        process(refined.with_constraint(scope, small), node.node_id, "small")
        process(refined.with_constraint(scope, large), node.node_id, "large")

    process(I, -1, "root")
    return outputs, trace


def build_submodular_from_uniform(I, N, c, H=None, verify=True):
    """Oracle b(S) built from solution counts of a uniform consistent
    nontrivial instance; edge-dominated for the target hypergraph H,
    monotone and submodular.

    b(S) = (1-eps) log_N |sol(S)| + 2 eps^2 |S| - eps^3 |S|^2 on N^c-small
    sets (eps = 1/|V|) and the log term is replaced by c otherwise.
    """
    H = H or I.hypergraph()
    n = len(I.variables)
    if n < 2:
        raise DomainError("needs at least two variables")
    if N < 2:
        raise DomainError("needs N >= 2 (callers solve N <= 1 directly)")
    c = Fraction(c)
    if c < 1:
        raise DomainError("needs c >= 1")
    eps = Fraction(1, n)
    M = PowerBound(N, c)
    family, index = enumerate_M_small(I, M)
    if verify:
        if not is_nontrivial(I):
            raise DomainError("instance is trivial")
        if make_M_consistent(I, M) != I:
            raise DomainError("instance is not N^c-consistent")
        ok, witness = is_uniform(I, N, c, eps ** 3, family=family)
        if not ok:
            raise DomainError(f"instance is not uniform enough: {witness}")
        for e in H.edges:
            if frozenset(e) not in family or not M.holds(len(index.sol(frozenset(e)))):
                raise DomainError("edge not small in the instance")
            if len(index.sol(frozenset(e))) > N:
                raise DomainError(f"edge {sorted(e)} has more than N solutions")

    a = 1 - eps

    def evaluator(S):
        S = frozenset(S)
        k = len(S)
        h = 2 * eps ** 2 * k - eps ** 3 * k ** 2
        if S in family:
            cnt = len(family[S])
            if cnt < 1:
                raise DomainError("empty solution set on a small set")
            return LogLinValue(a, N, cnt, h)
        return LogLinValue(a, N, 1, a * c + h)

    return SetFunctionOracle(H, evaluator, kind="log-solutions")


@dataclass
class SolveResult:
    verdict: str  # 'SAT' | 'UNSAT'
    assignment: dict = None
    pieces: int = None          # number of uniform instances produced
    trace: SplitTrace = None
    decomposition: object = None
    method: str = "uniform-split"

    @property
    def satisfiable(self):
        return self.verdict == "SAT"


def solve_fpt(I, c0, node_cap=SPLIT_NODE_CAP):
    """Decide satisfiability with a verified witness on SAT.

    c0 must upper-bound the submodular width of the instance hypergraph
    (the fractional hypertree width always does); if the bound turns out
    wrong the solver reports it instead of answering.
    """
    c0 = Fraction(c0)
    n = len(I.variables)
    N = I.max_relation_size()
    if N == 0:
        return SolveResult("UNSAT", method="empty-relation")
    if N is None:
        if not I.domain and I.variables:
            return SolveResult("UNSAT", method="empty-domain")
        assignment = {v: I.domain[0] for v in I.variables}
        return SolveResult("SAT", assignment=assignment, method="unconstrained")
    if n <= 1 or N == 1:
        got = brute_force_solve(I)
        if got is None:
            return SolveResult("UNSAT", method="direct")
        return SolveResult("SAT", assignment=got, method="direct")

    eps = Fraction(1, n)
    c = max(Fraction(1), c0 / (1 - eps))
    outputs, trace = split_uniform(I, N, c, eps ** 3, node_cap=node_cap,
                                   record_weights=False)
    if not outputs:
        return SolveResult("UNSAT", pieces=0, trace=trace)
    I1 = outputs[0]
    # decompose only the constrained part: unconstrained variables are
    # isolated hypergraph vertices and take any value
    full = I.hypergraph()
    from .hypergraph import induced_subhypergraph
    H = induced_subhypergraph(full, full.names_of(full.covered_mask()))
    b = build_submodular_from_uniform(I1, N, c, H=H)
    from .decomposition import min_f_width
    width_value, T = min_f_width(H, b)
    M = PowerBound(N, c)
    family, _ = enumerate_M_small(I1, M)
    for t in T.nodes:
        bag = frozenset(T.bags[t])
        if bag and bag not in family:
            raise BoundViolationError(
                f"bag {sorted(bag)} is not small in the uniform piece: the"
                f" supplied width bound {c0} does not hold", witness=bag)
    assignment = solve_with_decomposition(I, I1, T, M)
    if not satisfies(I, assignment):
        raise BoundViolationError("extension produced a non-solution")
    return SolveResult("SAT", assignment=assignment, pieces=len(outputs),
                       trace=trace, decomposition=T)
