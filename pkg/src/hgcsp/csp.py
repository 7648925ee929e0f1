"""CSP instances over explicit relation tables.

Scopes are normalized to sorted variable order (columns permuted to match),
two constraints never share a scope set (they are merged by intersecting
their relations), and instances are immutable: every operation returns a
new instance.  Thresholds for "small" sets accept either an integer M or
an exact rational power N^(p/q) via PowerBound, compared in integer form.
"""

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ResourceLimitError
from .hypergraph import Hypergraph

DEFAULT_ENUM_CAP = 2_000_000


class PowerBound:
    """The threshold N**(p/q); `holds(k)` decides k <= N**(p/q) exactly."""

    def __init__(self, N, exponent=1):
        exponent = Fraction(exponent)
        if N < 1 or exponent < 0:
            raise DomainError("PowerBound needs N >= 1 and exponent >= 0")
        self.N = int(N)
        self.exponent = exponent

    def holds(self, count):
        p, q = self.exponent.numerator, self.exponent.denominator
        return count ** q <= self.N ** p

    def floor(self):
        """Largest integer k with k <= N**(p/q)."""
        p, q = self.exponent.numerator, self.exponent.denominator
        target = self.N ** p
        lo, hi = 0, max(2, self.N ** (p // q + 1) + 1)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if mid ** q <= target:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def __repr__(self):
        return f"PowerBound({self.N}^{self.exponent})"


def as_bound(M):
    if isinstance(M, PowerBound):
        return M
    M = int(M)
    if M < 1:
        raise DomainError("M must be at least 1")
    return PowerBound(M, 1)


class CspInstance:
    """Variables, named domain values, and constraints as relation tables."""

    __slots__ = ("variables", "domain", "constraints", "_by_scope")

    def __init__(self, variables, domain, constraints):
        self.variables = tuple(sorted(set(variables)))
        self.domain = tuple(sorted(set(domain)))
        vset, dset = set(self.variables), set(self.domain)
        merged = {}
        for scope, relation in constraints:
            scope = tuple(scope)
            if not scope:
                raise DomainError("empty constraint scope")
            if len(set(scope)) != len(scope):
                raise DomainError(f"repeated variable in scope {scope}")
            for v in scope:
                if v not in vset:
                    raise DomainError(f"unknown variable {v!r}")
            order = sorted(range(len(scope)), key=lambda i: scope[i])
            sscope = tuple(scope[i] for i in order)
            rel = set()
            for t in relation:
                t = tuple(t)
                if len(t) != len(scope):
                    raise DomainError("tuple arity mismatch")
                for val in t:
                    if val not in dset:
                        raise DomainError(f"unknown domain value {val!r}")
                rel.add(tuple(t[i] for i in order))
            key = frozenset(sscope)
            if key in merged:
                merged[key] = (sscope, merged[key][1] & frozenset(rel))
            else:
                merged[key] = (sscope, frozenset(rel))
        self.constraints = tuple(merged[k] for k in sorted(merged, key=sorted))
        self._by_scope = {frozenset(s): r for s, r in self.constraints}

    def constrained_variables(self):
        out = set()
        for s, _ in self.constraints:
            out.update(s)
        return out

    def prune_domain(self):
        """Drop domain values appearing in no relation.

        Only safe when every variable is constrained; otherwise the full
        domain stays available to unconstrained variables and pruning
        would change the solution set.
        """
        if self.constrained_variables() != set(self.variables):
            return self
        used = set()
        for _, rel in self.constraints:
            for t in rel:
                used.update(t)
        if used == set(self.domain):
            return self
        return CspInstance(self.variables, used or set(self.domain),
                           [(s, r) for s, r in self.constraints])

    def hypergraph(self):
        return Hypergraph([s for s, _ in self.constraints],
                          vertices=self.variables)

    def with_constraint(self, scope, relation):
        return CspInstance(self.variables, self.domain,
                           list(self.constraints) + [(tuple(scope), relation)])

    def relation_on(self, scope_set):
        return self._by_scope.get(frozenset(scope_set))

    def is_refinement_of(self, other):
        """Every constraint of `other` has a same-scope constraint here
        with a subset relation."""
        if self.variables != other.variables or set(self.domain) > set(other.domain):
            return False
        for s, r in other.constraints:
            mine = self.relation_on(s)
            if mine is None or not mine <= r:
                return False
        return True

    def max_relation_size(self):
        return max((len(r) for _, r in self.constraints), default=None)

    def __eq__(self, other):
        return (isinstance(other, CspInstance)
                and self.variables == other.variables
                and self.domain == other.domain
                and self.constraints == other.constraints)

    def __hash__(self):
        return hash((self.variables, self.domain, self.constraints))

    def __repr__(self):
        return (f"CspInstance({len(self.variables)} vars, |D|={len(self.domain)},"
                f" {len(self.constraints)} constraints)")

    def to_text(self):
        lines = ["var " + " ".join(self.variables),
                 "domain " + " ".join(self.domain)]
        for scope, rel in self.constraints:
            lines.append("constraint " + " ".join(scope))
            for t in sorted(rel):
                lines.append("  " + " ".join(t))
            lines.append("end")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, prune=True):
        variables, domain, constraints = [], [], []
        scope, rel = None, None
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            toks = line.split()
            if scope is not None:
                if toks[0] == "end":
                    constraints.append((scope, rel))
                    scope, rel = None, None
                else:
                    rel.append(tuple(toks))
                continue
            if toks[0] == "var":
                variables.extend(toks[1:])
            elif toks[0] == "domain":
                domain.extend(toks[1:])
            elif toks[0] == "constraint":
                scope, rel = tuple(toks[1:]), []
            else:
                raise DomainError(f"bad line in CSP text: {raw!r}")
        if scope is not None:
            raise DomainError("unterminated constraint block")
        inst = cls(variables, domain, constraints)
        return inst.prune_domain() if prune else inst

    def to_json_dict(self):
        return {
            "variables": list(self.variables),
            "domain": list(self.domain),
            "constraints": [
                {"scope": list(s), "tuples": [list(t) for t in sorted(r)]}
                for s, r in self.constraints
            ],
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, d, prune=True):
        inst = cls(d["variables"], d["domain"],
                   [(tuple(c["scope"]), {tuple(t) for t in c["tuples"]})
                    for c in d["constraints"]])
        return inst.prune_domain() if prune else inst


@dataclass(frozen=True)
class SolutionSet:
    scope: tuple
    assignments: frozenset  # tuples aligned with scope

    def __len__(self):
        return len(self.assignments)

    def as_dicts(self):
        return [dict(zip(self.scope, t)) for t in sorted(self.assignments)]


class SolutionsIndex:
    """Cached enumerator of sol(S) for subsets S of the variables."""

    def __init__(self, instance, cap=DEFAULT_ENUM_CAP):
        self.instance = instance
        self.cap = cap
        self._sol = {frozenset(): frozenset({()})}
        self._proj = {}
        self._checker_cache = {}

    def _projected(self, ci, sub):
        """Relation of constraint ci projected to the subset sub of its scope."""
        key = (ci, sub)
        got = self._proj.get(key)
        if got is None:
            scope, rel = self.instance.constraints[ci]
            idxs = [i for i, v in enumerate(scope) if v in sub]
            got = frozenset(tuple(t[i] for i in idxs) for t in rel)
            self._proj[key] = got
        return got

    def _checkers(self, svars):
        """(positions, projected relation) pairs against sorted scope svars."""
        key = tuple(svars)
        got = self._checker_cache.get(key)
        if got is not None:
            return got
        sset = frozenset(svars)
        out = []
        for ci, (scope, _) in enumerate(self.instance.constraints):
            sub = frozenset(scope) & sset
            if not sub:
                continue
            positions = tuple(svars.index(v) for v in sorted(sub))
            out.append((positions, self._projected(ci, sub)))
        self._checker_cache[key] = out
        return out

    def sol(self, S):
        """All solutions of the instance projected to S."""
        S = frozenset(S)
        got = self._sol.get(S)
        if got is not None:
            return got
        svars = sorted(S)
        known = set(self.instance.variables)
        for v in svars:
            if v not in known:
                raise DomainError(f"unknown variable {v!r}")
        checkers = self._checkers(svars)
        by_last = [[] for _ in svars]
        for positions, rel in checkers:
            by_last[max(positions)].append((positions, rel))
        domain = self.instance.domain
        out = []
        budget = self.cap
        assignment = [None] * len(svars)

        def backtrack(i):
            nonlocal budget
            if i == len(svars):
                out.append(tuple(assignment))
                return
            for val in domain:
                assignment[i] = val
                ok = True
                for positions, rel in by_last[i]:
                    if tuple(assignment[p] for p in positions) not in rel:
                        ok = False
                        break
                if ok:
                    budget -= 1
                    if budget < 0:
                        raise ResourceLimitError("solution enumeration cap hit")
                    backtrack(i + 1)
            assignment[i] = None

        backtrack(0)
        got = frozenset(out)
        self._sol[S] = got
        return got

    def sol_extend(self, S, v):
        """sol(S + v) built from the cached sol(S), one value at a time."""
        S = frozenset(S)
        S2 = S | {v}
        got = self._sol.get(S2)
        if got is not None:
            return got
        base = self.sol(S)
        svars2 = sorted(S2)
        pos_v = svars2.index(v)
        base_positions = [svars2.index(u) for u in sorted(S)]
        checkers = [(positions, rel) for positions, rel in self._checkers(svars2)
                    if pos_v in positions]
        out = set()
        for t in base:
            for val in self.instance.domain:
                cand = [None] * len(svars2)
                for p, x in zip(base_positions, t):
                    cand[p] = x
                cand[pos_v] = val
                cand = tuple(cand)
                if all(tuple(cand[p] for p in positions) in rel
                       for positions, rel in checkers):
                    out.add(cand)
        got = frozenset(out)
        self._sol[S2] = got
        return got


def project_instance(I, subset):
    """Projection: constraints meeting the subset, projected coordinatewise."""
    subset = frozenset(subset)
    if not subset:
        raise DomainError("cannot project to the empty variable set")
    if not subset <= set(I.variables):
        raise DomainError("projection target has unknown variables")
    constraints = []
    for scope, rel in I.constraints:
        idxs = [i for i, v in enumerate(scope) if v in subset]
        if not idxs:
            continue
        constraints.append((tuple(scope[i] for i in idxs),
                            {tuple(t[i] for i in idxs) for t in rel}))
    return CspInstance(subset, I.domain, constraints)


def solutions(I, S, cap=DEFAULT_ENUM_CAP, index=None):
    """sol_I(S): the solution set of the projection of I to S."""
    S = frozenset(S)
    if not S:
        return SolutionSet((), frozenset({()}))
    if not S <= set(I.variables):
        raise DomainError("S has unknown variables")
    index = index or SolutionsIndex(I, cap=cap)
    return SolutionSet(tuple(sorted(S)), index.sol(S))


def enumerate_M_small(I, M, index=None, cap=DEFAULT_ENUM_CAP):
    """All M-small sets with their solution sets, built levelwise.

    S is M-small iff every subset S' of S has at most M solutions; the
    empty set is always M-small.  Returns (family dict, index) where the
    family maps each M-small frozenset to its solution set.
    """
    M = as_bound(M)
    index = index or SolutionsIndex(I, cap=cap)
    family = {frozenset(): index.sol(frozenset())}
    level = [frozenset()]
    variables = I.variables
    while level:
        nxt = []
        for S in level:
            start = max(S) if S else ""
            for v in variables:
                if v <= start and S:
                    continue
                if v in S:
                    continue
                S2 = S | {v}
                if S2 in family:
                    continue
                if any(S2 - {u} not in family for u in S2):
                    continue
                cnt = index.sol_extend(S, v)
                if M.holds(len(cnt)):
                    family[S2] = cnt
                    nxt.append(S2)
        level = nxt
    return family, index


def pair_stats(family):
    """Per pair (A, B) with B a proper subset of A (both in the family):
    (max extension count, distinct projection count), from one pass over
    each solution set.  The B = empty-set pair is included."""
    stats = {}
    members = sorted(family, key=lambda S: (len(S), sorted(S)))
    for A in members:
        solA = family[A]
        if not A:
            continue
        avars = sorted(A)
        for B in members:
            if not B < A:
                continue
            positions = [avars.index(v) for v in sorted(B)]
            counts = {}
            for t in solA:
                key = tuple(t[i] for i in positions)
                counts[key] = counts.get(key, 0) + 1
            stats[(A, B)] = (max(counts.values(), default=0), len(counts))
    return stats


def is_nontrivial(I, index=None):
    """Every single variable admits at least one value."""
    if not I.variables:
        return True
    if not I.domain:
        return False
    index = index or SolutionsIndex(I)
    return all(index.sol(frozenset({v})) for v in I.variables)


def make_M_consistent(I, M, cap=DEFAULT_ENUM_CAP):
    """Refine I (same solutions on V) until, on M-small sets, every partial
    solution extends: sol(B) = pr_B sol(A) for M-small B inside A.

    Violating pairs are fixed in batches: within one round every violated
    B gets the projected relation of a witnessing superset (safe even
    against the then-stale family: projections only over-approximate, so
    no solution of I is ever lost and progress is still strict).
    """
    M = as_bound(M)
    nvars = len(I.variables)
    max_rounds = (1 << nvars) * (M.floor() + 1) + 1
    cur = I
    for _ in range(max_rounds):
        family, index = enumerate_M_small(cur, M, cap=cap)
        stats = pair_stats(family)
        fixes = {}
        for (A, B), (_, distinct) in sorted(
                stats.items(), key=lambda kv: (sorted(kv[0][0]), sorted(kv[0][1]))):
            if not B or B in fixes:
                continue
            if distinct < len(family[B]):
                avars = sorted(A)
                positions = [avars.index(v) for v in sorted(B)]
                fixes[B] = frozenset(tuple(t[i] for i in positions)
                                     for t in family[A])
        if not fixes:
            return cur
        for B, projected in sorted(fixes.items(), key=lambda kv: sorted(kv[0])):
            cur = cur.with_constraint(tuple(sorted(B)), projected)
    raise ResourceLimitError("consistency loop exceeded its bound")


def solve_with_decomposition(I, Iref, T, M, cap=DEFAULT_ENUM_CAP):
    """Extend a bag solution of the refinement along the decomposition into
    a full verified solution of I.

    All preconditions are verified first: Iref must be an M-consistent
    nontrivial refinement of I and every bag of T must be M-small in Iref.
    """
    M = as_bound(M)
    problems = []
    if not Iref.is_refinement_of(I):
        problems.append("second instance is not a refinement of the first")
    consistent = make_M_consistent(Iref, M, cap=cap)
    if consistent != Iref:
        problems.append("refinement is not M-consistent")
    if not is_nontrivial(Iref):
        problems.append("refinement is trivial")
    family, index = enumerate_M_small(Iref, M, cap=cap)
    for t in T.bags:
        if T.bags[t] and frozenset(T.bags[t]) not in family:
            problems.append(f"bag {t} is not M-small in the refinement")
    from .decomposition import validate_decomposition
    ok, violations = validate_decomposition(I.hypergraph(), T)
    if not ok:
        problems.extend(violations)
    if problems:
        raise DomainError("; ".join(problems))

    assignment = {}

    def place(t, g):
        bag = sorted(T.bags[t])
        for v, val in zip(bag, g):
            assignment[v] = val
        for c in T.children(t):
            cbag = sorted(T.bags[c])
            fixed = {v: assignment[v] for v in cbag if v in assignment}
            chosen = None
            for cand in sorted(index.sol(frozenset(cbag))):
                if all(cand[i] == fixed[v] for i, v in enumerate(cbag) if v in fixed):
                    chosen = cand
                    break
            if chosen is None:
                raise DomainError("bag solution does not extend: preconditions lied")
            place(c, chosen)

    root = T.root()
    root_bag = frozenset(T.bags[root])
    root_solutions = sorted(index.sol(root_bag))
    if not root_solutions:
        raise DomainError("root bag has no solutions despite preconditions")
    place(root, root_solutions[0])

    for v in I.variables:
        if v not in assignment:
            assignment[v] = I.domain[0]
    _verify(I, assignment)
    return assignment


def _verify(I, assignment):
    for scope, rel in I.constraints:
        if tuple(assignment[v] for v in scope) not in rel:
            raise DomainError(f"assignment violates constraint on {scope}")


def satisfies(I, assignment):
    try:
        _verify(I, assignment)
        return True
    except DomainError:
        return False


def brute_force_solve(I, cap=DEFAULT_ENUM_CAP):
    """Exhaustive lexicographic search; the canonical first solution or None."""
    if not I.domain and I.variables:
        return None
    svars = list(I.variables)
    by_last = [[] for _ in svars]
    pos = {v: i for i, v in enumerate(svars)}
    for scope, rel in I.constraints:
        positions = tuple(pos[v] for v in scope)
        by_last[max(positions)].append((positions, rel))
    budget = cap
    assignment = [None] * len(svars)

    def backtrack(i):
        nonlocal budget
        if i == len(svars):
            return dict(zip(svars, assignment))
        for val in I.domain:
            assignment[i] = val
            if all(tuple(assignment[p] for p in positions) in rel
                   for positions, rel in by_last[i]):
                budget -= 1
                if budget < 0:
                    raise ResourceLimitError("brute force cap hit")
                found = backtrack(i + 1)
                if found is not None:
                    return found
        assignment[i] = None
        return None

    return backtrack(0)
