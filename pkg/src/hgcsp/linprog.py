"""Exact rational linear programming via two-phase dense simplex.

Everything is computed over the rationals: no tolerances anywhere.  Bland's
rule makes the pivot sequence deterministic and cycle-free.  Solutions carry
both a primal and a dual vector; `verify_certificate` re-checks feasibility,
strong duality and complementary slackness from scratch.

Dual sign conventions (row i with relation ρ, duals y):
    maximize:  ρ='<=' → y_i >= 0,  ρ='>=' → y_i <= 0,  ρ='=' → free
    minimize:  ρ='<=' → y_i <= 0,  ρ='>=' → y_i >= 0,  ρ='=' → free
and for each variable j the dual constraint is sum_i y_i a_ij >= c_j
(maximize) resp. <= c_j (minimize), with equality when x_j is free.
"""

from dataclasses import dataclass
from fractions import Fraction

try:
    from gmpy2 import mpq as _q
except ImportError:  # pragma: no cover - gmpy2 is normally available
    _q = Fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

LE, GE, EQ = "<=", ">=", "="


@dataclass
class LinearProgram:
    maximize: bool
    objective: list
    rows: list  # (coeffs, relation, rhs)
    nonneg: list  # per-variable nonnegativity flag

    def __post_init__(self):
        nv = len(self.objective)
        if len(self.nonneg) != nv:
            raise ValueError("nonneg length mismatch")
        for coeffs, rel, _ in self.rows:
            if len(coeffs) != nv:
                raise ValueError("row length mismatch")
            if rel not in (LE, GE, EQ):
                raise ValueError(f"bad relation {rel!r}")

    @property
    def nvars(self):
        return len(self.objective)


@dataclass
class LpSolution:
    status: str
    primal: list = None
    dual: list = None
    objective: Fraction = None


def _frac(x):
    # force int-backed Fractions: mpz-backed ones confuse later gmpy2 coercions
    return Fraction(int(x.numerator), int(x.denominator))


class _Tableau:
    """Full-tableau simplex over exact rationals, maximization form."""

    def __init__(self, rows, rhs, ncols):
        self.rows = rows          # list of lists, length ncols each
        self.rhs = rhs
        self.ncols = ncols
        self.basis = [None] * len(rows)

    def pivot(self, r, c):
        row = self.rows[r]
        piv = row[c]
        inv = 1 / piv
        self.rows[r] = row = [x * inv for x in row]
        self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            factor = other[c]
            if factor:
                self.rows[i] = [a - factor * b for a, b in zip(other, row)]
                self.rhs[i] -= factor * self.rhs[r]
        self.basis[r] = c

    def reduce_cost(self, cost, value):
        """Reduce a raw cost row against the current basis; returns the
        objective value of the current basic solution."""
        for r, b in enumerate(self.basis):
            f = cost[b]
            if f:
                row = self.rows[r]
                for j in range(self.ncols):
                    if row[j]:
                        cost[j] -= f * row[j]
                value += f * self.rhs[r]
        return value

    def run(self, cost, value, allowed):
        """Bland-rule simplex; returns (status, value)."""
        while True:
            enter = -1
            for j in range(self.ncols):
                if allowed[j] and cost[j] > 0:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL, value
            leave, best = -1, None
            for r, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[r] / a
                    if best is None or ratio < best or (
                            ratio == best and self.basis[r] < self.basis[leave]):
                        best, leave = ratio, r
            if leave < 0:
                return UNBOUNDED, None
            f = cost[enter]
            self.pivot(leave, enter)
            row = self.rows[leave]
            for j in range(self.ncols):
                if row[j]:
                    cost[j] -= f * row[j]
            value += f * self.rhs[leave]


def solve(lp):
    """Exact optimum with primal and dual certificates (deterministic)."""
    zero, one = _q(0), _q(1)
    nv = lp.nvars

    # free variables are split as x = u - w
    col_of = []   # (orig var, sign) per structural column
    for j in range(nv):
        col_of.append((j, 1))
        if not lp.nonneg[j]:
            col_of.append((j, -1))
    nstruct = len(col_of)

    m = len(lp.rows)
    rowsign = [1] * m
    std_rows, std_rhs, rels = [], [], []
    for i, (coeffs, rel, rhs) in enumerate(lp.rows):
        coeffs = [_q(c) for c in coeffs]
        rhs = _q(rhs)
        if rhs < 0:
            coeffs = [-c for c in coeffs]
            rhs = -rhs
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
            rowsign[i] = -1
        std_rows.append([coeffs[j] * s for (j, s) in col_of])
        std_rhs.append(rhs)
        rels.append(rel)

    # slack / surplus columns, then artificials
    nslack = sum(1 for rel in rels if rel != EQ)
    slack_col = {}
    k = nstruct
    for i, rel in enumerate(rels):
        if rel != EQ:
            slack_col[i] = k
            k += 1
    art_rows = [i for i, rel in enumerate(rels) if rel != LE]
    art_col = {}
    for i in art_rows:
        art_col[i] = k
        k += 1
    ncols = k

    rows = []
    for i in range(m):
        row = std_rows[i] + [zero] * (ncols - nstruct)
        if i in slack_col:
            row[slack_col[i]] = one if rels[i] == LE else -one
        if i in art_col:
            row[art_col[i]] = one
        rows.append(row)
    tab = _Tableau(rows, list(std_rhs), ncols)
    for i in range(m):
        tab.basis[i] = art_col.get(i, slack_col.get(i))

    is_artificial = [False] * ncols
    for c in art_col.values():
        is_artificial[c] = True

    # phase 1: maximize -(sum of artificials)
    if art_col:
        cost = [(-one if is_artificial[j] else zero) for j in range(ncols)]
        value = tab.reduce_cost(cost, zero)
        allowed = [True] * ncols
        status, value = tab.run(cost, value, allowed)
        assert status == OPTIMAL
        if value != 0:
            return LpSolution(status=INFEASIBLE)
        _drive_out_artificials(tab, is_artificial)

    # phase 2
    obj = [_q(c) for c in lp.objective]
    if not lp.maximize:
        obj = [-c for c in obj]
    cost = [zero] * ncols
    for c, (j, s) in enumerate(col_of):
        cost[c] = obj[j] * s
    value = tab.reduce_cost(cost, zero)
    allowed = [not is_artificial[j] for j in range(ncols)]
    status, value = tab.run(cost, value, allowed)
    if status == UNBOUNDED:
        return LpSolution(status=UNBOUNDED)

    # primal values
    xcols = [zero] * ncols
    for r, b in enumerate(tab.basis):
        xcols[b] = tab.rhs[r]
    primal = [Fraction(0)] * nv
    for c, (j, s) in enumerate(col_of):
        primal[j] += _frac(xcols[c]) * s

    dual = _recover_dual(tab, cost_original=_phase2_costs(ncols, col_of, obj, zero),
                         std_rows=std_rows, slack_col=slack_col, rels=rels,
                         nstruct=nstruct, zero=zero, one=one)
    duals = [Fraction(0)] * m
    for i in range(m):
        duals[i] = _frac(dual[i]) * rowsign[i]
    objective = _frac(value)
    if not lp.maximize:
        objective = -objective
        duals = [-y for y in duals]
    return LpSolution(status=OPTIMAL, primal=primal, dual=duals, objective=objective)


def _phase2_costs(ncols, col_of, obj, zero):
    cost = [zero] * ncols
    for c, (j, s) in enumerate(col_of):
        cost[c] = obj[j] * s
    return cost


def _drive_out_artificials(tab, is_artificial):
    """Pivot zero-level artificials out of the basis; drop redundant rows."""
    keep = []
    for r in range(len(tab.rows)):
        b = tab.basis[r]
        if not is_artificial[b]:
            keep.append(r)
            continue
        piv = -1
        for j in range(tab.ncols):
            if not is_artificial[j] and tab.rows[r][j] != 0:
                piv = j
                break
        if piv >= 0:
            tab.pivot(r, piv)
            keep.append(r)
        # else: redundant row, drop it
    if len(keep) != len(tab.rows):
        tab.rows = [tab.rows[r] for r in keep]
        tab.rhs = [tab.rhs[r] for r in keep]
        tab.basis = [tab.basis[r] for r in keep]
        tab.dropped = True
    tab.kept_rows = keep


def _recover_dual(tab, cost_original, std_rows, slack_col, rels, nstruct, zero, one):
    """Solve B^T y = c_B over the surviving rows; dropped rows get y = 0."""
    kept = getattr(tab, "kept_rows", list(range(len(tab.rows))))
    k = len(kept)
    if k == 0:
        return [zero] * len(std_rows)
    # column vector (over kept rows) of each basis column of the standard matrix
    def std_column(c):
        col = []
        for i in kept:
            if c < nstruct:
                col.append(std_rows[i][c])
            elif c == slack_col.get(i):
                col.append(one if rels[i] == LE else -one)
            else:
                col.append(zero)
        return col

    # build B^T y = c_B and solve by exact Gaussian elimination
    mat = []
    for r in range(k):
        b = tab.basis[r]
        mat.append(std_column(b) + [cost_original[b]])
    n = k
    for col in range(n):
        piv = next(r for r in range(col, n) if mat[r][col] != 0)
        mat[col], mat[piv] = mat[piv], mat[col]
        inv = 1 / mat[col][col]
        mat[col] = [x * inv for x in mat[col]]
        for r in range(n):
            if r != col and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
    y_kept = [mat[r][n] for r in range(n)]
    y = [zero] * len(std_rows)
    for pos, i in enumerate(kept):
        y[i] = y_kept[pos]
    return y


def verify_certificate(lp, sol):
    """Exact re-check of an optimal solution; returns a report dict."""
    report = {"status": sol.status}
    if sol.status != OPTIMAL:
        return report
    x, y = sol.primal, sol.dual
    primal_ok = all(not (lp.nonneg[j] and x[j] < 0) for j in range(lp.nvars))
    cs_rows_ok = True
    dual_sign_ok = True
    for i, (coeffs, rel, rhs) in enumerate(lp.rows):
        lhs = sum(Fraction(c) * x[j] for j, c in enumerate(coeffs))
        rhs = Fraction(rhs)
        if rel == LE:
            primal_ok &= lhs <= rhs
            dual_sign_ok &= (y[i] >= 0) if lp.maximize else (y[i] <= 0)
        elif rel == GE:
            primal_ok &= lhs >= rhs
            dual_sign_ok &= (y[i] <= 0) if lp.maximize else (y[i] >= 0)
        else:
            primal_ok &= lhs == rhs
        cs_rows_ok &= (y[i] == 0) or (lhs == rhs)
    dual_feas_ok = True
    cs_cols_ok = True
    for j in range(lp.nvars):
        yaj = sum(y[i] * Fraction(lp.rows[i][0][j]) for i in range(len(lp.rows)))
        cj = Fraction(lp.objective[j])
        if lp.nonneg[j]:
            ok = (yaj >= cj) if lp.maximize else (yaj <= cj)
            dual_feas_ok &= ok
            cs_cols_ok &= (x[j] == 0) or (yaj == cj)
        else:
            dual_feas_ok &= yaj == cj
    primal_value = sum(Fraction(lp.objective[j]) * x[j] for j in range(lp.nvars))
    dual_value = sum(y[i] * Fraction(lp.rows[i][2]) for i in range(len(lp.rows)))
    report.update(
        primal_feasible=primal_ok,
        dual_feasible=dual_feas_ok and dual_sign_ok,
        objective_match=(primal_value == sol.objective),
        strong_duality=(primal_value == dual_value == sol.objective),
        complementary_slackness=(cs_rows_ok and cs_cols_ok),
    )
    report["ok"] = all(v for k, v in report.items() if k != "status")
    return report
