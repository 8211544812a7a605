"""Small-scale linear feasibility over variables boxed to [0,1].

One exact presolve feeds two back ends.  The presolve runs Gaussian
elimination on the equality rows in rational arithmetic, so inconsistency is
detected exactly and comes with a row-combination certificate that can be
re-verified by direct arithmetic.  Consistent systems drop to a phase-one
feasibility problem over the remaining free variables, solved either by an
exact simplex (Fractions, Bland's rule) or by scipy's HiGHS.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

EQ, LE, GE = "==", "<=", ">="


@dataclass(frozen=True)
class Row:
    coeffs: tuple[tuple[str, Fraction], ...]
    rel: str
    rhs: Fraction
    label: str = ""

    def coeff_map(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        return sum((c * Fraction(point[v]) for v, c in self.coeffs), Fraction(0))


def make_row(coeffs: Mapping[str, object], rel: str, rhs, label: str = "") -> Row:
    if rel not in (EQ, LE, GE):
        raise ValueError(f"bad relation {rel!r}")
    cleaned = tuple(
        sorted((v, Fraction(c)) for v, c in coeffs.items() if Fraction(c) != 0)
    )
    return Row(cleaned, rel, Fraction(rhs), label)


@dataclass(frozen=True)
class Certificate:
    """Multipliers over the original equality rows combining to 0 = rhs != 0."""

    multipliers: tuple[tuple[int, Fraction], ...]
    combined_rhs: Fraction

    def verify(self, rows: Sequence[Row]) -> bool:
        total: dict[str, Fraction] = {}
        rhs = Fraction(0)
        for idx, mult in self.multipliers:
            row = rows[idx]
            if row.rel != EQ:
                return False
            for v, c in row.coeffs:
                total[v] = total.get(v, Fraction(0)) + mult * c
            rhs += mult * row.rhs
        return all(c == 0 for c in total.values()) and rhs != 0 and rhs == self.combined_rhs


@dataclass
class FeasibilityResult:
    feasible: bool
    point: dict[str, Fraction] | dict[str, float] | None = None
    certificate: Certificate | None = None
    detail: str = ""


def _presolve(variables: Sequence[str], rows: Sequence[Row]):
    """Exact elimination of the equality rows, tracking row combinations.

    Returns (pivots, var_index, certificate); pivots maps a variable index to
    (expression over free variable indices, constant, row combination), and a
    certificate replaces both when the equalities are inconsistent.
    """
    var_index = {v: i for i, v in enumerate(variables)}
    pivots: dict[int, tuple[dict[int, Fraction], Fraction, dict[int, Fraction]]] = {}
    for i, row in enumerate(rows):
        if row.rel != EQ:
            continue
        coeffs: dict[int, Fraction] = {}
        for v, c in row.coeffs:
            coeffs[var_index[v]] = coeffs.get(var_index[v], Fraction(0)) + c
        rhs = row.rhs
        combo = {i: Fraction(1)}
        for p in sorted(set(coeffs) & set(pivots)):
            factor = coeffs.pop(p)
            expr, prhs, pcombo = pivots[p]
            for v, c in expr.items():
                coeffs[v] = coeffs.get(v, Fraction(0)) + factor * c
            rhs -= factor * prhs
            for r, m in pcombo.items():
                combo[r] = combo.get(r, Fraction(0)) - factor * m
        coeffs = {v: c for v, c in coeffs.items() if c != 0}
        combo = {r: m for r, m in combo.items() if m != 0}
        if not coeffs:
            if rhs != 0:
                return None, None, Certificate(tuple(sorted(combo.items())), rhs)
            continue
        p = min(coeffs)
        factor = coeffs.pop(p)
        expr = {v: -c / factor for v, c in coeffs.items()}
        prhs = rhs / factor
        pcombo = {r: m / factor for r, m in combo.items()}
        for q in list(pivots):
            qexpr, qrhs, qcombo = pivots[q]
            if p not in qexpr:
                continue
            f = qexpr.pop(p)
            for v, c in expr.items():
                qexpr[v] = qexpr.get(v, Fraction(0)) + f * c
            merged = dict(qcombo)
            for r, m in pcombo.items():
                merged[r] = merged.get(r, Fraction(0)) + f * m
            pivots[q] = (
                {v: c for v, c in qexpr.items() if c != 0},
                qrhs + f * prhs,
                {r: m for r, m in merged.items() if m != 0},
            )
        pivots[p] = (expr, prhs, pcombo)
    return pivots, var_index, None


def _substitute(row: Row, pivots, var_index) -> tuple[dict[int, Fraction], Fraction]:
    coeffs: dict[int, Fraction] = {}
    for v, c in row.coeffs:
        coeffs[var_index[v]] = coeffs.get(var_index[v], Fraction(0)) + c
    rhs = row.rhs
    for p in sorted(set(coeffs) & set(pivots)):
        factor = coeffs.pop(p)
        expr, prhs = pivots[p][0], pivots[p][1]
        for v, c in expr.items():
            coeffs[v] = coeffs.get(v, Fraction(0)) + factor * c
        rhs -= factor * prhs
    return {v: c for v, c in coeffs.items() if c != 0}, rhs


def _phase_one_simplex(ineqs, free_vars):
    """Exact feasibility of {A y <= b, 0 <= y <= 1} by phase-one simplex.

    Returns a point over the free variable indices or None.
    """
    order = sorted(free_vars)
    cols = {v: j for j, v in enumerate(order)}
    n = len(order)
    norm: list[tuple[list[Fraction], Fraction]] = []
    for coeffs, rhs in ineqs:
        vec = [Fraction(0)] * n
        for v, c in coeffs.items():
            vec[cols[v]] = c
        norm.append((vec, rhs))
    for j in range(n):  # upper bounds; lower bounds are nonnegativity
        vec = [Fraction(0)] * n
        vec[j] = Fraction(1)
        norm.append((vec, Fraction(1)))
    m = len(norm)
    if n == 0:
        return {} if all(rhs >= 0 for _, rhs in norm) else None
    flipped = [rhs < 0 for _, rhs in norm]
    art_rows = [i for i in range(m) if flipped[i]]
    k = len(art_rows)
    width = n + m + k
    art_col = {i: n + m + t for t, i in enumerate(art_rows)}
    tab: list[list[Fraction]] = []
    basis: list[int] = []
    for i, (vec, rhs) in enumerate(norm):
        row = vec + [Fraction(0)] * (m + k) + [rhs]
        row[n + i] = Fraction(1)
        if flipped[i]:
            row = [-c for c in row]
            row[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
        else:
            basis.append(n + i)
        tab.append(row)
    # objective row for w = sum of artificials, expressed over nonbasic columns
    obj = [Fraction(0)] * (width + 1)
    for i in art_rows:
        for j in range(width + 1):
            obj[j] -= tab[i][j]
    for i in art_rows:
        obj[art_col[i]] += Fraction(1)
    for _ in range(100_000):
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][width] / tab[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # pragma: no cover - w is bounded below by zero
            raise RuntimeError("phase-one simplex lost boundedness")
        _, r = best
        piv = tab[r][enter]
        tab[r] = [c / piv for c in tab[r]]
        for i in range(m):
            if i != r and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [c - f * p for c, p in zip(tab[i], tab[r])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [c - f * p for c, p in zip(obj, tab[r])]
        basis[r] = enter
    else:  # pragma: no cover
        raise RuntimeError("phase-one simplex did not terminate")
    if -obj[width] > 0:
        return None
    point = {v: Fraction(0) for v in order}
    for i, b in enumerate(basis):
        if b < n:
            point[order[b]] = tab[i][width]
    return point


def _float_phase(ineqs, free_vars, tol):
    from scipy.optimize import linprog

    order = sorted(free_vars)
    cols = {v: j for j, v in enumerate(order)}
    if not order:
        return {} if all(float(rhs) >= -tol for _, rhs in ineqs) else None
    a_ub, b_ub = [], []
    for coeffs, rhs in ineqs:
        vec = [0.0] * len(order)
        for v, c in coeffs.items():
            vec[cols[v]] = float(c)
        a_ub.append(vec)
        b_ub.append(float(rhs))
    res = linprog(
        c=[0.0] * len(order),
        A_ub=a_ub or None,
        b_ub=b_ub or None,
        bounds=[(0.0, 1.0)] * len(order),
        method="highs",
    )
    if not res.success:
        return None
    return {v: Fraction(float(res.x[cols[v]])).limit_denominator(10**12) for v in order}


def solve_feasibility(
    variables: Sequence[str],
    rows: Sequence[Row],
    exact: bool = True,
    tol: float = 1e-9,
) -> FeasibilityResult:
    """Decide feasibility of the rows with every variable boxed to [0,1]."""
    rows = list(rows)
    pivots, var_index, cert = _presolve(variables, rows)
    if cert is not None:
        if not cert.verify(rows):  # pragma: no cover - internal consistency
            raise RuntimeError("presolve produced an unverifiable certificate")
        return FeasibilityResult(False, None, cert, "equality rows are inconsistent")
    free_vars = [i for i in range(len(variables)) if i not in pivots]
    ineqs: list[tuple[dict[int, Fraction], Fraction]] = []
    for row in rows:
        if row.rel == EQ:
            continue
        coeffs, rhs = _substitute(row, pivots, var_index)
        if row.rel == GE:
            coeffs = {v: -c for v, c in coeffs.items()}
            rhs = -rhs
        if not coeffs:
            if rhs < 0:
                return FeasibilityResult(
                    False, None, None, f"row {row.label!r} reduces to 0 <= {rhs}"
                )
            continue
        ineqs.append((coeffs, rhs))
    for p, (expr, prhs, _combo) in pivots.items():
        ineqs.append(({v: -c for v, c in expr.items()}, prhs))  # pivot >= 0
        ineqs.append((dict(expr), Fraction(1) - prhs))  # pivot <= 1
    if exact:
        point_free = _phase_one_simplex(ineqs, free_vars)
    else:
        point_free = _float_phase(ineqs, free_vars, tol)
    if point_free is None:
        return FeasibilityResult(False, None, None, "bounded phase is infeasible")
    names = list(variables)
    point: dict[str, Fraction] = {names[v]: val for v, val in point_free.items()}
    for p, (expr, prhs, _combo) in pivots.items():
        point[names[p]] = prhs + sum(
            (c * point_free[v] for v, c in expr.items()), Fraction(0)
        )
    if not exact:
        return FeasibilityResult(True, {k: float(v) for k, v in point.items()}, None)
    return FeasibilityResult(True, point, None)


def check_point(rows: Sequence[Row], point: Mapping[str, object]) -> float:
    """Maximum constraint violation at the point; exactly 0.0 for rational
    points satisfying every row."""
    frac_point = {k: Fraction(v) if not isinstance(v, float) else Fraction(v).limit_denominator(10**15) for k, v in point.items()}
    worst = Fraction(0)
    for row in rows:
        val = row.evaluate(frac_point)
        gap = val - row.rhs
        if row.rel == EQ:
            worst = max(worst, abs(gap))
        elif row.rel == LE:
            worst = max(worst, max(Fraction(0), gap))
        else:
            worst = max(worst, max(Fraction(0), -gap))
    return float(worst)
