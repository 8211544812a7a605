"""Non-deterministic matrices: finite and interval-valued truth tables whose
cells are sets of values, with the legality, validity, consequence, adequacy,
and refinement/expansion machinery built on top of them.

A matrix interprets each connective by a function from value tuples to
non-empty value sets; a *dynamic* valuation picks one member per compound
formula, a *static* one additionally agrees on same-connective compounds with
equal component values.  Deterministic matrices (all cells singletons) make
the two notions coincide.

Interval matrices over V = [0,1] interpret the binary connectives by cases on
a binary relation between the denoted propositions (orthogonal or not), so
legality checks for them need a relation oracle supplied by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .formulas import And, Atom, Formula, Not, Or, children, render, subformula_closure
from .valuesets import (
    MEMBERSHIP_TOL,
    OPEN_SHIFT,
    FiniteValues,
    IntervalUnion,
    ValueSet,
    finite,
    interval,
    interval_union,
    point,
)

BINARY_CONNECTIVES = ("and", "or", "imp")
CONNECTIVE_ARITY = {"not": 1, "and": 2, "or": 2, "imp": 2}

# Relation cases for interval-matrix binary tables.
ORTHOGONAL = "orthogonal"
NON_ORTHOGONAL = "non_orthogonal"
AMBIGUOUS = "ambiguous"

# Input cases for interval-matrix negation tables.
DESIGNATED = "designated"
UNDESIGNATED = "undesignated"
ANY = "any"

# Binary interval tables may alternatively split by input designation
# (first character for the left input, second for the right).
DESIGNATION_CASES = ("dd", "du", "ud", "uu")


def _designation_pattern(case: str) -> tuple[bool, bool] | None:
    if case in DESIGNATION_CASES:
        return (case[0] == "d", case[1] == "d")
    return None


class RelationOracle:
    """Decides the relation case between the propositions denoted by two formulas."""

    def classify(self, left: Formula, right: Formula) -> str:  # pragma: no cover
        raise NotImplementedError


# ---------------------------------------------------------------------------
# finite matrices


@dataclass(frozen=True)
class FiniteNMatrix:
    """Finite truth-value domain, designated subset, and set-valued tables."""

    values: tuple[str, ...]
    designated: frozenset[str]
    tables: Mapping[str, Mapping[tuple[str, ...], FiniteValues]]
    name: str = ""

    def __post_init__(self):
        vset = set(self.values)
        if len(self.values) != len(vset):
            raise ValueError("duplicate truth values")
        if not self.designated or not self.designated < vset:
            raise ValueError("designated values must be a non-empty proper subset")
        for conn, table in self.tables.items():
            arity = CONNECTIVE_ARITY.get(conn)
            if arity is None:
                raise ValueError(f"unknown connective {conn!r}")
            want = len(self.values) ** arity
            if len(table) != want:
                raise ValueError(f"table for {conn!r} has {len(table)} cells, expected {want}")
            for key, cell in table.items():
                if len(key) != arity or any(v not in vset for v in key):
                    raise ValueError(f"bad key {key!r} in table for {conn!r}")
                if not cell.labels <= vset:
                    raise ValueError(f"cell {conn}{key} leaves the value domain")

    def cell(self, conn: str, args: tuple[str, ...]) -> FiniteValues:
        return self.tables[conn][args]

    def is_designated(self, value: str) -> bool:
        return value in self.designated

    def cell_values_ordered(self, cell: FiniteValues) -> list[str]:
        order = {v: i for i, v in enumerate(self.values)}
        return sorted(cell.labels, key=order.__getitem__)

    def to_json(self) -> dict:
        return {
            "values": list(self.values),
            "designated": sorted(self.designated, key=self.values.index),
            "tables": {
                conn: {",".join(key): self.cell_values_ordered(cell) for key, cell in table.items()}
                for conn, table in self.tables.items()
            },
        }

    @staticmethod
    def from_json(obj: dict, name: str = "") -> "FiniteNMatrix":
        values = tuple(obj["values"])
        tables = {}
        for conn, table in obj["tables"].items():
            cells = {}
            for key, labels in table.items():
                parts = tuple(key.split(","))
                cells[parts] = finite(*labels)
            tables[conn] = cells
        return FiniteNMatrix(values, frozenset(obj["designated"]), tables, name)


def _table(values: Sequence[str], rows: Mapping[tuple[str, str], Iterable[str]]):
    return {key: finite(*labels) for key, labels in rows.items()}


def three_valued_matrix() -> FiniteNMatrix:
    """Three values {t, T, F}, designated {t}: the coarse image of the unit
    interval under certain / intermediate / impossible."""
    t, T, F = "t", "T", "F"
    or_rows = {
        (t, t): {t}, (t, T): {t}, (t, F): {t},
        (T, t): {t}, (T, T): {t, T}, (T, F): {t, T},
        (F, t): {t}, (F, T): {t, T}, (F, F): {t, T, F},
    }
    and_rows = {
        (t, t): {t, T, F}, (t, T): {F, T}, (t, F): {F},
        (T, t): {T, F}, (T, T): {T, F}, (T, F): {F},
        (F, t): {F}, (F, T): {F}, (F, F): {F},
    }
    not_rows = {(t,): {F}, (T,): {T}, (F,): {t}}
    return FiniteNMatrix(
        (t, T, F),
        frozenset({t}),
        {
            "or": _table((t, T, F), or_rows),
            "and": _table((t, T, F), and_rows),
            "not": _table((t, T, F), not_rows),
        },
        name="three-valued",
    )


def two_valued_matrix() -> FiniteNMatrix:
    """Two values {t, F}, designated {t}: the image of [0,1] under certain /
    not-certain."""
    t, F = "t", "F"
    or_rows = {(t, t): {t}, (t, F): {t}, (F, t): {t}, (F, F): {t, F}}
    and_rows = {(t, t): {t, F}, (t, F): {F}, (F, t): {F}, (F, F): {F}}
    not_rows = {(t,): finite(F), (F,): finite(t, F)}
    return FiniteNMatrix(
        (t, F),
        frozenset({t}),
        {"or": _table((t, F), or_rows), "and": _table((t, F), and_rows), "not": not_rows},
        name="two-valued",
    )


def classical_matrix() -> FiniteNMatrix:
    """Deterministic two-valued matrix with the classical truth tables."""
    t, F = "t", "F"
    or_rows = {(t, t): {t}, (t, F): {t}, (F, t): {t}, (F, F): {F}}
    and_rows = {(t, t): {t}, (t, F): {F}, (F, t): {F}, (F, F): {F}}
    not_rows = {(t,): finite(F), (F,): finite(t)}
    return FiniteNMatrix(
        (t, F),
        frozenset({t}),
        {"or": _table((t, F), or_rows), "and": _table((t, F), and_rows), "not": not_rows},
        name="classical",
    )


def is_deterministic(m: FiniteNMatrix) -> bool:
    return all(len(cell.labels) == 1 for table in m.tables.values() for cell in table.values())


# ---------------------------------------------------------------------------
# interval matrices


@dataclass(frozen=True)
class IntervalRule:
    """One table case: inputs in [0,1] to a closed subinterval of [0,1].

    ``lo`` and ``hi`` must be continuous and monotone in each argument, so
    the exact union of outputs over a box of inputs is the interval spanned
    by the corner evaluations.
    """

    arity: int
    lo: Callable[..., float]
    hi: Callable[..., float]
    description: str

    def value_set(self, *args: float) -> IntervalUnion:
        lo, hi = self.lo(*args), self.hi(*args)
        if hi < lo:
            raise ValueError(f"rule '{self.description}' is empty at {args}")
        return interval(max(0.0, lo), min(1.0, hi))

    def hull(self, *boxes: tuple[float, float]) -> tuple[float, float]:
        """Exact union of outputs when each input ranges over its box."""
        if len(boxes) != self.arity:
            raise ValueError(f"rule has arity {self.arity}, got {len(boxes)} boxes")
        corners = [()]
        for lo, hi in boxes:
            corners = [c + (x,) for c in corners for x in ((lo,) if lo == hi else (lo, hi))]
        los = [self.lo(*c) for c in corners]
        his = [self.hi(*c) for c in corners]
        return max(0.0, min(los)), min(1.0, max(his))


@dataclass(frozen=True)
class IntervalNMatrix:
    """Truth values V = [0,1] with designated set D = [alpha, 1] and
    case-split interval rules per connective."""

    alpha: float
    tables: Mapping[str, Mapping[str, IntervalRule]]
    name: str = ""

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")

    def is_designated(self, x: float, tol: float = MEMBERSHIP_TOL) -> bool:
        return x >= self.alpha - tol

    def designated_set(self) -> IntervalUnion:
        return interval(self.alpha, 1.0)

    def undesignated_set(self) -> IntervalUnion:
        return interval(0.0, max(0.0, self.alpha - OPEN_SHIFT))

    def negation_rule(self, a: float, tol: float = MEMBERSHIP_TOL) -> IntervalRule:
        cases = self.tables["not"]
        if ANY in cases:
            return cases[ANY]
        return cases[DESIGNATED if self.is_designated(a, tol) else UNDESIGNATED]

    def binary_rules(
        self, conn: str, case: str, a: float, b: float, tol: float = MEMBERSHIP_TOL
    ) -> list[IntervalRule]:
        """Rules applicable to inputs (a, b) under the given relation case.

        Tables keyed by relation use the case (both rules when ambiguous);
        tables keyed by input designation ignore the relation entirely.
        """
        cases = self.tables[conn]
        if ANY in cases:
            return [cases[ANY]]
        if ORTHOGONAL in cases or NON_ORTHOGONAL in cases:
            if case == AMBIGUOUS:
                return [cases[ORTHOGONAL], cases[NON_ORTHOGONAL]]
            return [cases[case]]
        key = ("d" if self.is_designated(a, tol) else "u") + (
            "d" if self.is_designated(b, tol) else "u"
        )
        return [cases[key]]

    def describe(self) -> dict:
        return {
            "name": self.name,
            "values": "[0,1]",
            "designated": f"[{self.alpha:g}, 1]",
            "tables": {
                conn: {case: rule.description for case, rule in table.items()}
                for conn, table in self.tables.items()
            },
        }


# ---------------------------------------------------------------------------
# valuations and legality


@dataclass(frozen=True)
class Valuation:
    """Assignment of values to a subformula-closed set of formulas."""

    values: Mapping[Formula, object]

    def __post_init__(self):
        for f in self.values:
            for c in children(f):
                if c not in self.values:
                    raise ValueError(
                        f"domain not closed under subformulas: {render(c)} missing "
                        f"(child of {render(f)})"
                    )

    def __getitem__(self, f: Formula):
        return self.values[f]

    def __contains__(self, f: Formula) -> bool:
        return f in self.values

    def domain(self) -> list[Formula]:
        return list(self.values)

    def items(self):
        return self.values.items()


@dataclass(frozen=True)
class LegalityViolation:
    formula: Formula
    value: object
    expected: ValueSet
    case: str | None = None

    def __str__(self):
        case = f" [{self.case}]" if self.case else ""
        return f"{render(self.formula)} = {self.value} not in {self.expected}{case}"


@dataclass(frozen=True)
class LegalityReport:
    violations: tuple[LegalityViolation, ...]
    ambiguous: tuple[tuple[Formula, Formula], ...]
    checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def _as_mapping(valuation) -> Mapping[Formula, object]:
    return valuation.values if isinstance(valuation, Valuation) else dict(valuation)


def is_dynamic_legal(
    valuation,
    matrix,
    oracle: RelationOracle | None = None,
    tol: float = MEMBERSHIP_TOL,
) -> LegalityReport:
    """Check membership of every compound's value in its interpretation set.

    Finite matrices need no oracle.  Interval matrices consult ``oracle`` for
    the relation case of each binary compound; borderline pairs are recorded
    as ambiguous and accepted if the value fits either case.
    """
    mapping = _as_mapping(valuation)
    Valuation(mapping)  # closure check
    violations: list[LegalityViolation] = []
    ambiguous: list[tuple[Formula, Formula]] = []
    checked = 0

    if isinstance(matrix, FiniteNMatrix):
        for f, v in mapping.items():
            if isinstance(f, Atom):
                if v not in matrix.values:
                    violations.append(LegalityViolation(f, v, finite(*matrix.values)))
                continue
            checked += 1
            if isinstance(f, Not):
                cell = matrix.cell("not", (mapping[f.child],))
            else:
                conn = "and" if isinstance(f, And) else "or"
                cell = matrix.cell(conn, (mapping[f.left], mapping[f.right]))
            if not cell.contains(v):
                violations.append(LegalityViolation(f, v, cell))
        return LegalityReport(tuple(violations), (), checked)

    if not isinstance(matrix, IntervalNMatrix):
        raise TypeError(f"unsupported matrix type {type(matrix).__name__}")

    unit = interval(0.0, 1.0)
    for f, v in mapping.items():
        if isinstance(f, Atom):
            if not unit.contains(float(v), tol):
                violations.append(LegalityViolation(f, v, unit))
            continue
        checked += 1
        if isinstance(f, Not):
            rule = matrix.negation_rule(float(mapping[f.child]), tol)
            cell = rule.value_set(float(mapping[f.child]))
            if not cell.contains(float(v), tol):
                violations.append(LegalityViolation(f, v, cell))
            continue
        if oracle is None:
            raise ValueError("interval matrices need a relation oracle for binary compounds")
        conn = "and" if isinstance(f, And) else "or"
        case = oracle.classify(f.left, f.right)
        if case == AMBIGUOUS:
            ambiguous.append((f.left, f.right))
        a, b = float(mapping[f.left]), float(mapping[f.right])
        rules = matrix.binary_rules(conn, case, a, b, tol)
        cells = [rule.value_set(a, b) for rule in rules]
        if not any(cell.contains(float(v), tol) for cell in cells):
            expected = interval_union([seg for cell in cells for seg in cell.segments])
            violations.append(LegalityViolation(f, v, expected, case))
    return LegalityReport(tuple(violations), tuple(ambiguous), checked)


@dataclass(frozen=True)
class StaticViolation:
    first: Formula
    second: Formula
    first_value: object
    second_value: object

    def __str__(self):
        return (
            f"{render(self.first)} = {self.first_value} but "
            f"{render(self.second)} = {self.second_value} with equal component values"
        )


@dataclass(frozen=True)
class StaticReport:
    violations: tuple[StaticViolation, ...]
    pairs_checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def _values_equal(x, y, tol: float) -> bool:
    if isinstance(x, str) or isinstance(y, str):
        return x == y
    return abs(float(x) - float(y)) <= tol


def is_static(valuation, matrix=None, tol: float = MEMBERSHIP_TOL) -> StaticReport:
    """Find same-connective compound pairs with equal component values but
    different values: witnesses against the composability principle."""
    mapping = _as_mapping(valuation)
    Valuation(mapping)
    groups: dict[type, list[Formula]] = {}
    for f in mapping:
        if not isinstance(f, Atom):
            groups.setdefault(type(f), []).append(f)
    violations = []
    pairs = 0
    for kind, formulas in groups.items():
        for i in range(len(formulas)):
            for j in range(i + 1, len(formulas)):
                f, g = formulas[i], formulas[j]
                fc, gc = children(f), children(g)
                if not all(_values_equal(mapping[a], mapping[b], tol) for a, b in zip(fc, gc)):
                    continue
                pairs += 1
                if not _values_equal(mapping[f], mapping[g], tol):
                    violations.append(StaticViolation(f, g, mapping[f], mapping[g]))
    return StaticReport(tuple(violations), pairs)


# ---------------------------------------------------------------------------
# enumeration, validity, consequence (finite matrices)


def _ordered_domain(formulas: Sequence[Formula]) -> list[Formula]:
    closure = subformula_closure(formulas)
    atoms = sorted((f for f in closure if isinstance(f, Atom)), key=lambda a: a.name)
    compounds = [f for f in closure if not isinstance(f, Atom)]
    return atoms + compounds


def enumerate_dynamic_valuations(
    m: FiniteNMatrix, formulas: Sequence[Formula]
) -> Iterator[Valuation]:
    """Yield exactly the legal dynamic valuations on the subformula closure.

    Atoms range over V in lexicographic name order; each compound ranges over
    its table cell in closure (children-first) order, so the enumeration is
    deterministic.
    """
    if not isinstance(m, FiniteNMatrix):
        raise TypeError("enumeration requires a finite matrix")
    domain = _ordered_domain(formulas)
    assignment: dict[Formula, str] = {}

    def options(f: Formula) -> list[str]:
        if isinstance(f, Atom):
            return list(m.values)
        if isinstance(f, Not):
            return m.cell_values_ordered(m.cell("not", (assignment[f.child],)))
        conn = "and" if isinstance(f, And) else "or"
        return m.cell_values_ordered(m.cell(conn, (assignment[f.left], assignment[f.right])))

    def rec(i: int) -> Iterator[Valuation]:
        if i == len(domain):
            yield Valuation(dict(assignment))
            return
        f = domain[i]
        for v in options(f):
            assignment[f] = v
            yield from rec(i + 1)
        assignment.pop(f, None)

    yield from rec(0)


@dataclass(frozen=True)
class ConsequenceResult:
    holds: bool
    countermodel: Valuation | None

    def __bool__(self) -> bool:
        return self.holds


def dynamic_consequence(
    m: FiniteNMatrix, gamma: Sequence[Formula], delta: Sequence[Formula]
) -> ConsequenceResult:
    """Does every dynamic model of gamma satisfy some member of delta?

    An empty delta reads literally: the sequent holds only when gamma has no
    dynamic model at all.  On failure the first countermodel in enumeration
    order is returned.
    """
    gamma, delta = list(gamma), list(delta)
    for v in enumerate_dynamic_valuations(m, gamma + delta):
        if all(m.is_designated(v[g]) for g in gamma):
            if not any(m.is_designated(v[d]) for d in delta):
                return ConsequenceResult(False, v)
    return ConsequenceResult(True, None)


def is_dynamically_valid(m: FiniteNMatrix, psi: Formula) -> bool:
    return dynamic_consequence(m, [], [psi]).holds


# ---------------------------------------------------------------------------
# adequacy

# Clause list for a matrix covering the positive fragment: per connective,
# the designation pattern of the inputs and the required side of the split.
# None in a pattern slot means the clause does not constrain that input.
_ADEQUACY_CLAUSES = {
    "and": (
        ((True, True), True, "designated inputs must stay designated"),
        ((False, None), False, "an undesignated left input forces undesignated output"),
        ((None, False), False, "an undesignated right input forces undesignated output"),
    ),
    "or": (
        ((True, None), True, "a designated left input forces designated output"),
        ((None, True), True, "a designated right input forces designated output"),
        ((False, False), False, "undesignated inputs must stay undesignated"),
    ),
    "imp": (
        ((False, None), True, "an undesignated antecedent forces designated output"),
        ((None, True), True, "a designated consequent forces designated output"),
        ((True, False), False, "designated antecedent with undesignated consequent forces undesignated output"),
    ),
}


@dataclass(frozen=True)
class ClauseViolation:
    connective: str
    clause: str
    witness: tuple
    cell: ValueSet
    case: str | None = None

    def __str__(self):
        case = f" [{self.case}]" if self.case else ""
        return f"{self.connective}{self.witness}{case}: cell {self.cell} breaks '{self.clause}'"


@dataclass(frozen=True)
class AdequacyReport:
    violations: tuple[ClauseViolation, ...]
    clauses_checked: int

    @property
    def adequate(self) -> bool:
        return not self.violations


def _finite_adequacy(m: FiniteNMatrix) -> AdequacyReport:
    violations = []
    checked = 0
    for conn, clauses in _ADEQUACY_CLAUSES.items():
        if conn not in m.tables:
            continue
        for pattern, target_designated, text in clauses:
            checked += 1
            for a in m.values:
                for b in m.values:
                    if pattern[0] is not None and m.is_designated(a) != pattern[0]:
                        continue
                    if pattern[1] is not None and m.is_designated(b) != pattern[1]:
                        continue
                    cell = m.cell(conn, (a, b))
                    good = (
                        all(m.is_designated(v) for v in cell.labels)
                        if target_designated
                        else not any(m.is_designated(v) for v in cell.labels)
                    )
                    if not good:
                        violations.append(ClauseViolation(conn, text, (a, b), cell))
    return AdequacyReport(tuple(violations), checked)


def _intersect_box(x: tuple[float, float], y: tuple[float, float]) -> tuple[float, float] | None:
    lo, hi = max(x[0], y[0]), min(x[1], y[1])
    return None if lo > hi else (lo, hi)


def _interval_adequacy(m: IntervalNMatrix) -> AdequacyReport:
    violations = []
    checked = 0
    regions = {
        True: (m.alpha, 1.0),
        False: (0.0, max(0.0, m.alpha - OPEN_SHIFT)),
        None: (0.0, 1.0),
    }
    d_set = m.designated_set()
    u_set = m.undesignated_set()
    for conn, clauses in _ADEQUACY_CLAUSES.items():
        if conn not in m.tables:
            continue
        for pattern, target_designated, text in clauses:
            target = d_set if target_designated else u_set
            for case, rule in sorted(m.tables[conn].items()):
                box_a, box_b = regions[pattern[0]], regions[pattern[1]]
                dpat = _designation_pattern(case)
                if dpat is not None:
                    box_a = _intersect_box(box_a, regions[dpat[0]])
                    box_b = _intersect_box(box_b, regions[dpat[1]])
                    if box_a is None or box_b is None:
                        continue
                checked += 1
                lo, hi = rule.hull(box_a, box_b)
                # exact comparison: hulls come from exact corner arithmetic,
                # and the half-open displacement must not be absorbed
                if interval(lo, hi).subset_of(target):
                    continue
                witness = _interval_witness(rule, box_a, box_b, target, m.alpha)
                if witness is None:
                    continue
                a, b = witness
                violations.append(
                    ClauseViolation(conn, text, (a, b), rule.value_set(a, b), case)
                )
    return AdequacyReport(tuple(violations), checked)


def _interval_witness(rule, box_a, box_b, target, alpha):
    """Concrete input pair whose output set escapes the target side.

    The half-threshold pair is tried first so that threshold-sum witnesses
    (the superposition case) are reported in their sharpest form.
    """
    candidates = [(alpha / 2.0, alpha / 2.0)]
    for a in (box_a[0], box_a[1], (box_a[0] + box_a[1]) / 2.0):
        for b in (box_b[0], box_b[1], (box_b[0] + box_b[1]) / 2.0):
            candidates.append((a, b))
    for a, b in candidates:
        if not (box_a[0] <= a <= box_a[1] and box_b[0] <= b <= box_b[1]):
            continue
        if not rule.value_set(a, b).subset_of(target):
            return (a, b)
    return None


def adequacy_check(m) -> AdequacyReport:
    """Check the designation-containment clauses for every defined connective.

    Finite tables are checked exhaustively over all value pairs; interval
    tables are checked per relation case by exact interval arithmetic over
    each clause's input region, with a concrete witness per violation.
    """
    if isinstance(m, FiniteNMatrix):
        return _finite_adequacy(m)
    if isinstance(m, IntervalNMatrix):
        return _interval_adequacy(m)
    raise TypeError(f"unsupported matrix type {type(m).__name__}")


# ---------------------------------------------------------------------------
# refinement / expansion / rexpansion


def is_refinement(m1: FiniteNMatrix, m2: FiniteNMatrix) -> bool:
    """V1 inside V2, designation induced, and every cell of m1 inside m2's."""
    if set(m1.tables) != set(m2.tables):
        raise ValueError("matrices interpret different connective sets")
    if not set(m1.values) <= set(m2.values):
        return False
    if m1.designated != m2.designated & set(m1.values):
        return False
    for conn, table in m1.tables.items():
        for key, cell in table.items():
            if not cell.subset_of(m2.cell(conn, key)):
                return False
    return True


def f_expansion(m1: FiniteNMatrix, images: Mapping[str, Sequence[str]]) -> FiniteNMatrix:
    """Duplicate truth values: each x becomes the copies images[x], each cell
    becomes the union of the copies of its members."""
    if set(images) != set(m1.values):
        raise ValueError("image map must cover exactly the value domain")
    seen: set[str] = set()
    for x, copies in images.items():
        copies = list(copies)
        if not copies:
            raise ValueError(f"image of {x!r} is empty")
        if seen & set(copies):
            raise ValueError(f"images overlap at {sorted(seen & set(copies))}")
        seen |= set(copies)
    new_values = tuple(y for x in m1.values for y in images[x])
    origin = {y: x for x in m1.values for y in images[x]}
    new_designated = frozenset(y for y in new_values if origin[y] in m1.designated)

    def expand_cell(cell: FiniteValues) -> FiniteValues:
        return finite(*(y for z in cell.labels for y in images[z]))

    tables = {}
    for conn, table in m1.tables.items():
        arity = CONNECTIVE_ARITY[conn]
        new_table = {}
        keys = [(y,) for y in new_values] if arity == 1 else [
            (y1, y2) for y1 in new_values for y2 in new_values
        ]
        for key in keys:
            base = tuple(origin[y] for y in key)
            new_table[key] = expand_cell(table[base])
        tables[conn] = new_table
    return FiniteNMatrix(new_values, new_designated, tables, name=f"{m1.name}-expanded")


@dataclass(frozen=True)
class ThresholdMap:
    """Total map [0,1] -> labels given by ordered pieces (first match wins).

    Pieces carry both a matching interval and the symbolic region used for
    exact case analysis (open pieces are shrunk by the closing displacement).
    """

    pieces: tuple[tuple[str, float, float], ...]

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("threshold map needs at least one piece")

    def label(self, x: float) -> str:
        for name, lo, hi in self.pieces:
            if lo - OPEN_SHIFT <= x <= hi + OPEN_SHIFT:
                return name
        raise ValueError(f"threshold map is partial: no piece matches {x}")

    def regions(self) -> list[tuple[str, tuple[float, float]]]:
        out = []
        taken: list[tuple[float, float]] = []
        for name, lo, hi in self.pieces:
            rlo, rhi = lo, hi
            # shrink away from the boundary of every earlier (higher-priority) piece
            for plo, phi in taken:
                if rlo <= phi and plo <= rhi:
                    if plo <= rlo:
                        rlo = max(rlo, phi + OPEN_SHIFT)
                    if phi >= rhi:
                        rhi = min(rhi, plo - OPEN_SHIFT)
            if rlo > rhi:
                raise ValueError(f"piece {name!r} has empty region after overlap removal")
            taken.append((lo, hi))
            out.append((name, (rlo, rhi)))
        return out

    def check_total(self) -> None:
        cover = interval_union([(lo, hi) for _, lo, hi in self.pieces])
        if not interval(0.0, 1.0).subset_of(cover, tol=2 * OPEN_SHIFT):
            raise ValueError("threshold map does not cover [0,1]")

    def to_json(self) -> dict:
        return {"pieces": [{"label": n, "lo": lo, "hi": hi} for n, lo, hi in self.pieces]}

    @staticmethod
    def from_json(obj: dict) -> "ThresholdMap":
        return ThresholdMap(
            tuple((p["label"], float(p["lo"]), float(p["hi"])) for p in obj["pieces"])
        )


@dataclass(frozen=True)
class RexpansionIssue:
    condition: int
    detail: str


@dataclass(frozen=True)
class RexpansionReport:
    issues: tuple[RexpansionIssue, ...]
    samples_run: int

    @property
    def ok(self) -> bool:
        return not self.issues


def _finite_rexpansion(m1: FiniteNMatrix, m2: FiniteNMatrix, f: Mapping[str, str]):
    issues = []
    missing = set(m2.values) - set(f)
    if missing:
        raise ValueError(f"collapse map is partial: missing {sorted(missing)}")
    for x in m2.values:
        if m2.is_designated(x) != m1.is_designated(f[x]):
            issues.append(
                RexpansionIssue(1, f"designation mismatch at {x!r}: f({x!r})={f[x]!r}")
            )
    for conn, table in m2.tables.items():
        for key, cell in table.items():
            base = tuple(f[x] for x in key)
            target = m1.cell(conn, base)
            for y in cell.labels:
                if not target.contains(f[y]):
                    issues.append(
                        RexpansionIssue(
                            2,
                            f"{conn}{key}: value {y!r} collapses to {f[y]!r} "
                            f"outside {conn}{base} = {target}",
                        )
                    )
    return issues


def _interval_rexpansion_symbolic(m1: FiniteNMatrix, m2: IntervalNMatrix, f: ThresholdMap):
    issues = []
    f.check_total()
    d2, u2 = m2.designated_set(), m2.undesignated_set()
    regions = f.regions()
    for name, box in regions:
        piece = interval(*box)
        if piece.intersects(d2) and not m1.is_designated(name):
            issues.append(
                RexpansionIssue(1, f"piece {name!r} meets the designated interval but maps out of D")
            )
        if piece.intersects(u2) and m1.is_designated(name):
            issues.append(
                RexpansionIssue(1, f"piece {name!r} meets the undesignated interval but maps into D")
            )
    dregions = {
        True: (m2.alpha, 1.0),
        False: (0.0, max(0.0, m2.alpha - OPEN_SHIFT)),
    }
    for conn, cases in m2.tables.items():
        arity = CONNECTIVE_ARITY[conn]
        for case, rule in sorted(cases.items()):
            if arity == 1:
                combos = [((na, ra),) for na, ra in regions]
                if case in (DESIGNATED, UNDESIGNATED):
                    cut = dregions[case == DESIGNATED]
                    combos = [
                        ((na, box),)
                        for (na, ra), in combos
                        if (box := _intersect_box(ra, cut)) is not None
                    ]
            else:
                combos = [((na, ra), (nb, rb)) for na, ra in regions for nb, rb in regions]
                dpat = _designation_pattern(case)
                if dpat is not None:
                    cut_a, cut_b = dregions[dpat[0]], dregions[dpat[1]]
                    combos = [
                        ((na, box_a), (nb, box_b))
                        for (na, ra), (nb, rb) in combos
                        if (box_a := _intersect_box(ra, cut_a)) is not None
                        and (box_b := _intersect_box(rb, cut_b)) is not None
                    ]
            for combo in combos:
                labels = tuple(name for name, _ in combo)
                boxes = tuple(box for _, box in combo)
                lo, hi = rule.hull(*boxes)
                target = m1.cell(conn, labels)
                out = interval(lo, hi)
                for yname, ybox in regions:
                    if not out.intersects(interval(*ybox)):
                        continue
                    if not target.contains(yname):
                        issues.append(
                            RexpansionIssue(
                                2,
                                f"{conn}[{case}] on pieces {labels}: outputs reach piece "
                                f"{yname!r} outside {conn}{labels} = {target}",
                            )
                        )
    return issues


def _interval_rexpansion_sampled(
    m1: FiniteNMatrix, m2: IntervalNMatrix, f: ThresholdMap, samples: int, seed: int
):
    issues = []
    rng = np.random.default_rng(seed)
    margin = 1e-6

    def draw() -> float:
        u = rng.random()
        if u < 0.2:
            return 0.0
        if u < 0.4:
            return 1.0
        return margin + (1.0 - 2.0 * margin) * rng.random()

    for _ in range(samples):
        a, b = draw(), draw()
        for conn, cases in m2.tables.items():
            arity = CONNECTIVE_ARITY[conn]
            for case, rule in sorted(cases.items()):
                args = (a,) if arity == 1 else (a, b)
                if arity == 1 and ANY not in cases:
                    want = DESIGNATED if m2.is_designated(a) else UNDESIGNATED
                    if case != want:
                        continue
                if _designation_pattern(case) is not None:
                    want = ("d" if m2.is_designated(a) else "u") + (
                        "d" if m2.is_designated(b) else "u"
                    )
                    if case != want:
                        continue
                vs = rule.value_set(*args)
                lo, hi = vs.lo, vs.hi
                ys = {lo, hi, lo + (hi - lo) * rng.random()}
                labels = tuple(f.label(x) for x in args)
                target = m1.cell(conn, labels)
                for y in ys:
                    if not target.contains(f.label(y)):
                        issues.append(
                            RexpansionIssue(
                                2,
                                f"sampled {conn}[{case}]{args}: y={y!r} maps to "
                                f"{f.label(y)!r} outside {target}",
                            )
                        )
                        if len(issues) > 20:
                            return issues
    return issues


def verify_rexpansion(
    m1: FiniteNMatrix,
    m2,
    f,
    samples: int = 10_000,
    seed: int = 0,
) -> RexpansionReport:
    """Check the collapse-map characterization of a rexpansion.

    Condition 1: a value of m2 is designated exactly when its image under f
    is.  Condition 2: every value a cell of m2 can take collapses into the
    corresponding cell of m1.  Finite m2 is checked exhaustively; interval m2
    symbolically per table case plus ``samples`` random numeric trials.
    """
    if isinstance(m2, FiniteNMatrix):
        issues = _finite_rexpansion(m1, m2, f)
        return RexpansionReport(tuple(issues), 0)
    if isinstance(m2, IntervalNMatrix):
        if not isinstance(f, ThresholdMap):
            raise ValueError("interval-domain collapse maps must be ThresholdMap instances")
        issues = _interval_rexpansion_symbolic(m1, m2, f)
        issues += _interval_rexpansion_sampled(m1, m2, f, samples, seed)
        return RexpansionReport(tuple(issues), samples)
    raise TypeError(f"unsupported matrix type {type(m2).__name__}")
