"""Finite orthomodular lattices as explicit order tables: verification of the
lattice laws, states via linear feasibility, two-valued valuation search, and
the interval truth tables over an arbitrary lattice.

Lattices come from three sources: direct order tables (JSON), Greechie
diagrams (blocks of mutually orthogonal atoms, pasted along shared atoms),
and finite fragments of a concrete projection lattice (auto-closed under the
lattice operations before verification).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import hilbert
from .feasibility import EQ, GE, LE, Certificate, FeasibilityResult, Row, check_point, make_row, solve_feasibility
from .formulas import And, Atom, Formula, Not, Or
from .linalg import tolerance
from .nmatrix import (
    ANY,
    NON_ORTHOGONAL,
    ORTHOGONAL,
    IntervalNMatrix,
    RelationOracle,
)
from .quantum import CAP_AND, DETERMINISTIC_NOT, ORTHOGONAL_AND, ORTHOGONAL_OR, SPAN_OR

#: Above this element count the state solver defaults to the float back end.
EXACT_SOLVER_LIMIT = 64


class FiniteOML:
    """Finite bounded poset with an orthocomplement, given by explicit tables.

    Construction performs no law checking; run :func:`verify_oml` to certify
    that the tables really describe an orthomodular lattice.
    """

    def __init__(self, elements: Sequence[str], leq_pairs: Iterable[tuple[str, str]],
                 ortho: Mapping[str, str], bottom: str, top: str):
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("duplicate element ids")
        self.index = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        self.leq = np.zeros((n, n), dtype=bool)
        np.fill_diagonal(self.leq, True)
        for a, b in leq_pairs:
            self.leq[self.index[a], self.index[b]] = True
        missing = set(self.elements) - set(ortho)
        if missing:
            raise ValueError(f"orthocomplement map misses {sorted(missing)}")
        self.ortho = np.array([self.index[ortho[e]] for e in self.elements])
        self.bottom = self.index[bottom]
        self.top = self.index[top]
        self._meet: np.ndarray | None = None
        self._join: np.ndarray | None = None

    # -- basic queries ------------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def name(self, i: int) -> str:
        return self.elements[i]

    def leq_ids(self, a: str, b: str) -> bool:
        return bool(self.leq[self.index[a], self.index[b]])

    def ortho_id(self, a: str) -> str:
        return self.elements[self.ortho[self.index[a]]]

    def orthogonal(self, a: str, b: str) -> bool:
        return bool(self.leq[self.index[a], self.ortho[self.index[b]]])

    def _bound_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """meet/join index tables; -1 marks a missing or non-unique bound."""
        if self._meet is not None:
            return self._meet, self._join
        n = len(self.elements)
        meet = -np.ones((n, n), dtype=int)
        join = -np.ones((n, n), dtype=int)
        for i in range(n):
            for j in range(i, n):
                lower = self.leq[:, i] & self.leq[:, j]
                cand = [z for z in np.flatnonzero(lower) if self.leq[lower, z].all()]
                if len(cand) == 1:
                    meet[i, j] = meet[j, i] = cand[0]
                upper = self.leq[i, :] & self.leq[j, :]
                cand = [z for z in np.flatnonzero(upper) if self.leq[z, upper].all()]
                if len(cand) == 1:
                    join[i, j] = join[j, i] = cand[0]
        self._meet, self._join = meet, join
        return meet, join

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        pairs = [
            [self.elements[i], self.elements[j]]
            for i in range(len(self.elements))
            for j in range(len(self.elements))
            if i != j and self.leq[i, j]
        ]
        return {
            "elements": list(self.elements),
            "leq": pairs,
            "ortho": {e: self.elements[self.ortho[self.index[e]]] for e in self.elements},
            "bottom": self.elements[self.bottom],
            "top": self.elements[self.top],
        }

    @staticmethod
    def from_json(obj: dict) -> "FiniteOML":
        return FiniteOML(
            obj["elements"],
            [tuple(p) for p in obj["leq"]],
            obj["ortho"],
            obj["bottom"],
            obj["top"],
        )


def meet_oml(l: FiniteOML, a: str, b: str) -> str:
    meet, _ = l._bound_tables()
    idx = meet[l.index[a], l.index[b]]
    if idx < 0:
        raise ValueError(f"meet of {a!r} and {b!r} does not exist or is not unique")
    return l.elements[idx]


def join_oml(l: FiniteOML, a: str, b: str) -> str:
    _, join = l._bound_tables()
    idx = join[l.index[a], l.index[b]]
    if idx < 0:
        raise ValueError(f"join of {a!r} and {b!r} does not exist or is not unique")
    return l.elements[idx]


@dataclass(frozen=True)
class OmlReport:
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_oml(l: FiniteOML, max_failures: int = 50) -> OmlReport:
    """Exhaustive check of the partial order, bound existence, the
    orthocomplement laws, and the orthomodular law."""
    failures: list[str] = []

    def fail(msg: str):
        if len(failures) < max_failures:
            failures.append(msg)

    n = len(l.elements)
    leq = l.leq
    if not leq.diagonal().all():
        fail("order is not reflexive")
    both = leq & leq.T
    for i, j in zip(*np.nonzero(both)):
        if i != j:
            fail(f"antisymmetry fails at ({l.name(i)}, {l.name(j)})")
    closure = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
    for i, j in zip(*np.nonzero(closure & ~leq)):
        fail(f"transitivity fails: {l.name(i)} <= ... <= {l.name(j)} but not directly")
    if not leq[l.bottom, :].all():
        fail("bottom is not below every element")
    if not leq[:, l.top].all():
        fail("top is not above every element")
    meet, join = l._bound_tables()
    for i in range(n):
        for j in range(i, n):
            if meet[i, j] < 0:
                fail(f"meet({l.name(i)}, {l.name(j)}) missing or not unique")
            if join[i, j] < 0:
                fail(f"join({l.name(i)}, {l.name(j)}) missing or not unique")
    if failures:
        return OmlReport(tuple(failures))
    for i in range(n):
        oi = l.ortho[i]
        if l.ortho[oi] != i:
            fail(f"orthocomplement not involutive at {l.name(i)}")
        if meet[i, oi] != l.bottom:
            fail(f"{l.name(i)} meet its complement is not bottom")
        if join[i, oi] != l.top:
            fail(f"{l.name(i)} join its complement is not top")
    for i in range(n):
        for j in range(n):
            if leq[i, j] and not leq[l.ortho[j], l.ortho[i]]:
                fail(f"orthocomplement not order-reversing at ({l.name(i)}, {l.name(j)})")
    for i in range(n):
        for j in range(n):
            if leq[i, j]:
                inner = meet[j, l.ortho[i]]
                if inner < 0 or join[i, inner] != j:
                    fail(
                        f"orthomodular law fails: {l.name(j)} != "
                        f"{l.name(i)} v ({l.name(j)} ^ {l.name(i)}')"
                    )
    return OmlReport(tuple(failures))


# ---------------------------------------------------------------------------
# constructions


def boolean_lattice(n_atoms: int) -> FiniteOML:
    """Boolean algebra 2^n over atoms a, b, c, ..."""
    letters = "abcdefgh"
    if not 1 <= n_atoms <= len(letters):
        raise ValueError(f"supported atom counts: 1..{len(letters)}")
    atoms = letters[:n_atoms]

    def name(s: frozenset) -> str:
        if not s:
            return "0"
        if len(s) == n_atoms:
            return "1"
        return "".join(sorted(s))

    subsets = [frozenset(c) for c in _powerset(atoms)]
    elements = [name(s) for s in subsets]
    pairs = [
        (name(s), name(t)) for s in subsets for t in subsets if s != t and s <= t
    ]
    ortho = {name(s): name(frozenset(atoms) - s) for s in subsets}
    return FiniteOML(elements, pairs, ortho, "0", "1")


def _powerset(items):
    items = list(items)
    for mask in range(1 << len(items)):
        yield [x for i, x in enumerate(items) if mask >> i & 1]


def mo2() -> FiniteOML:
    """Horizontal sum of two four-element Boolean algebras: the smallest
    orthomodular lattice that is not Boolean."""
    elements = ["0", "a", "a'", "b", "b'", "1"]
    pairs = [("0", e) for e in elements if e != "0"] + [
        (e, "1") for e in elements if e != "1"
    ]
    ortho = {"0": "1", "1": "0", "a": "a'", "a'": "a", "b": "b'", "b'": "b"}
    return FiniteOML(elements, pairs, ortho, "0", "1")


def chain_with_fixed_point() -> FiniteOML:
    """Three-element chain whose middle element is its own complement: fails
    the complement laws, useful as a negative fixture."""
    elements = ["0", "m", "1"]
    pairs = [("0", "m"), ("0", "1"), ("m", "1")]
    ortho = {"0": "1", "1": "0", "m": "m"}
    return FiniteOML(elements, pairs, ortho, "0", "1")


def from_greechie(atoms: Sequence[str], blocks: Sequence[Sequence[str]]) -> FiniteOML:
    """Paste Boolean blocks along shared atoms into one lattice.

    Each block lists mutually orthogonal atoms jointly spanning the top.  Two
    blocks may share at most one atom.  The result is an orthomodular lattice
    exactly when the diagram has no loops of order three or four; run
    :func:`verify_oml` on the output to certify.
    """
    atoms = list(atoms)
    if len(set(atoms)) != len(atoms):
        raise ValueError("duplicate atom names")
    blocks = [list(b) for b in blocks]
    for b in blocks:
        if len(b) < 3:
            raise ValueError(f"block {b} too small; need at least three atoms")
        if len(set(b)) != len(b):
            raise ValueError(f"block {b} repeats an atom")
        unknown = set(b) - set(atoms)
        if unknown:
            raise ValueError(f"block {b} uses undeclared atoms {sorted(unknown)}")
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            shared = set(blocks[i]) & set(blocks[j])
            if len(shared) > 1:
                raise ValueError(f"blocks {i} and {j} share more than one atom: {sorted(shared)}")
    in_blocks = {a: [b for b in blocks if a in b] for a in atoms}
    for a, bs in in_blocks.items():
        if not bs:
            raise ValueError(f"atom {a!r} appears in no block")

    all_atoms = frozenset(atoms)
    atom_sets: dict[str, frozenset] = {"0": frozenset(), "1": all_atoms}
    ortho_map: dict[str, str] = {"0": "1", "1": "0"}
    for a in atoms:
        atom_sets[a] = frozenset([a])
        mates = frozenset(x for b in in_blocks[a] for x in b if x != a)
        atom_sets[a + "'"] = mates
        ortho_map[a] = a + "'"
        ortho_map[a + "'"] = a
    for b in blocks:
        bset = frozenset(b)
        for mask in range(1, 1 << len(b)):
            sub = frozenset(x for i, x in enumerate(b) if mask >> i & 1)
            if not 2 <= len(sub) <= len(b) - 2:
                continue
            name = "+".join(sorted(sub))
            comp = "+".join(sorted(bset - sub))
            atom_sets[name] = sub
            ortho_map[name] = comp

    elements = list(atom_sets)
    pairs = [
        (x, y) for x in elements for y in elements if x != y and atom_sets[x] <= atom_sets[y]
    ]
    return FiniteOML(elements, pairs, ortho_map, "0", "1")


def from_projectors(named: Mapping[str, np.ndarray], tol: float | None = None,
                    max_elements: int = 128) -> FiniteOML:
    """Close a finite projector fragment under meet, join, and complement,
    then read off its order table.

    Generated elements get synthetic names; closure beyond ``max_elements``
    aborts, since generic projector pairs generate large lattices.
    """
    tol = tolerance(tol)
    if not named:
        raise ValueError("need at least one generating projector")
    mats: list[np.ndarray] = []
    names: list[str] = []

    def find(m) -> int | None:
        for k, known in enumerate(mats):
            if hilbert.equal(known, m, max(tol, 1e-7)):
                return k
        return None

    def add(name: str, m) -> int:
        idx = find(m)
        if idx is not None:
            return idx
        mats.append(m)
        names.append(name)
        return len(mats) - 1

    first = next(iter(named.values()))
    dim = first.shape[0]
    add("0", hilbert.zero(dim))
    add("1", hilbert.identity(dim))
    for name, m in named.items():
        add(name, hilbert.check_projector(m, tol))
    changed = True
    while changed:
        changed = False
        snapshot = list(mats)
        for i in range(len(snapshot)):
            if find(hilbert.ortho(snapshot[i])) is None:
                add(f"e{len(mats)}", hilbert.ortho(snapshot[i]))
                changed = True
        snapshot = list(mats)
        for i in range(len(snapshot)):
            for j in range(i + 1, len(snapshot)):
                for candidate in (
                    hilbert.meet(snapshot[i], snapshot[j], tol),
                    hilbert.join(snapshot[i], snapshot[j], tol),
                ):
                    if find(candidate) is None:
                        add(f"e{len(mats)}", candidate)
                        changed = True
                if len(mats) > max_elements:
                    raise ValueError(
                        f"fragment closure exceeded {max_elements} elements; "
                        "the generating projectors are too generic"
                    )
    pairs = [
        (names[i], names[j])
        for i in range(len(mats))
        for j in range(len(mats))
        if i != j and hilbert.leq(mats[i], mats[j], max(tol, 1e-7))
    ]
    ortho = {names[i]: names[find(hilbert.ortho(mats[i]))] for i in range(len(mats))}
    return FiniteOML(names, pairs, ortho, "0", "1")


# ---------------------------------------------------------------------------
# states


def state_constraints(l: FiniteOML) -> tuple[list[str], list[Row]]:
    """Variables and equality rows a state must satisfy: bottom and top are
    pinned, complements sum to one, orthogonal pairs add along their join.

    Additivity is imposed pairwise only; on a finite lattice the countable
    form reduces to finite additivity, and finite families follow from pairs
    by induction through (a v b) orthogonal to c.
    """
    meet, join = l._bound_tables()
    names = list(l.elements)
    rows: list[Row] = [
        make_row({names[l.bottom]: 1}, EQ, 0, "bottom"),
        make_row({names[l.top]: 1}, EQ, 1, "top"),
    ]
    n = len(names)
    for i in range(n):
        oi = l.ortho[i]
        if i <= oi:
            rows.append(
                make_row({names[i]: 1, names[oi]: 1} if i != oi else {names[i]: 2},
                         EQ, 1, f"complement:{names[i]}")
            )
    seen = set()
    for i in range(n):
        for j in range(i + 1, n):
            if not l.leq[i, l.ortho[j]]:
                continue
            jj = join[i, j]
            key = (jj, i, j)
            if key in seen:
                continue
            seen.add(key)
            coeffs = {names[jj]: Fraction(1)}
            coeffs[names[i]] = coeffs.get(names[i], Fraction(0)) - 1
            coeffs[names[j]] = coeffs.get(names[j], Fraction(0)) - 1
            rows.append(make_row(coeffs, EQ, 0, f"additivity:{names[i]}|{names[j]}"))
    return names, rows


@dataclass
class StateSearchResult:
    feasible: bool
    state: dict[str, Fraction] | dict[str, float] | None
    certificate: Certificate | None
    residual: float
    detail: str = ""


def find_state(l: FiniteOML, exact: bool | None = None) -> StateSearchResult:
    """Find a state (probability valuation) on the lattice or certify that
    none exists.

    The solver runs in exact rational arithmetic up to ``EXACT_SOLVER_LIMIT``
    elements by default (residual exactly zero), and on the float back end
    above that; equality-driven infeasibility is detected exactly either way
    and returns a verified row-combination certificate.
    """
    if exact is None:
        exact = len(l) <= EXACT_SOLVER_LIMIT
    names, rows = state_constraints(l)
    result = solve_feasibility(names, rows, exact=exact)
    if not result.feasible:
        return StateSearchResult(False, None, result.certificate, 0.0, result.detail)
    residual = check_point(rows, result.point)
    return StateSearchResult(True, result.point, None, residual)


def verify_general_state(l: FiniteOML, mu: Mapping[str, object], tol: float = 1e-9) -> float:
    """Maximum residual of the state conditions at mu (0.0 means exact)."""
    names, rows = state_constraints(l)
    missing = set(names) - set(mu)
    if missing:
        raise ValueError(f"state misses elements {sorted(missing)[:5]}")
    for e in names:
        v = float(mu[e])
        if v < -tol or v > 1 + tol:
            raise ValueError(f"state value out of range at {e!r}: {v}")
    return check_point(rows, mu)


# ---------------------------------------------------------------------------
# two-valued valuations


def find_two_valued_valuation(
    l: FiniteOML, count_all: bool = False, cap: int = 1_000_000
) -> tuple[dict[str, int] | None, int]:
    """Backtracking search for a {0,1} assignment respecting joins, meets,
    complements, and truth of the top element.

    Returns (first solution or None, solution count).  With ``count_all``
    false the search stops at the first solution.
    """
    meet, join = l._bound_tables()
    n = len(l.elements)
    values = [-1] * n
    order = list(range(n))
    # triples checkable once their latest-ordered member is assigned
    triples_at: list[list[tuple[int, int, int, str]]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            for target, kind in ((meet[i, j], "meet"), (join[i, j], "join")):
                triples_at[max(i, j, target)].append((i, j, target, kind))
    first: dict[str, int] | None = None
    count = 0

    def consistent(k: int) -> bool:
        v = values[k]
        if k == l.bottom and v != 0:
            return False
        if k == l.top and v != 1:
            return False
        o = l.ortho[k]
        if values[o] >= 0 and values[o] != 1 - v:
            return False
        for i, j, target, kind in triples_at[k]:
            a, b, t = values[i], values[j], values[target]
            if a < 0 or b < 0 or t < 0:
                continue
            expect = min(a, b) if kind == "meet" else max(a, b)
            if t != expect:
                return False
        return True

    def rec(pos: int) -> bool:
        nonlocal first, count
        if pos == n:
            count += 1
            if first is None:
                first = {l.elements[i]: values[i] for i in range(n)}
            return not count_all
        k = order[pos]
        if values[k] >= 0:
            if consistent(k):
                if rec(pos + 1):
                    return True
            return False
        for v in (1, 0):
            values[k] = v
            if consistent(k) and count < cap:
                if rec(pos + 1):
                    values[k] = -1
                    return True
            values[k] = -1
        return False

    rec(0)
    return first, count


# ---------------------------------------------------------------------------
# interval tables over a lattice


def general_quantum_tables(l: FiniteOML, alpha: float = 1.0) -> IntervalNMatrix:
    """The orthogonality-split interval tables with the lattice's own
    orthogonality relation (p below the complement of q)."""
    return IntervalNMatrix(
        alpha,
        {
            "or": {ORTHOGONAL: ORTHOGONAL_OR, NON_ORTHOGONAL: SPAN_OR},
            "and": {ORTHOGONAL: ORTHOGONAL_AND, NON_ORTHOGONAL: CAP_AND},
            "not": {ANY: DETERMINISTIC_NOT},
        },
        name=f"lattice-tables(alpha={alpha:g})",
    )


class LatticeBindings(RelationOracle):
    """Binds formula atoms to lattice elements; denotation and orthogonality
    come from the lattice tables, so classification is exact."""

    def __init__(self, lattice: FiniteOML, atoms: Mapping[str, str]):
        self.lattice = lattice
        unknown = set(atoms.values()) - set(lattice.elements)
        if unknown:
            raise ValueError(f"bindings to unknown elements {sorted(unknown)}")
        self.atoms = dict(atoms)
        self._cache: dict[Formula, str] = {}

    def denote(self, f: Formula) -> str:
        if f in self._cache:
            return self._cache[f]
        if isinstance(f, Atom):
            if f.name not in self.atoms:
                raise ValueError(f"unbound atom {f.name!r}")
            e = self.atoms[f.name]
        elif isinstance(f, Not):
            e = self.lattice.ortho_id(self.denote(f.child))
        elif isinstance(f, And):
            e = meet_oml(self.lattice, self.denote(f.left), self.denote(f.right))
        elif isinstance(f, Or):
            e = join_oml(self.lattice, self.denote(f.left), self.denote(f.right))
        else:
            raise TypeError(f"not a formula: {f!r}")
        self._cache[f] = e
        return e

    def classify(self, left: Formula, right: Formula) -> str:
        return ORTHOGONAL if self.lattice.orthogonal(self.denote(left), self.denote(right)) else NON_ORTHOGONAL


@dataclass(frozen=True)
class LatticeLegalityReport:
    violations: tuple[str, ...]
    checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def lattice_valuation_legal(
    l: FiniteOML, m: IntervalNMatrix, mu: Mapping[str, object], tol: float = 1e-9
) -> LatticeLegalityReport:
    """Elementwise legality of a [0,1]-valued map on the whole lattice: the
    value of every join, meet, and complement must sit inside the matrix cell
    selected by the orthogonality relation."""
    meet, join = l._bound_tables()
    names = l.elements
    violations = []
    checked = 0
    for i in range(len(names)):
        a = float(mu[names[i]])
        rule = m.negation_rule(a, tol)
        checked += 1
        if not rule.value_set(a).contains(float(mu[names[l.ortho[i]]]), tol):
            violations.append(
                f"complement of {names[i]}: {mu[names[l.ortho[i]]]} not in {rule.value_set(a)}"
            )
        for j in range(i, len(names)):
            b = float(mu[names[j]])
            case = ORTHOGONAL if l.leq[i, l.ortho[j]] else NON_ORTHOGONAL
            for conn, table, target in (("or", join, mu[names[join[i, j]]]),
                                        ("and", meet, mu[names[meet[i, j]]])):
                checked += 1
                rules = m.binary_rules(conn, case, a, b, tol)
                if not any(r.value_set(a, b).contains(float(target), tol) for r in rules):
                    cell = rules[0].value_set(a, b)
                    violations.append(
                        f"{conn}({names[i]}, {names[j]}) [{case}]: {target} not in {cell}"
                    )
    return LatticeLegalityReport(tuple(violations), checked)


def legal_valuation_search(
    l: FiniteOML,
    m: IntervalNMatrix,
    partial: Mapping[str, object] | None = None,
    extra_rows: Sequence[Row] = (),
    exact: bool | None = None,
) -> FeasibilityResult:
    """Search for a [0,1] valuation legal for the lattice tables.

    Orthogonal cells contribute equalities, interval cells the bounding
    inequalities, negation the complement equality; ``partial`` pins chosen
    elements and ``extra_rows`` lets callers inject additional constraints.
    """
    if exact is None:
        exact = len(l) <= EXACT_SOLVER_LIMIT
    partial = dict(partial or {})
    for e, v in partial.items():
        if e not in l.index:
            raise ValueError(f"unknown element {e!r} in partial assignment")
        if not 0.0 <= float(v) <= 1.0:
            raise ValueError(f"partial assignment out of [0,1] at {e!r}: {v}")
    meet, join = l._bound_tables()
    names = l.elements
    rows: list[Row] = [
        make_row({names[l.bottom]: 1}, EQ, 0, "bottom"),
        make_row({names[l.top]: 1}, EQ, 1, "top"),
    ]
    n = len(names)
    for i in range(n):
        oi = l.ortho[i]
        if i <= oi:
            rows.append(
                make_row({names[i]: 1, names[oi]: 1} if i != oi else {names[i]: 2},
                         EQ, 1, f"negation:{names[i]}")
            )
    for i in range(n):
        for j in range(i + 1, n):
            jj, mm = join[i, j], meet[i, j]
            if l.leq[i, l.ortho[j]]:
                coeffs = {names[jj]: Fraction(1)}
                coeffs[names[i]] = coeffs.get(names[i], Fraction(0)) - 1
                coeffs[names[j]] = coeffs.get(names[j], Fraction(0)) - 1
                rows.append(make_row(coeffs, EQ, 0, f"or-add:{names[i]}|{names[j]}"))
                rows.append(make_row({names[mm]: 1}, EQ, 0, f"and-zero:{names[i]}|{names[j]}"))
            else:
                for low, high in ((names[i], names[jj]), (names[j], names[jj]),
                                  (names[mm], names[i]), (names[mm], names[j])):
                    if low == high:
                        continue
                    rows.append(make_row({high: 1, low: -1}, GE, 0, f"bound:{low}<={high}"))
    for e, v in partial.items():
        pin = Fraction(v).limit_denominator(10**9) if isinstance(v, float) else Fraction(v)
        rows.append(make_row({e: 1}, EQ, pin, f"pin:{e}"))
    rows.extend(extra_rows)
    return solve_feasibility(names, rows, exact=exact)
