"""The interval-valued truth tables generated by quantum states: disjunction
and conjunction split by orthogonality of the denoted projectors, negation by
complement, designated set [alpha, 1].

Every density operator induces a valuation through the Born probabilities of
the denoted projectors; those valuations are exactly the ones the tables
admit.  The module also builds the restricted (adequacy-motivated) tables,
the two non-deterministic negation variants, the double-negation ordering
chain, and the two worked counterexamples: a four-dimensional pair of states
witnessing genuine non-determinism and a three-dimensional configuration
breaking the composability principle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import hilbert
from .formulas import And, Atom, Formula, Not, Or, render, subformula_closure
from .linalg import max_norm, tolerance
from .nmatrix import (
    AMBIGUOUS,
    ANY,
    DESIGNATED,
    NON_ORTHOGONAL,
    ORTHOGONAL,
    UNDESIGNATED,
    IntervalNMatrix,
    IntervalRule,
    RelationOracle,
    ThresholdMap,
    Valuation,
)
from .valuesets import OPEN_SHIFT, IntervalUnion, interval

# The four relation-split rules shared by the projector and lattice tables.
ORTHOGONAL_OR = IntervalRule(
    2,
    lambda a, b: min(a + b, 1.0),
    lambda a, b: min(a + b, 1.0),
    "{min(a+b, 1)}",
)
SPAN_OR = IntervalRule(2, lambda a, b: max(a, b), lambda a, b: 1.0, "[max(a,b), 1]")
ORTHOGONAL_AND = IntervalRule(2, lambda a, b: 0.0, lambda a, b: 0.0, "{0}")
CAP_AND = IntervalRule(2, lambda a, b: 0.0, lambda a, b: min(a, b), "[0, min(a,b)]")
DETERMINISTIC_NOT = IntervalRule(1, lambda a: 1.0 - a, lambda a: 1.0 - a, "{1 - a}")

NEGATION_VARIANTS = ("deterministic", "neg1", "neg2")


def _negation_cases(variant: str, alpha: float) -> dict[str, IntervalRule]:
    if variant == "deterministic":
        return {ANY: DETERMINISTIC_NOT}
    if variant == "neg1":
        return {
            DESIGNATED: IntervalRule(1, lambda a: 0.0, lambda a: 1.0 - a, "[0, 1-a]"),
            UNDESIGNATED: IntervalRule(1, lambda a: 1.0 - a, lambda a: 1.0, "[1-a, 1]"),
        }
    if variant == "neg2":
        if not 0.5 < alpha < 1.0:
            raise ValueError(f"neg2 needs alpha in (1/2, 1), got {alpha}")
        slope = (1.0 - alpha) / alpha

        def lo_d(a: float) -> float:
            return alpha - (a / 2.0) * slope

        return {
            DESIGNATED: IntervalRule(
                1,
                lo_d,
                lambda a: max(lo_d(a), alpha - OPEN_SHIFT),
                "[alpha - (a/2)(1-alpha)/alpha, alpha)",
            ),
            UNDESIGNATED: IntervalRule(
                1,
                lambda a: alpha,
                lambda a: alpha + (a / 2.0) * slope,
                "[alpha, alpha + (a/2)(1-alpha)/alpha]",
            ),
        }
    raise ValueError(f"unknown negation variant {variant!r}; expected one of {NEGATION_VARIANTS}")


def quantum_nmatrix(alpha: float = 1.0, negation: str = "deterministic") -> IntervalNMatrix:
    """Interval matrix with the orthogonality-split tables and D = [alpha, 1].

    ``alpha = 1`` with the deterministic negation is the sharp matrix whose
    legal valuations are exactly the Born valuations of quantum states.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return IntervalNMatrix(
        alpha,
        {
            "or": {ORTHOGONAL: ORTHOGONAL_OR, NON_ORTHOGONAL: SPAN_OR},
            "and": {ORTHOGONAL: ORTHOGONAL_AND, NON_ORTHOGONAL: CAP_AND},
            "not": _negation_cases(negation, alpha),
        },
        name=f"quantum(alpha={alpha:g}, negation={negation})",
    )


def adequate_restricted_tables(alpha: float) -> IntervalNMatrix:
    """Tables cut down by input designation so the conjunction clauses of
    adequacy hold; the undesignated disjunction cell is deliberately left
    uncut, so that one clause still fails.

    The designated-designated conjunction cell is [0, min(a,b)] intersected
    with the designated interval; it is empty whenever an input pair sneaks
    below the threshold, and that emptiness is reported as an error naming
    the cell.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    and_cases = {
        "dd": IntervalRule(
            2, lambda a, b: alpha, lambda a, b: min(a, b), "[0, min(a,b)] cut to [alpha, min(a,b)]"
        ),
        "du": IntervalRule(2, lambda a, b: 0.0, lambda a, b: b, "[0, b]"),
        "ud": IntervalRule(2, lambda a, b: 0.0, lambda a, b: a, "[0, a]"),
        "uu": CAP_AND,
    }
    return IntervalNMatrix(
        alpha,
        {
            "or": {ANY: SPAN_OR},
            "and": and_cases,
            "not": {ANY: DETERMINISTIC_NOT},
        },
        name=f"restricted(alpha={alpha:g})",
    )


def negation_set(variant: str, alpha: float, a: float) -> IntervalUnion:
    """Interpretation set of the chosen negation at input value a."""
    cases = _negation_cases(variant, alpha)
    if ANY in cases:
        return cases[ANY].value_set(a)
    key = DESIGNATED if a >= alpha else UNDESIGNATED
    return cases[key].value_set(a)


# ---------------------------------------------------------------------------
# Born valuations of states


class ProjectorBindings(RelationOracle):
    """Maps atoms to projectors and compound formulas to lattice elements.

    Serves as the relation oracle for interval-matrix legality: orthogonality
    is decided numerically, and pairs within a factor 10 of the threshold are
    classified ambiguous rather than silently resolved.
    """

    def __init__(self, atoms: Mapping[str, np.ndarray], tol: float | None = None):
        self.tol = tolerance(tol)
        self.atoms = {name: hilbert.check_projector(m, self.tol) for name, m in atoms.items()}
        dims = {m.shape[0] for m in self.atoms.values()}
        if len(dims) > 1:
            raise ValueError(f"atom projectors live in different dimensions: {sorted(dims)}")
        self.dim = dims.pop() if dims else 0
        self._cache: dict[Formula, np.ndarray] = {}

    def denote(self, f: Formula) -> np.ndarray:
        if f in self._cache:
            return self._cache[f]
        if isinstance(f, Atom):
            if f.name not in self.atoms:
                raise ValueError(f"unbound atom {f.name!r}")
            p = self.atoms[f.name]
        elif isinstance(f, Not):
            p = hilbert.ortho(self.denote(f.child))
        elif isinstance(f, And):
            p = hilbert.meet(self.denote(f.left), self.denote(f.right), self.tol)
        elif isinstance(f, Or):
            p = hilbert.join(self.denote(f.left), self.denote(f.right), self.tol)
        else:
            raise TypeError(f"not a formula: {f!r}")
        self._cache[f] = p
        return p

    def classify(self, left: Formula, right: Formula) -> str:
        overlap = max_norm(self.denote(left) @ self.denote(right))
        if overlap <= self.tol:
            return ORTHOGONAL
        if overlap <= 10.0 * self.tol:
            return AMBIGUOUS
        return NON_ORTHOGONAL


def evaluate_state(
    rho: np.ndarray,
    bindings: ProjectorBindings,
    formulas: Sequence[Formula],
    tol: float | None = None,
) -> Valuation:
    """Born valuation of the state over the subformula closure: compounds
    denote lattice elements first, then take their Born probability."""
    tol = tolerance(tol)
    rho = hilbert.check_density(rho, max(tol, 1e-7))
    values = {}
    for f in subformula_closure(formulas):
        values[f] = hilbert.born(rho, bindings.denote(f), tol)
    return Valuation(values)


# ---------------------------------------------------------------------------
# worked counterexamples


@dataclass(frozen=True)
class DynamicWitness:
    """Two states agreeing on P and Q but disagreeing on P&Q and P|Q."""

    rho: np.ndarray
    rho_shifted: np.ndarray
    p: np.ndarray
    q: np.ndarray
    valuation: Valuation
    valuation_shifted: Valuation
    bindings: ProjectorBindings

    def pair(self, formula: Formula) -> tuple[float, float]:
        return (self.valuation[formula], self.valuation_shifted[formula])


_P, _Q = Atom("P"), Atom("Q")
_AND_PQ, _OR_PQ = And(_P, _Q), Or(_P, _Q)


def dynamic_witness(
    weights: Sequence[float] = (0.25, 0.25, 0.25, 0.25),
    eps: float = 0.125,
) -> DynamicWitness:
    """Four-dimensional construction: P spans the first two basis rays, Q the
    middle two, and the states carry weights (w0..w3) resp. the eps-shifted
    weights (w0+e, w1-e, w2+e, w3-e), leaving the P and Q probabilities
    untouched while moving the meet and join probabilities by eps.
    """
    w = [float(x) for x in weights]
    if len(w) != 4 or any(x <= 0 for x in w):
        raise ValueError("need four positive weights")
    if abs(sum(w) - 1.0) > 1e-12:
        raise ValueError(f"weights must sum to 1, got {sum(w)!r}")
    if not 0.0 < eps < min(w):
        raise ValueError(f"eps must lie strictly between 0 and min(weights)={min(w)}")
    e = [hilbert.basis_vector(4, i) for i in range(4)]
    psi = sum(np.sqrt(w[i]) * e[i] for i in range(4))
    shifted = [w[0] + eps, w[1] - eps, w[2] + eps, w[3] - eps]
    psi_eps = sum(np.sqrt(shifted[i]) * e[i] for i in range(4))
    rho = np.outer(psi, psi.conj())
    rho_eps = np.outer(psi_eps, psi_eps.conj())
    p = hilbert.projector_from_span([e[0], e[1]])
    q = hilbert.projector_from_span([e[1], e[2]])
    bindings = ProjectorBindings({"P": p, "Q": q})
    formulas = [_AND_PQ, _OR_PQ]
    return DynamicWitness(
        rho,
        rho_eps,
        p,
        q,
        evaluate_state(rho, bindings, formulas),
        evaluate_state(rho_eps, bindings, formulas),
        bindings,
    )


@dataclass(frozen=True)
class StaticWitness:
    """One state, two disjunctions with equal component values but different
    values: the composability principle fails for Born valuations."""

    rho: np.ndarray
    first: Formula
    second: Formula
    valuation: Valuation
    bindings: ProjectorBindings


def static_violation_witness() -> StaticWitness:
    """Three-dimensional construction: P the first basis ray, Q the ray of
    the equal superposition of the first two, P' the third basis ray, Q' = Q,
    evaluated in the second basis state."""
    a, b, c = (hilbert.basis_vector(3, i) for i in range(3))
    phi = (a + b) / np.sqrt(2.0)
    bindings = ProjectorBindings(
        {
            "P": hilbert.projector_from_span([a]),
            "Q": hilbert.projector_from_span([phi]),
            "Pp": hilbert.projector_from_span([c]),
            "Qp": hilbert.projector_from_span([phi]),
        }
    )
    rho = np.outer(b, b.conj())
    first = Or(Atom("P"), Atom("Q"))
    second = Or(Atom("Pp"), Atom("Qp"))
    valuation = evaluate_state(rho, bindings, [first, second])
    return StaticWitness(rho, first, second, valuation, bindings)


# ---------------------------------------------------------------------------
# order preservation and double negation


@dataclass(frozen=True)
class OrderViolation:
    lower: Formula
    upper: Formula
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {render(self.lower)} vs {render(self.upper)}: {self.detail}"


@dataclass(frozen=True)
class OrderReport:
    violations: tuple[OrderViolation, ...]
    comparable_pairs: int
    orthogonal_pairs: int

    @property
    def ok(self) -> bool:
        return not self.violations


def order_preservation_check(
    valuation: Valuation, bindings: ProjectorBindings, tol: float | None = None
) -> OrderReport:
    """Born valuations respect the lattice order, and orthogonal pairs never
    carry total probability above one."""
    tol = tolerance(tol)
    domain = valuation.domain()
    violations = []
    comparable = orthogonal = 0
    for f in domain:
        for g in domain:
            if f is g:
                continue
            if hilbert.leq(bindings.denote(f), bindings.denote(g), tol):
                comparable += 1
                if valuation[f] > valuation[g] + tol:
                    violations.append(
                        OrderViolation(f, g, "order", f"{valuation[f]} > {valuation[g]}")
                    )
    for i, f in enumerate(domain):
        for g in domain[i + 1 :]:
            if hilbert.is_orthogonal(bindings.denote(f), bindings.denote(g), tol):
                orthogonal += 1
                total = valuation[f] + valuation[g]
                if total > 1.0 + tol:
                    violations.append(
                        OrderViolation(f, g, "orthogonal-sum", f"{valuation[f]} + {valuation[g]} = {total} > 1")
                    )
    return OrderReport(tuple(violations), comparable, orthogonal)


@dataclass(frozen=True)
class DoubleNegationReport:
    """The ordering chain 0 <= b <= 1-a <= alpha <= a <= 1-b <= 1 for the
    first non-deterministic negation, starting from a designated value."""

    alpha: float
    a: float
    b: float
    chain: tuple[float, ...]
    chain_holds: bool
    second_negation: IntervalUnion
    stays_designated: bool

    @property
    def ok(self) -> bool:
        return self.chain_holds and self.stays_designated


def double_negation_chain(
    alpha: float, a: float, b: float, variant: str = "neg1"
) -> DoubleNegationReport:
    """Apply the first negation twice starting from designated a, with b the
    value chosen inside the first negation set [0, 1-a].

    The second negation set is [1-b, 1]: entirely designated and bounded
    below by a, so repeated double negation can only push designated values
    upward.
    """
    if variant != "neg1":
        raise ValueError("the ordering chain is stated for the first negation variant only")
    if not 0.5 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (1/2, 1], got {alpha}")
    if not alpha <= a <= 1.0:
        raise ValueError(f"a must be designated (in [{alpha}, 1]), got {a}")
    if not 0.0 <= b <= 1.0 - a:
        raise ValueError(f"b must lie in the first negation set [0, {1.0 - a}], got {b}")
    chain = (0.0, b, 1.0 - a, alpha, a, 1.0 - b, 1.0)
    holds = all(x <= y for x, y in zip(chain, chain[1:]))
    second = negation_set("neg1", alpha, b)
    return DoubleNegationReport(
        alpha,
        a,
        b,
        chain,
        holds,
        second,
        stays_designated=second.lo >= a,
    )


# ---------------------------------------------------------------------------
# collapse maps onto the finite matrices


def three_valued_collapse() -> ThresholdMap:
    """1 -> t, 0 -> F, strictly-between -> T."""
    return ThresholdMap((("t", 1.0, 1.0), ("F", 0.0, 0.0), ("T", 0.0, 1.0)))


def two_valued_collapse() -> ThresholdMap:
    """1 -> t, everything below -> F."""
    return ThresholdMap((("t", 1.0, 1.0), ("F", 0.0, 1.0)))
