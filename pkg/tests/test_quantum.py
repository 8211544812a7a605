import numpy as np
import pytest

from qnsem import hilbert
from qnsem.formulas import And, Atom, Not, Or, parse
from qnsem.nmatrix import (
    AMBIGUOUS,
    NON_ORTHOGONAL,
    ORTHOGONAL,
    adequacy_check,
    is_dynamic_legal,
    is_static,
)
from qnsem.quantum import (
    ProjectorBindings,
    adequate_restricted_tables,
    double_negation_chain,
    dynamic_witness,
    evaluate_state,
    negation_set,
    quantum_nmatrix,
    static_violation_witness,
    three_valued_collapse,
    two_valued_collapse,
)

P, Q = Atom("P"), Atom("Q")


# ---------------------------------------------------------------------------
# tables


def test_quantum_rules_at_sharp_threshold():
    m = quantum_nmatrix(1.0)
    or_orth = m.tables["or"][ORTHOGONAL]
    assert or_orth.value_set(0.3, 0.2).segments == ((0.5, 0.5),)
    and_span = m.tables["and"][NON_ORTHOGONAL]
    assert and_span.value_set(0.6, 0.4).segments == ((0.0, 0.4),)
    neg = m.negation_rule(0.3)
    assert neg.value_set(0.3).contains(0.7) and neg.value_set(0.3).segments[0][0] == neg.value_set(0.3).segments[0][1]


def test_orthogonal_disjunction_is_capped():
    m = quantum_nmatrix(1.0)
    assert m.tables["or"][ORTHOGONAL].value_set(0.8, 0.7).segments == ((1.0, 1.0),)


def test_parameter_validation():
    with pytest.raises(ValueError):
        quantum_nmatrix(0.0)
    with pytest.raises(ValueError):
        quantum_nmatrix(1.2)
    with pytest.raises(ValueError, match="neg2"):
        quantum_nmatrix(1.0, "neg2")
    with pytest.raises(ValueError, match="unknown negation"):
        quantum_nmatrix(1.0, "neg3")


def test_negation_variants():
    designated = negation_set("neg1", 0.8, 0.9)
    assert designated.segments == ((0.0, 1 - 0.9),)
    undesignated = negation_set("neg1", 0.9, 0.8)
    assert undesignated.lo == pytest.approx(0.2, abs=1e-12)
    assert undesignated.hi == 1.0


def test_neg2_wellformed_over_parameter_grid():
    for alpha in np.linspace(0.51, 0.99, 25):
        for a in np.linspace(0.0, 1.0, 41):
            vs = negation_set("neg2", float(alpha), float(a))
            assert vs.segments
            lo, hi = vs.lo, vs.hi
            assert 0.0 <= lo <= hi <= 1.0
            if a >= alpha:  # designated inputs map strictly below the threshold
                assert hi < alpha
            else:
                assert lo >= alpha - 1e-12


# ---------------------------------------------------------------------------
# Born valuations


def test_evaluate_state_eigenstate():
    e = [hilbert.basis_vector(2, i) for i in range(2)]
    p = hilbert.projector_from_span([e[0]])
    bindings = ProjectorBindings({"P": p})
    rho = np.outer(e[0], e[0].conj())
    v = evaluate_state(rho, bindings, [P])
    assert v[P] == pytest.approx(1.0, abs=1e-12)


def test_evaluate_state_witness_values():
    w = static_violation_witness()
    v = w.valuation
    assert v[Atom("P")] == pytest.approx(0.0, abs=1e-12)
    assert v[Atom("Q")] == pytest.approx(0.5, abs=1e-12)
    assert v[w.first] == pytest.approx(1.0, abs=1e-12)
    assert v[Atom("Pp")] == pytest.approx(0.0, abs=1e-12)
    assert v[Atom("Qp")] == pytest.approx(0.5, abs=1e-12)
    assert v[w.second] == pytest.approx(0.5, abs=1e-12)


def test_evaluate_state_unbound_atom():
    bindings = ProjectorBindings({"P": np.diag([1.0, 0.0]).astype(complex)})
    with pytest.raises(ValueError, match="unbound atom"):
        evaluate_state(np.diag([1.0, 0.0]).astype(complex), bindings, [Atom("R")])


def test_bindings_reject_mixed_dimensions():
    with pytest.raises(ValueError, match="dimensions"):
        ProjectorBindings(
            {"P": np.diag([1.0, 0.0]).astype(complex), "Q": np.eye(3, dtype=complex)}
        )


def test_oracle_classification_with_borderline_pair():
    e = [hilbert.basis_vector(2, i) for i in range(2)]
    tilt = 5e-9 * e[0] + np.sqrt(1 - 25e-18) * e[1]
    bindings = ProjectorBindings(
        {
            "P": hilbert.projector_from_span([e[0]]),
            "Q": hilbert.projector_from_span([tilt]),
            "R": hilbert.projector_from_span([e[1]]),
        }
    )
    assert bindings.classify(Atom("P"), Atom("R")) == ORTHOGONAL
    assert bindings.classify(Atom("P"), Atom("Q")) == AMBIGUOUS
    wide = 0.3 * e[0] + np.sqrt(1 - 0.09) * e[1]
    bindings2 = ProjectorBindings(
        {"P": hilbert.projector_from_span([e[0]]), "Q": hilbert.projector_from_span([wide])}
    )
    assert bindings2.classify(Atom("P"), Atom("Q")) == NON_ORTHOGONAL


# ---------------------------------------------------------------------------
# counterexamples


def test_dynamic_witness_default_values():
    w = dynamic_witness()
    assert w.pair(P) == (pytest.approx(0.5, abs=1e-12), pytest.approx(0.5, abs=1e-12))
    assert w.pair(Q) == (pytest.approx(0.5, abs=1e-12), pytest.approx(0.5, abs=1e-12))
    assert w.pair(And(P, Q)) == (pytest.approx(0.25, abs=1e-12), pytest.approx(0.125, abs=1e-12))
    assert w.pair(Or(P, Q)) == (pytest.approx(0.75, abs=1e-12), pytest.approx(0.875, abs=1e-12))


def test_dynamic_witness_symbolic_parameters():
    weights = (0.4, 0.3, 0.2, 0.1)
    w = dynamic_witness(weights, eps=0.05)
    a, b, g, d = weights
    assert w.pair(P) == (pytest.approx(a + b), pytest.approx(a + b))
    assert w.pair(Q) == (pytest.approx(b + g), pytest.approx(b + g))
    assert w.pair(And(P, Q)) == (pytest.approx(b), pytest.approx(b - 0.05))
    assert w.pair(Or(P, Q)) == (pytest.approx(a + b + g), pytest.approx(a + b + g + 0.05))


def test_dynamic_witness_legality():
    w = dynamic_witness()
    m = quantum_nmatrix(1.0)
    assert is_dynamic_legal(w.valuation, m, w.bindings).ok
    assert is_dynamic_legal(w.valuation_shifted, m, w.bindings).ok


def test_dynamic_witness_validation():
    with pytest.raises(ValueError, match="eps"):
        dynamic_witness(eps=0.3)
    with pytest.raises(ValueError, match="sum"):
        dynamic_witness(weights=(0.3, 0.3, 0.3, 0.3))


def test_static_witness_flags_exactly_one_pair():
    w = static_violation_witness()
    report = is_static(w.valuation)
    assert len(report.violations) == 1
    assert {report.violations[0].first, report.violations[0].second} == {w.first, w.second}
    assert is_dynamic_legal(w.valuation, quantum_nmatrix(1.0), w.bindings).ok


# ---------------------------------------------------------------------------
# order preservation


def test_order_preservation_random_nested(rng):
    from qnsem.quantum import order_preservation_check

    for _ in range(1000):
        dim = int(rng.integers(2, 5))
        p = hilbert.random_projector(rng, dim)
        q = hilbert.join(p, hilbert.random_projector(rng, dim))
        rho = hilbert.random_density(rng, dim)
        assert hilbert.born(rho, p) <= hilbert.born(rho, q) + 1e-9


def test_order_preservation_report(rng):
    from qnsem.quantum import order_preservation_check

    e = [hilbert.basis_vector(3, i) for i in range(3)]
    bindings = ProjectorBindings(
        {
            "P": hilbert.projector_from_span([e[0]]),
            "Q": hilbert.projector_from_span([e[0], e[1]]),
            "R": hilbert.projector_from_span([e[2]]),
            "Z": hilbert.zero(3),
        }
    )
    rho = hilbert.random_density(rng, 3)
    formulas = [Atom("P"), Atom("Q"), Atom("R"), Atom("Z")]
    valuation = evaluate_state(rho, bindings, formulas)
    report = order_preservation_check(valuation, bindings)
    assert report.ok
    assert report.comparable_pairs > 0 and report.orthogonal_pairs > 0
    # the zero projector sits below everything
    assert valuation[Atom("Z")] == 0.0


# ---------------------------------------------------------------------------
# double negation


def test_double_negation_chain_example():
    report = double_negation_chain(0.9, 0.95, 0.02)
    assert report.chain == (0.0, 0.02, pytest.approx(0.05), 0.9, 0.95, 0.98, 1.0)
    assert report.chain_holds and report.stays_designated
    assert report.second_negation.lo == pytest.approx(0.98)


def test_double_negation_chain_validation():
    with pytest.raises(ValueError, match="alpha"):
        double_negation_chain(0.4, 0.5, 0.1)
    with pytest.raises(ValueError, match="designated"):
        double_negation_chain(0.9, 0.5, 0.1)
    with pytest.raises(ValueError, match="negation set"):
        double_negation_chain(0.9, 0.95, 0.5)
    with pytest.raises(ValueError, match="first negation"):
        double_negation_chain(0.9, 0.95, 0.02, variant="neg2")


def test_double_negation_sampled(rng):
    for _ in range(1000):
        alpha = 0.5 + 0.499999 * rng.random() + 1e-9
        a = alpha + (1.0 - alpha) * rng.random()
        b = (1.0 - a) * rng.random()
        report = double_negation_chain(alpha, a, b)
        assert report.chain_holds and report.stays_designated


def test_nondesignated_negation_straddles_threshold():
    vs = negation_set("neg1", 0.9, 0.8)
    assert vs.contains(0.95) and vs.contains(0.3)  # both sides of 0.9


def test_deterministic_negation_involution():
    vs = negation_set("deterministic", 1.0, 0.3)
    inner = vs.lo
    back = negation_set("deterministic", 1.0, inner)
    assert back.lo == pytest.approx(0.3, abs=1e-12) and back.lo == back.hi


# ---------------------------------------------------------------------------
# restricted tables


def test_restricted_tables_cells():
    m = adequate_restricted_tables(1.0)
    dd = m.tables["and"]["dd"]
    assert dd.value_set(1.0, 1.0).segments == ((1.0, 1.0),)
    m8 = adequate_restricted_tables(0.8)
    du = m8.tables["and"]["du"]
    assert du.value_set(0.9, 0.3).segments == ((0.0, 0.3),)  # inside the undesignated side
    uu_or = m8.tables["or"]["any"]
    assert uu_or.value_set(0.3, 0.4).segments == ((0.4, 1.0),)


def test_restricted_tables_empty_cell_error():
    m = adequate_restricted_tables(0.8)
    dd = m.tables["and"]["dd"]
    with pytest.raises(ValueError, match="empty"):
        dd.value_set(0.3, 0.2)  # inputs below the threshold make the cut empty


def test_restricted_tables_adequacy_profile():
    report = adequacy_check(adequate_restricted_tables(0.8))
    assert not report.adequate
    bad_clauses = {(v.connective, v.clause) for v in report.violations}
    assert all(conn == "or" for conn, _ in bad_clauses)
    assert all("undesignated" in clause for _, clause in bad_clauses)


def test_restricted_tables_formula_legality():
    # designation-keyed tables ignore the relation case entirely
    from qnsem.nmatrix import RelationOracle

    class AnyOracle(RelationOracle):
        def classify(self, left, right):
            return NON_ORTHOGONAL

    m = adequate_restricted_tables(0.8)
    good = {P: 0.9, Q: 0.95, And(P, Q): 0.85}
    assert is_dynamic_legal(good, m, AnyOracle()).ok
    bad = {P: 0.9, Q: 0.95, And(P, Q): 0.5}  # below the designated cut
    report = is_dynamic_legal(bad, m, AnyOracle())
    assert not report.ok and report.violations[0].formula == And(P, Q)


def test_quantum_adequacy_witness():
    report = adequacy_check(quantum_nmatrix(1.0))
    assert not report.adequate
    assert any(
        v.connective == "or" and v.case == "orthogonal" and v.witness == (0.5, 0.5)
        for v in report.violations
    )
    assert any(v.connective == "and" for v in report.violations)


# ---------------------------------------------------------------------------
# collapse maps


def test_collapse_labels():
    three = three_valued_collapse()
    assert [three.label(x) for x in (1.0, 0.0, 0.5)] == ["t", "F", "T"]
    two = two_valued_collapse()
    assert [two.label(x) for x in (1.0, 0.0, 0.5)] == ["t", "F", "F"]


def test_legality_sweep_small(rng):
    m = quantum_nmatrix(1.0)
    formulas = [P, Q, Not(P), Not(Q), And(P, Q), Or(P, Q)]
    for dim in (2, 3, 4, 5):
        for _ in range(60):
            bindings = ProjectorBindings(
                {
                    "P": hilbert.random_projector(rng, dim),
                    "Q": hilbert.random_projector(rng, dim),
                }
            )
            rho = hilbert.random_density(rng, dim)
            valuation = evaluate_state(rho, bindings, formulas)
            report = is_dynamic_legal(valuation, m, bindings)
            assert report.ok, report.violations
