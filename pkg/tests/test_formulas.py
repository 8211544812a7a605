import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnsem.formulas import (
    And,
    Atom,
    Not,
    Or,
    ParseError,
    atoms_of,
    parse,
    render,
    subformula_closure,
)


def test_parse_atom():
    assert parse("P") == Atom("P")
    assert parse("((P))") == Atom("P")


def test_parse_precedence():
    assert parse("P | Q & !R") == Or(Atom("P"), And(Atom("Q"), Not(Atom("R"))))


def test_parse_left_associativity():
    assert parse("P & Q & R") == And(And(Atom("P"), Atom("Q")), Atom("R"))
    assert parse("P | Q | R") == Or(Or(Atom("P"), Atom("Q")), Atom("R"))


def test_parse_unicode_aliases():
    assert parse("¬P ∧ Q ∨ R") == parse("!P & Q | R")


def test_parse_errors_carry_offset_and_expectations():
    with pytest.raises(ParseError) as err:
        parse("P | ")
    assert err.value.offset == 4
    assert any("atom" in e for e in err.value.expected)
    with pytest.raises(ParseError) as err:
        parse("(P | Q")
    assert err.value.offset == 6
    with pytest.raises(ParseError):
        parse("P Q")
    with pytest.raises(ParseError):
        parse("P $ Q")


def test_render_examples():
    assert render(Atom("P")) == "P"
    assert render(Or(Atom("P"), And(Atom("Q"), Atom("R")))) == "P | Q & R"
    assert render(And(Or(Atom("P"), Atom("Q")), Atom("R"))) == "(P | Q) & R"
    assert render(Not(And(Atom("P"), Atom("Q")))) == "!(P & Q)"


def test_closure_examples():
    p, q = Atom("P"), Atom("Q")
    assert subformula_closure([Or(p, q)]) == [p, q, Or(p, q)]
    assert subformula_closure([Not(Not(p))]) == [p, Not(p), Not(Not(p))]
    # syntactic identity: the two conjunctions stay distinct
    assert subformula_closure([And(p, q), And(q, p)]) == [p, q, And(p, q), And(q, p)]


def test_closure_is_topologically_sorted():
    f = parse("!(P & Q) | (Q & !P)")
    closure = subformula_closure([f])
    seen = set()
    for g in closure:
        from qnsem.formulas import children

        assert all(c in seen for c in children(g))
        seen.add(g)


def test_atoms_of():
    assert atoms_of(parse("P & !Q | P")) == {"P", "Q"}


def test_atom_name_validation():
    with pytest.raises(ValueError):
        Atom("2bad")


@st.composite
def formulas(draw, depth=4):
    if depth == 0:
        return Atom(draw(st.sampled_from(["P", "Q", "R", "S", "T2", "U_x"])))
    kind = draw(st.integers(0, 3))
    if kind == 0:
        return Atom(draw(st.sampled_from(["P", "Q", "R", "S", "T2", "U_x"])))
    if kind == 1:
        return Not(draw(formulas(depth=depth - 1)))
    left = draw(formulas(depth=depth - 1))
    right = draw(formulas(depth=depth - 1))
    return And(left, right) if kind == 2 else Or(left, right)


@given(formulas(depth=6))
@settings(max_examples=400)
def test_roundtrip_property(f):
    assert parse(render(f)) == f


@given(formulas(depth=5))
@settings(max_examples=200)
def test_closure_children_first_property(f):
    closure = subformula_closure([f])
    assert closure[-1] == f
    assert len(set(closure)) == len(closure)
