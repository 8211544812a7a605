import json

import numpy as np
import pytest

from qnsem import fixtures, hilbert
from qnsem.cli import main
from qnsem.nmatrix import classical_matrix, three_valued_matrix
from qnsem.quantum import three_valued_collapse


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_ok(capsys):
    code, out, _ = run(capsys, "parse", "P | Q & !R")
    assert code == 0
    assert "Or" in out and "Atom(P)" in out


def test_parse_syntax_error(capsys):
    code, _, err = run(capsys, "parse", "P & & Q")
    assert code == 2
    assert "syntax error" in err


def test_usage_error(capsys):
    code, _, _ = run(capsys, "frobnicate")
    assert code == 1


def test_missing_file(capsys):
    code, _, err = run(capsys, "ks", "search", "/nonexistent/family.json")
    assert code == 2


def test_witness_static(capsys):
    code, out, _ = run(capsys, "witness", "static")
    assert code == 0
    assert out.strip().endswith("1 != 1/2")


def test_witness_dynamic(capsys):
    code, out, _ = run(capsys, "witness", "dynamic")
    assert code == 0
    assert "1/4 != 1/8" in out


def _write_state_and_bindings(write_json):
    e = [hilbert.basis_vector(3, i) for i in range(3)]
    phi = (e[0] + e[1]) / np.sqrt(2)
    rho = np.outer(e[1], e[1].conj())
    state = write_json("state.json", hilbert.operator_to_json(rho, "density"))
    bind = write_json(
        "bind.json",
        {
            "P": hilbert.operator_to_json(hilbert.projector_from_span([e[0]]), "projector"),
            "Q": hilbert.operator_to_json(hilbert.projector_from_span([phi]), "projector"),
        },
    )
    return state, bind


def test_eval(capsys, write_json):
    state, bind = _write_state_and_bindings(write_json)
    code, out, _ = run(capsys, "eval", "--state", state, "--bind", bind, "P | Q")
    assert code == 0
    assert "v(P | Q) = 1" in out


def test_legal_accepts_born_valuation(capsys, write_json):
    state, bind = _write_state_and_bindings(write_json)
    formulas = write_json("formulas.json", {"formulas": ["P | Q", "P & Q", "!P"]})
    code, out, _ = run(
        capsys, "legal", "--state", state, "--bind", bind, "--formulas", formulas
    )
    assert code == 0
    assert "legal" in out


def test_legal_rejects_under_second_negation(capsys, write_json):
    # with the parametric negation the flat complement value leaves the cell
    e = [hilbert.basis_vector(2, i) for i in range(2)]
    rho = np.outer(e[0], e[0].conj())
    state = write_json("state.json", hilbert.operator_to_json(rho, "density"))
    bind = write_json(
        "bind.json",
        {"P": hilbert.operator_to_json(hilbert.projector_from_span([e[0]]), "projector")},
    )
    formulas = write_json("formulas.json", {"formulas": ["!P"]})
    code, out, _ = run(
        capsys,
        "legal",
        "--state", state,
        "--bind", bind,
        "--formulas", formulas,
        "--alpha", "0.8",
        "--negation", "neg2",
    )
    assert code == 3
    assert "ILLEGAL" in out


def test_consequence(capsys, write_json):
    matrix = write_json("three.json", three_valued_matrix().to_json())
    gamma = write_json("gamma.json", {"formulas": ["P"]})
    delta = write_json("delta.json", {"formulas": ["P | Q"]})
    code, out, _ = run(
        capsys, "consequence", "--matrix", matrix, "--gamma", gamma, "--delta", delta
    )
    assert code == 0 and "True" in out

    empty = write_json("empty.json", {"formulas": []})
    code, out, _ = run(
        capsys, "--format", "json", "consequence", "--matrix", matrix, "--gamma", empty,
        "--delta", write_json("d2.json", {"formulas": ["P"]}),
    )
    assert code == 3
    payload = json.loads(out)
    assert payload["holds"] is False and "countermodel" in payload


def test_adequacy_exit_codes(capsys, write_json):
    code, out, _ = run(capsys, "adequacy", "--quantum")
    assert code == 3 and "NOT adequate" in out
    classical = write_json("classical.json", classical_matrix().to_json())
    code, out, _ = run(capsys, "adequacy", "--matrix", classical)
    assert code == 0 and "adequate" in out


def test_rexpansion_verify(capsys, write_json):
    m1 = write_json("three.json", three_valued_matrix().to_json())
    collapse = write_json("map.json", three_valued_collapse().to_json())
    code, out, _ = run(
        capsys, "rexpansion", "verify", "--m1", m1, "--quantum", "--map", collapse,
        "--samples", "500",
    )
    assert code == 0 and "verified" in out
    corrupted = write_json(
        "bad_map.json",
        {"pieces": [{"label": "F", "lo": 1.0, "hi": 1.0}, {"label": "F", "lo": 0.0, "hi": 0.0},
                    {"label": "T", "lo": 0.0, "hi": 1.0}]},
    )
    code, out, _ = run(
        capsys, "rexpansion", "verify", "--m1", m1, "--quantum", "--map", corrupted,
        "--samples", "100",
    )
    assert code == 3


def test_ks_commands(capsys, write_json):
    family = write_json("ks.json", fixtures.ks18().to_json())
    code, out, _ = run(capsys, "ks", "search", family)
    assert code == 3 and "UNSAT" in out
    single = write_json("single.json", fixtures.single_context_dim3().to_json())
    code, out, _ = run(capsys, "ks", "search", single)
    assert code == 0 and "SAT" in out
    code, out, _ = run(capsys, "ks", "count", single)
    assert code == 0 and "3" in out


def test_oml_commands(capsys, write_json):
    from qnsem import oml

    mo2 = write_json("mo2.json", oml.mo2().to_json())
    code, out, _ = run(capsys, "oml", "verify", mo2)
    assert code == 0 and "verified" in out
    code, out, _ = run(capsys, "oml", "find-state", mo2)
    assert code == 0 and "state found" in out
    code, out, _ = run(capsys, "oml", "cav", mo2)
    assert code == 3 and "UNSAT" in out
    boolean = write_json("b8.json", oml.boolean_lattice(3).to_json())
    code, out, _ = run(capsys, "oml", "cav", boolean, "--all")
    assert code == 0 and "3 total" in out
    code, out, _ = run(capsys, "oml", "tables", mo2)
    assert code == 0 and "or[orthogonal]" in out and "legal valuation: True" in out


def test_oml_greechie_and_nostate(capsys, write_json):
    greechie = write_json("grid.json", fixtures.nostate_greechie())
    code, out, _ = run(capsys, "oml", "verify", greechie)
    assert code == 0
    code, out, _ = run(capsys, "oml", "find-state", greechie, "--exact")
    assert code == 3 and "no state exists" in out and "verified: True" in out


def test_broken_lattice_exit(capsys, write_json):
    from qnsem import oml

    broken = write_json("broken.json", oml.chain_with_fixed_point().to_json())
    code, out, _ = run(capsys, "oml", "verify", broken)
    assert code == 3 and "NOT an orthomodular lattice" in out


def test_demo_small_scale(capsys):
    code, out, _ = run(capsys, "demo", "paper", "--trials", "8", "--samples", "60")
    assert code == 0
    assert "ALL REPRODUCTIONS PASS" in out


def test_demo_json_deterministic(capsys):
    code1, out1, _ = run(capsys, "--format", "json", "demo", "paper", "--trials", "5", "--samples", "40")
    code2, out2, _ = run(capsys, "--format", "json", "demo", "paper", "--trials", "5", "--samples", "40")
    assert code1 == code2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["passed"] is True


def test_tol_flag(capsys):
    code, _, _ = run(capsys, "--tol", "1e-8", "witness", "static")
    assert code == 0


def test_json_output_mode(capsys, write_json):
    single = write_json("single.json", fixtures.single_context_dim3().to_json())
    code, out, _ = run(capsys, "--format", "json", "ks", "count", single)
    assert code == 0
    assert json.loads(out)["solutions"] == 3
