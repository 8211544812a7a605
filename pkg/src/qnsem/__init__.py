"""Non-deterministic truth-table semantics for projection lattices.

Subpackages cover the dense-matrix substrate (:mod:`qnsem.linalg`), the
projection lattice and Born valuations (:mod:`qnsem.hilbert`), propositional
formulas (:mod:`qnsem.formulas`), finite and interval non-deterministic
matrices (:mod:`qnsem.nmatrix`), the quantum tables and counterexamples
(:mod:`qnsem.quantum`), finite orthomodular lattices and their states
(:mod:`qnsem.oml`), contextuality searches (:mod:`qnsem.kscheck`), and the
command-line interface (:mod:`qnsem.cli`).
"""

__version__ = "0.1.0"
