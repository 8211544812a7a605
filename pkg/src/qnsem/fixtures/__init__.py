"""Bundled data fixtures: the 18-vector contextuality family, a single
orthonormal context, and a state-free orthomodular lattice given as a block
diagram.

The vector fixtures carry exact integer entries (before normalization), so
their orthogonality graphs are tolerance-independent.  The state-free
diagram pastes nine four-atom blocks (rows) against twelve three-atom blocks
(columns of a 3x3 grid's line structure): every atom lies in exactly one row
block and one column block, so a state would have to give total atom mass 9
by rows and 12 by columns at once.
"""

from __future__ import annotations

import json
from importlib import resources

from ..kscheck import VectorContextFamily
from ..oml import FiniteOML, from_greechie


def load_json(name: str) -> dict:
    path = resources.files(__package__).joinpath(name)
    with path.open("r", encoding="utf-8") as fh:
        return json.load(fh)


def ks18() -> VectorContextFamily:
    """Eighteen rational vectors in dimension four, nine contexts, every
    vector in exactly two: admits no classical truth-value assignment."""
    return VectorContextFamily.from_json(load_json("ks18_dim4.json"))


def single_context_dim3() -> VectorContextFamily:
    """The standard basis of dimension three as a single context."""
    return VectorContextFamily.from_json(load_json("ks_single_context_dim3.json"))


def nostate_greechie() -> dict:
    return load_json("nostate_grid.json")


def nostate_lattice() -> FiniteOML:
    """Expansion of the state-free block diagram into a full order table."""
    obj = nostate_greechie()
    return from_greechie(obj["atoms"], obj["blocks"])
