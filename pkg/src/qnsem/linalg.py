"""Dense complex-matrix substrate: products, adjoints, traces, Hermitian
eigendecomposition, Gram-Schmidt orthonormalization, and the JSON wire form
used by every fixture file.

All matrices are numpy complex128 arrays.  Operations are pure functions and
never mutate their inputs, so everything here is safe to call concurrently.
"""

from __future__ import annotations

import os
from typing import NamedTuple, Sequence

import numpy as np

#: Fallback tolerance for every approximate comparison in the package.
DEFAULT_TOL = 1e-9


def tolerance(tol: float | None = None) -> float:
    """Resolve an effective tolerance: explicit value > QNSEM_TOL env > default."""
    if tol is not None:
        return float(tol)
    env = os.environ.get("QNSEM_TOL")
    if env is not None:
        return float(env)
    return DEFAULT_TOL


class DimensionMismatch(ValueError):
    """Operands have incompatible shapes."""


class NotHermitian(ValueError):
    """Input fails the Hermitian precondition; message carries the asymmetry norm."""


class InvariantViolation(ValueError):
    """A domain-type invariant (idempotence, positivity, trace, ...) fails."""


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):  # finite in both real and imaginary parts
        raise InvariantViolation("matrix contains non-finite entries")
    return m


def max_norm(a: np.ndarray) -> float:
    """Entrywise max-norm; the package's notion of matrix distance."""
    a = np.asarray(a)
    return 0.0 if a.size == 0 else float(np.max(np.abs(a)))


def multiply(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"trace needs a square matrix, got {a.shape[0]}x{a.shape[1]}")
    return complex(np.trace(a))


class EigenResult(NamedTuple):
    """Ascending real eigenvalues and the matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian_eigen(a, tol: float | None = None) -> EigenResult:
    """Eigendecomposition of a Hermitian matrix.

    Rejects inputs whose asymmetry exceeds ``tol`` in max-norm; the matrix is
    symmetrized before factoring so the reconstruction residual stays at
    rounding level for genuinely Hermitian inputs.
    """
    tol = tolerance(tol)
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected square matrix, got {a.shape[0]}x{a.shape[1]}")
    asym = max_norm(a - a.conj().T)
    if asym > tol:
        raise NotHermitian(f"matrix is not Hermitian: asymmetry max-norm {asym:.3e} > {tol:.3e}")
    sym = (a + a.conj().T) / 2.0
    values, vectors = np.linalg.eigh(sym)
    return EigenResult(values, vectors)


def orthonormalize(vectors: Sequence, tol: float | None = None) -> list[np.ndarray]:
    """Modified Gram-Schmidt with a second pass for numerical orthogonality.

    Vectors whose residual norm after projection is at most ``tol`` are
    dropped as linearly dependent.  Empty input yields an empty list.
    """
    tol = tolerance(tol)
    basis: list[np.ndarray] = []
    dim = None
    for raw in vectors:
        v = np.asarray(raw, dtype=np.complex128).reshape(-1)
        if dim is None:
            dim = v.size
        elif v.size != dim:
            raise DimensionMismatch(f"vector of length {v.size} among vectors of length {dim}")
        for _ in range(2):  # re-orthogonalize once: enough at double precision
            for e in basis:
                v = v - np.vdot(e, v) * e
        norm = float(np.linalg.norm(v))
        if norm > tol:
            basis.append(v / norm)
    return basis


def matrix_to_json(a) -> dict:
    """Row-major wire form: {"rows": n, "cols": m, "entries": [[re, im], ...]}."""
    a = as_matrix(a)
    entries = [[float(z.real), float(z.imag)] for z in a.reshape(-1)]
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "entries": entries}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except (KeyError, TypeError) as exc:
        raise InvariantViolation(f"malformed matrix object: {exc}") from exc
    if rows <= 0 or cols <= 0:
        raise InvariantViolation(f"matrix dimensions must be positive, got {rows}x{cols}")
    if len(entries) != rows * cols:
        raise InvariantViolation(
            f"entry count {len(entries)} does not match {rows}x{cols}={rows * cols}"
        )
    flat = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
    return as_matrix(flat.reshape(rows, cols))
