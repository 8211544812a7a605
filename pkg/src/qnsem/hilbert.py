"""Projection lattice of a finite-dimensional complex Hilbert space, density
operators, and Born-rule probabilities.

Projectors and density operators are plain complex matrices; the validators
here are the single place their defining invariants are enforced.  Lattice
operations (meet, join, orthocomplement) are computed numerically through the
Hermitian eigendecomposition of kernel operators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DimensionMismatch,
    InvariantViolation,
    adjoint,
    as_matrix,
    hermitian_eigen,
    matrix_from_json,
    matrix_to_json,
    max_norm,
    orthonormalize,
    tolerance,
    trace,
)

# Relative kernel threshold for subspace intersection: the operator
# (I-p)+(I-q) has spectrum inside [0,2], so a gap of 1e-8 x max(lambda, 1)
# separates its kernel cleanly at small dimensions.
KERNEL_THRESHOLD = 1e-8


def projector_residuals(m: np.ndarray) -> dict[str, float]:
    """Max-norm residuals of the projector invariants (idempotence, self-adjointness)."""
    m = as_matrix(m)
    return {
        "idempotent": max_norm(m @ m - m),
        "hermitian": max_norm(m - m.conj().T),
    }


def check_projector(m, tol: float | None = None) -> np.ndarray:
    tol = tolerance(tol)
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"projector must be square, got {m.shape[0]}x{m.shape[1]}")
    res = projector_residuals(m)
    bad = {k: v for k, v in res.items() if v > tol}
    if bad:
        raise InvariantViolation(f"not a projector (tol={tol:.1e}): residuals {bad}")
    return m


def density_residuals(m: np.ndarray) -> dict[str, float]:
    m = as_matrix(m)
    herm = max_norm(m - m.conj().T)
    eigs = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
    return {
        "hermitian": herm,
        "negativity": float(max(0.0, -eigs.min())) if eigs.size else 0.0,
        "trace": abs(complex(np.trace(m)) - 1.0),
    }


def check_density(m, tol: float | None = None) -> np.ndarray:
    tol = tolerance(tol)
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"density operator must be square, got {m.shape[0]}x{m.shape[1]}")
    res = density_residuals(m)
    bad = {k: v for k, v in res.items() if v > tol}
    if bad:
        raise InvariantViolation(f"not a density operator (tol={tol:.1e}): residuals {bad}")
    return m


def operator_to_json(m, kind: str) -> dict:
    obj = matrix_to_json(m)
    obj["kind"] = kind
    return obj


def operator_from_json(obj: dict, tol: float | None = None) -> tuple[np.ndarray, str]:
    """Parse and validate a {"kind": "projector"|"density", ...matrix...} object."""
    kind = obj.get("kind")
    m = matrix_from_json(obj)
    if kind == "projector":
        return check_projector(m, tol), kind
    if kind == "density":
        return check_density(m, tol), kind
    raise InvariantViolation(f"unknown operator kind {kind!r}; expected 'projector' or 'density'")


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def zero(dim: int) -> np.ndarray:
    return np.zeros((dim, dim), dtype=np.complex128)


def projector_from_span(vectors, tol: float | None = None, dim: int | None = None) -> np.ndarray:
    """Orthogonal projector onto the span of the given vectors.

    Dependent vectors are dropped by Gram-Schmidt.  An empty span yields the
    zero projector (the lattice bottom); pass ``dim`` when the list may be
    empty, since the dimension cannot be inferred from nothing.
    """
    vectors = list(vectors)
    basis = orthonormalize(vectors, tol)
    if not basis:
        if vectors:
            dim = np.asarray(vectors[0]).reshape(-1).size
        if dim is None:
            raise DimensionMismatch("empty span needs an explicit dimension")
        return zero(dim)
    if dim is not None and dim != basis[0].size:
        raise DimensionMismatch(f"vectors of length {basis[0].size} but dim={dim}")
    dim = basis[0].size
    p = np.zeros((dim, dim), dtype=np.complex128)
    for e in basis:
        p += np.outer(e, e.conj())
    return p


def _require_same_dim(p: np.ndarray, q: np.ndarray) -> None:
    if p.shape != q.shape:
        raise DimensionMismatch(f"projector dimensions differ: {p.shape} vs {q.shape}")


def meet(p, q, tol: float | None = None) -> np.ndarray:
    """Projector onto the intersection of the two ranges.

    Computed as the kernel projector of (I-p)+(I-q): a vector is in both
    ranges exactly when it is annihilated by both complements.
    """
    p, q = as_matrix(p), as_matrix(q)
    _require_same_dim(p, q)
    dim = p.shape[0]
    k = (identity(dim) - p) + (identity(dim) - q)
    values, vectors = hermitian_eigen(k, tol=max(tolerance(tol), 1e-6))
    cutoff = KERNEL_THRESHOLD * max(float(values[-1]), 1.0)
    cols = [vectors[:, i] for i in range(dim) if values[i] <= cutoff]
    if not cols:
        return zero(dim)
    return projector_from_span(cols, tol)


def join(p, q, tol: float | None = None) -> np.ndarray:
    """Projector onto the closed span of the two ranges: de Morgan dual of meet."""
    p, q = as_matrix(p), as_matrix(q)
    _require_same_dim(p, q)
    dim = p.shape[0]
    return identity(dim) - meet(identity(dim) - p, identity(dim) - q, tol)


def ortho(p) -> np.ndarray:
    p = as_matrix(p)
    return identity(p.shape[0]) - p


def leq(p, q, tol: float | None = None) -> bool:
    """Range inclusion: p <= q exactly when q absorbs p (q p = p)."""
    p, q = as_matrix(p), as_matrix(q)
    _require_same_dim(p, q)
    return max_norm(q @ p - p) <= tolerance(tol)


def is_orthogonal(p, q, tol: float | None = None) -> bool:
    p, q = as_matrix(p), as_matrix(q)
    _require_same_dim(p, q)
    return max_norm(p @ q) <= tolerance(tol)


def equal(p, q, tol: float | None = None) -> bool:
    return max_norm(as_matrix(p) - as_matrix(q)) <= tolerance(tol)


def rank_of(p, tol: float | None = None) -> int:
    return int(round(float(np.real(trace(p)))))


def born(rho, p, tol: float | None = None) -> float:
    """Born probability Re tr(rho p), clipped to [0,1] only within tolerance.

    Values escaping [-tol, 1+tol] raise: they signal a broken state or
    projector upstream and must not be silently masked.
    """
    tol = tolerance(tol)
    rho, p = as_matrix(rho), as_matrix(p)
    _require_same_dim(rho, p)
    value = float(np.real(np.trace(rho @ p)))
    if value < -tol or value > 1.0 + tol:
        raise InvariantViolation(f"Born value {value!r} outside [{-tol}, {1 + tol}]")
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class StateAxiomReport:
    """Residuals of the three state conditions on a finite orthogonal family."""

    zero_residual: float
    complement_residual: float
    additivity_residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return max(self.zero_residual, self.complement_residual, self.additivity_residual) <= self.tol


def verify_state_axioms(rho, family, tol: float | None = None) -> StateAxiomReport:
    """Check mu(0)=0, mu(P')=1-mu(P), and additivity of mu over the family join.

    The family must be pairwise orthogonal; the offending pair is named
    otherwise.
    """
    tol = tolerance(tol)
    rho = as_matrix(rho)
    family = [as_matrix(p) for p in family]
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            if not is_orthogonal(family[i], family[j], tol):
                raise InvariantViolation(
                    f"family members {i} and {j} are not orthogonal "
                    f"(max-norm of product {max_norm(family[i] @ family[j]):.3e})"
                )
    dim = rho.shape[0]
    zero_res = abs(born(rho, zero(dim), tol))
    comp_res = 0.0
    for p in family:
        comp_res = max(comp_res, abs(born(rho, ortho(p), tol) - (1.0 - born(rho, p, tol))))
    if family:
        total = zero(dim)
        for p in family:
            total = join(total, p, tol)
        add_res = abs(born(rho, total, tol) - sum(born(rho, p, tol) for p in family))
    else:
        add_res = 0.0
    return StateAxiomReport(zero_res, comp_res, add_res, tol)


def _hermitian_basis(dim: int) -> list[np.ndarray]:
    """Real basis of the d^2-dimensional space of Hermitian d x d matrices."""
    basis = []
    for i in range(dim):
        e = np.zeros((dim, dim), dtype=np.complex128)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(dim):
        for j in range(i + 1, dim):
            e = np.zeros((dim, dim), dtype=np.complex128)
            e[i, j] = e[j, i] = 1.0
            basis.append(e)
            f = np.zeros((dim, dim), dtype=np.complex128)
            f[i, j] = 1.0j
            f[j, i] = -1.0j
            basis.append(f)
    return basis


@dataclass(frozen=True)
class Reconstruction:
    state: np.ndarray
    residual: float


def state_reconstruction(family, values, tol: float | None = None) -> Reconstruction:
    """Recover the density operator assigning the given Born values.

    Solves tr(rho P_i) = value_i together with tr(rho) = 1 by least squares
    over a Hermitian parametrization.  The family must span the Hermitian
    matrices (an informationally complete set); the result must be positive
    within tolerance, otherwise the values admit no quantum state.
    """
    tol = tolerance(tol)
    family = [as_matrix(p) for p in family]
    if not family:
        raise InvariantViolation("empty projector family")
    dim = family[0].shape[0]
    for p in family:
        _require_same_dim(family[0], p)
    values = [float(v) for v in values]
    if len(values) != len(family):
        raise DimensionMismatch(f"{len(family)} projectors but {len(values)} values")
    if any(v < -tol or v > 1 + tol for v in values):
        raise InvariantViolation("target values must lie in [0,1]")

    basis = _hermitian_basis(dim)
    rows = [[float(np.real(np.trace(b @ p))) for b in basis] for p in family]
    if np.linalg.matrix_rank(np.array(rows), tol=1e-8) < dim * dim:
        raise InvariantViolation(
            f"family does not determine a state: rank {np.linalg.matrix_rank(np.array(rows), tol=1e-8)}"
            f" < {dim * dim}"
        )
    rows.append([float(np.real(np.trace(b))) for b in basis])
    rhs = values + [1.0]
    theta, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    rho = sum(t * b for t, b in zip(theta, basis))
    eigs = np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)
    if eigs.min() < -max(tol, 1e-8):
        raise InvariantViolation(
            f"values not realizable by a quantum state (minimum eigenvalue {eigs.min():.3e})"
        )
    residual = max(abs(float(np.real(np.trace(rho @ p))) - v) for p, v in zip(family, values))
    residual = max(residual, abs(float(np.real(np.trace(rho))) - 1.0))
    return Reconstruction(rho, residual)


def random_projector(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    """Projector onto the span of Gaussian random vectors of rank 1..dim-1."""
    if rank is None:
        rank = int(rng.integers(1, dim)) if dim > 1 else 1
    g = rng.normal(size=(rank, dim)) + 1j * rng.normal(size=(rank, dim))
    return projector_from_span(list(g))


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Full-support random state rho = G G^dagger / tr(G G^dagger)."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return m / np.trace(m)


def basis_vector(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[i] = 1.0
    return v
