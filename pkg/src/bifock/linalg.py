"""Dense complex linear algebra substrate.

Every operator and vector in the package is a plain ``numpy`` array of
``complex128``.  This module fixes the conventions the rest of the code
relies on: the Hermitian eigensolver, the relative-cutoff numeric rank,
the lexicographic Kronecker pairing and the global tolerance policy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_matrix",
    "dagger",
    "frobenius_norm",
    "operator_norm",
    "hermitian_eig",
    "numeric_rank",
    "kron",
    "orthonormalize_rows",
]


@dataclass(frozen=True)
class Tolerance:
    """Global comparison thresholds.

    ``eq_tol`` is the absolute threshold for equality of matrix entries and
    norms; ``rank_tol`` is the relative singular-value cutoff used whenever a
    rank or a null space is extracted.
    """

    eq_tol: float = 1e-9
    rank_tol: float = 1e-10

    def __post_init__(self):
        if self.eq_tol <= 0 or self.rank_tol <= 0:
            raise InvalidInputError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def as_matrix(m) -> np.ndarray:
    """Coerce to a 2-d complex array and reject non-finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise InvalidInputError(f"expected a matrix, got array of ndim {a.ndim}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def frobenius_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value."""
    if min(m.shape, default=0) == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def hermitian_eig(m, tol: Tolerance = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as the columns of a unitary matrix, so that
    ``m = U @ diag(w) @ U*``.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"matrix is {a.shape[0]}x{a.shape[1]}, not square")
    scale = max(1.0, frobenius_norm(a))
    if frobenius_norm(a - dagger(a)) > tol.eq_tol * scale:
        raise InvalidInputError("matrix is not Hermitian within tolerance")
    w, u = np.linalg.eigh((a + dagger(a)) / 2.0)
    return w, u


def singular_values(m) -> np.ndarray:
    a = as_matrix(m)
    if min(a.shape) == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def numeric_rank(m, tol: Tolerance = DEFAULT_TOL) -> int:
    """Number of singular values above ``rank_tol`` times the largest one."""
    s = singular_values(m)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.sum(s > tol.rank_tol * s[0]))


def kron(a, b) -> np.ndarray:
    """Kronecker product under the fixed pairing (p, q) -> p * dim_b + q."""
    return np.kron(as_matrix(a), as_matrix(b))


def orthonormalize_rows(rows: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Modified Gram-Schmidt on the rows, with re-orthogonalization.

    Rows whose residual after projection is at most ``eq_tol`` (relative to
    the row norm) are treated as dependent and dropped.  The result has
    orthonormal rows spanning the same space, in first-seen order.
    """
    kept: list[np.ndarray] = []
    for row in np.asarray(rows, dtype=complex):
        nrm = np.linalg.norm(row)
        if nrm <= tol.eq_tol:
            continue
        v = row / nrm
        for _ in range(2):  # twice is enough
            for b in kept:
                v = v - np.vdot(b, v) * b
        res = np.linalg.norm(v)
        if res > tol.eq_tol:
            kept.append(v / res)
    if not kept:
        return np.zeros((0, rows.shape[1]), dtype=complex)
    return np.array(kept)
