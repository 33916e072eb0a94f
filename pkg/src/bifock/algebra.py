"""Finite-dimensional matrix *-algebras, states on them, and GNS representations.

An algebra is stored as an orthonormal (Frobenius) basis of the unital
*-algebra generated by a set of matrices.  States are density matrices.
The GNS construction quotients the Gram-matrix null space and returns
explicit representation matrices together with the cyclic vector, which is
always rotated to the first coordinate vector so downstream code can treat
index 0 as the distinguished vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    dagger,
    frobenius_norm,
    hermitian_eig,
    kron,
    numeric_rank,
)

__all__ = [
    "MatrixStarAlgebra",
    "StateOnMatrices",
    "GnsTriple",
    "close_algebra",
    "is_faithful",
    "gns",
    "min_tensor",
    "product_state",
]


@dataclass(frozen=True)
class MatrixStarAlgebra:
    """A unital *-subalgebra of d x d matrices.

    ``closure_basis`` is orthonormal under the Frobenius inner product and
    spans the unital *-algebra generated by ``generators``; it contains the
    identity in its span and is closed under adjoints and products within
    tolerance.
    """

    ambient_dim: int
    generators: tuple[np.ndarray, ...]
    closure_basis: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return len(self.closure_basis)

    def coefficients(self, m: np.ndarray) -> np.ndarray:
        """Expansion coefficients of ``m`` in the closure basis."""
        a = as_matrix(m)
        return np.array([np.vdot(b, a) for b in self.closure_basis])

    def expand(self, coeffs: np.ndarray) -> np.ndarray:
        out = np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
        for c, b in zip(coeffs, self.closure_basis):
            out += c * b
        return out

    def contains(self, m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
        resid = as_matrix(m) - self.expand(self.coefficients(m))
        return frobenius_norm(resid) <= tol.eq_tol * max(1.0, frobenius_norm(m))


@dataclass(frozen=True)
class StateOnMatrices:
    """State phi(a) = trace(density @ a) given by a density matrix."""

    density: np.ndarray
    tol: Tolerance = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        rho = as_matrix(self.density)
        if rho.shape[0] != rho.shape[1]:
            raise InvalidInputError("density matrix must be square")
        if frobenius_norm(rho - dagger(rho)) > self.tol.eq_tol:
            raise InvalidInputError("density matrix is not Hermitian within tolerance")
        w = np.linalg.eigvalsh((rho + dagger(rho)) / 2.0)
        if w.min() < -self.tol.eq_tol:
            raise InvalidInputError(f"density has negative eigenvalue {w.min():.3e}")
        if abs(np.trace(rho) - 1.0) > self.tol.eq_tol:
            raise InvalidInputError(f"density trace is {np.trace(rho):.12g}, not 1")
        object.__setattr__(self, "density", rho)

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    def __call__(self, a: np.ndarray) -> complex:
        return complex(np.trace(self.density @ as_matrix(a)))


def close_algebra(ambient_dim: int, generators, tol: Tolerance = DEFAULT_TOL) -> MatrixStarAlgebra:
    """Smallest unital *-algebra of ambient_dim x ambient_dim matrices containing the generators.

    Iterates: adjoin the identity and adjoints, form all pairwise products,
    re-orthonormalize under the Frobenius inner product, until the dimension
    stabilizes.  Terminates since the dimension is at most ambient_dim**2.
    """
    d = int(ambient_dim)
    gens = tuple(as_matrix(g) for g in generators)
    for g in gens:
        if g.shape != (d, d):
            raise InvalidInputError(f"generator of shape {g.shape} does not act on C^{d}")

    basis: list[np.ndarray] = []

    def adjoin(m: np.ndarray) -> bool:
        v = m.copy()
        nrm = frobenius_norm(v)
        if nrm <= tol.eq_tol:
            return False
        v /= nrm
        for _ in range(2):
            for b in basis:
                v -= np.vdot(b, v) * b
        res = frobenius_norm(v)
        if res <= tol.eq_tol:
            return False
        basis.append(v / res)
        return True

    adjoin(np.eye(d, dtype=complex))
    for g in gens:
        adjoin(g)
        adjoin(dagger(g))

    grew = True
    while grew and len(basis) < d * d:
        grew = False
        snapshot = list(basis)
        for a in snapshot:
            for b in snapshot:
                if adjoin(a @ b):
                    grew = True
    return MatrixStarAlgebra(d, gens, tuple(basis))


def _gram(alg: MatrixStarAlgebra, state: StateOnMatrices) -> np.ndarray:
    """Gram matrix G[q, p] = phi(b_q* b_p) over the closure basis."""
    k = alg.dim
    g = np.zeros((k, k), dtype=complex)
    for q, bq in enumerate(alg.closure_basis):
        # trace(rho b_q^H b_p) = <b_q rho, b_p>_F for Hermitian rho
        br = bq @ state.density
        for p, bp in enumerate(alg.closure_basis):
            g[q, p] = np.vdot(br, bp)
    return (g + dagger(g)) / 2.0


def is_faithful(state: StateOnMatrices, alg: MatrixStarAlgebra, tol: Tolerance = DEFAULT_TOL):
    """Whether phi(a*a) = 0 forces a = 0 on the algebra.

    Returns ``(verdict, witness)``; when the verdict is False, ``witness`` is
    a nonzero algebra element with phi(x*x) at the rank-cutoff scale.
    """
    if state.dim != alg.ambient_dim:
        raise InvalidInputError(
            f"state on C^{state.dim} does not match algebra on C^{alg.ambient_dim}"
        )
    g = _gram(alg, state)
    if numeric_rank(g, tol) == alg.dim:
        return True, None
    w, u = hermitian_eig(g, tol)
    witness = alg.expand(u[:, 0])
    return False, witness


@dataclass(frozen=True)
class GnsTriple:
    """Representation of an algebra on the Hilbert-space quotient of itself.

    ``rep_basis[p]`` represents the p-th closure-basis element; ``cyclic`` is
    the class of the identity and is always the coordinate vector e_0.
    """

    algebra: MatrixStarAlgebra
    state: StateOnMatrices
    gns_dim: int
    rep_basis: tuple[np.ndarray, ...]
    cyclic: np.ndarray
    _to_coords: np.ndarray  # maps basis coefficients to GNS coordinates
    _from_coords: np.ndarray  # right inverse of _to_coords

    def represent(self, m: np.ndarray) -> np.ndarray:
        """GNS matrix of an ambient matrix lying in the algebra's span."""
        coeffs = self.algebra.coefficients(m)
        out = np.zeros((self.gns_dim, self.gns_dim), dtype=complex)
        for c, r in zip(coeffs, self.rep_basis):
            out += c * r
        return out

    def vector_of(self, m: np.ndarray) -> np.ndarray:
        """GNS class [m] of an algebra element."""
        return self._to_coords @ self.algebra.coefficients(m)


def _completion_unitary(first_column: np.ndarray) -> np.ndarray:
    """Deterministic unitary whose first column is the given unit vector."""
    n = first_column.shape[0]
    cols = [first_column]
    for j in range(n):
        v = np.zeros(n, dtype=complex)
        v[j] = 1.0
        for _ in range(2):
            for b in cols:
                v = v - np.vdot(b, v) * b
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            cols.append(v / nrm)
        if len(cols) == n:
            break
    return np.array(cols).T


def gns(alg: MatrixStarAlgebra, state: StateOnMatrices, tol: Tolerance = DEFAULT_TOL) -> GnsTriple:
    """GNS construction for ``(alg, state)``.

    The inner product <[a],[b]> = phi(b*a) is realized by the Gram matrix of
    the closure basis; its numeric null space is quotiented out, left
    multiplication descends to the quotient, and the class of the identity
    becomes the cyclic vector (rotated to e_0).
    """
    g = _gram(alg, state)
    w, u = hermitian_eig(g, tol)
    cutoff = tol.rank_tol * max(w.max(initial=0.0), 0.0)
    keep = np.where(w > cutoff)[0]
    if keep.size == 0:
        raise InvalidInputError("state annihilates the whole algebra; no GNS space")
    lam = w[keep]
    uk = u[:, keep]
    to_coords = (np.sqrt(lam)[:, None]) * dagger(uk)
    from_coords = uk / np.sqrt(lam)[None, :]

    k = alg.dim
    reps = []
    for a in alg.closure_basis:
        mult = np.zeros((k, k), dtype=complex)  # left multiplication in the closure basis
        for p, bp in enumerate(alg.closure_basis):
            mult[:, p] = alg.coefficients(a @ bp)
        reps.append(to_coords @ mult @ from_coords)

    ident = alg.coefficients(np.eye(alg.ambient_dim, dtype=complex))
    cyclic = to_coords @ ident

    # Rotate so the cyclic vector is exactly e_0.
    nrm = np.linalg.norm(cyclic)
    if abs(nrm - 1.0) > 1e-6:
        raise InvalidInputError(f"cyclic vector has norm {nrm:.6g}; state is not normalized")
    wmat = _completion_unitary(cyclic / nrm)
    rot = dagger(wmat)
    reps = [rot @ r @ wmat for r in reps]
    to_coords = rot @ to_coords
    from_coords = from_coords @ wmat
    e0 = np.zeros(keep.size, dtype=complex)
    e0[0] = 1.0

    return GnsTriple(
        algebra=alg,
        state=state,
        gns_dim=int(keep.size),
        rep_basis=tuple(reps),
        cyclic=e0,
        _to_coords=to_coords,
        _from_coords=from_coords,
    )


def min_tensor(alg_l: MatrixStarAlgebra, alg_r: MatrixStarAlgebra) -> MatrixStarAlgebra:
    """Tensor product algebra on C^(dL*dR) generated by a (x) I and I (x) b.

    At finite dimension the minimal and maximal tensor norms coincide, so the
    Kronecker construction is the tensor product; the basis is the set of
    Kronecker products of the factor bases, which is automatically
    orthonormal and multiplicatively closed.
    """
    il = np.eye(alg_l.ambient_dim, dtype=complex)
    ir = np.eye(alg_r.ambient_dim, dtype=complex)
    gens = tuple(kron(a, ir) for a in alg_l.generators) + tuple(
        kron(il, b) for b in alg_r.generators
    )
    basis = tuple(kron(a, b) for a in alg_l.closure_basis for b in alg_r.closure_basis)
    return MatrixStarAlgebra(alg_l.ambient_dim * alg_r.ambient_dim, gens, basis)


def product_state(state_l: StateOnMatrices, state_r: StateOnMatrices) -> StateOnMatrices:
    """State with density rho_L (x) rho_R, so phi(a (x) b) = phi_L(a) phi_R(b)."""
    return StateOnMatrices(kron(state_l.density, state_r.density), tol=state_l.tol)
