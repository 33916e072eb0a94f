import numpy as np
import pytest

from bifock.errors import InvalidInputError
from bifock.linalg import (
    DEFAULT_TOL,
    Tolerance,
    hermitian_eig,
    kron,
    numeric_rank,
    orthonormalize_rows,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def rand_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def test_hermitian_eig_identity():
    w, u = hermitian_eig(np.eye(2))
    assert np.allclose(w, [1.0, 1.0])
    assert np.allclose(u.conj().T @ u, np.eye(2))


def test_hermitian_eig_diagonal():
    w, _ = hermitian_eig(np.diag([3.0, -1.0]))
    assert np.allclose(w, [-1.0, 3.0])


def test_hermitian_eig_pauli_x():
    # characteristic polynomial lambda^2 - 1 by hand
    w, u = hermitian_eig(SX)
    assert np.allclose(w, [-1.0, 1.0])
    assert np.allclose(u @ np.diag(w) @ u.conj().T, SX)


def test_hermitian_eig_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        hermitian_eig(np.ones((2, 3)))
    with pytest.raises(InvalidInputError):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_hermitian_eig_reconstructs_random(n):
    rng = np.random.default_rng(20240 + n)
    m = rand_hermitian(rng, n)
    w, u = hermitian_eig(m)
    assert np.all(np.diff(w) >= -1e-12)
    assert np.linalg.norm(u @ np.diag(w) @ u.conj().T - m) <= 10 * DEFAULT_TOL.eq_tol
    assert np.linalg.norm(u.conj().T @ u - np.eye(n)) <= 10 * DEFAULT_TOL.eq_tol


def test_numeric_rank_zero_and_identity():
    assert numeric_rank(np.zeros((3, 3))) == 0
    assert numeric_rank(np.eye(3)) == 3


def test_numeric_rank_outer_product():
    rng = np.random.default_rng(7)
    u = rng.normal(size=4) + 1j * rng.normal(size=4)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    u /= np.linalg.norm(u)
    v /= np.linalg.norm(v)
    assert numeric_rank(np.outer(u, v.conj())) == 1


def test_kron_identity_and_diagonal():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(kron(np.diag([1.0, 2.0]), np.diag([1.0, 3.0])), np.diag([1.0, 3.0, 2.0, 6.0]))


def test_kron_basis_pairing():
    # sigma_x (x) sigma_x maps e_1 (x) e_1 to e_2 (x) e_2 under (p, q) -> p*dim+q
    e00 = np.zeros(4)
    e00[0] = 1.0
    out = kron(SX, SX) @ e00
    expected = np.zeros(4)
    expected[3] = 1.0
    assert np.allclose(out, expected)


def test_kron_associative_exactly():
    # dyadic entries so float products are exact and grouping cannot matter
    rng = np.random.default_rng(11)
    a, b, c = (
        (rng.integers(-4, 5, size=(2, 2)) + 1j * rng.integers(-4, 5, size=(2, 2))) / 4.0
        for _ in range(3)
    )
    left = kron(kron(a, b), c)
    right = kron(a, kron(b, c))
    assert np.array_equal(left, right)


def test_rank_multiplicative_under_kron():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(3, 3)) @ np.diag([1.0, 1.0, 0.0]) @ rng.normal(size=(3, 3))
    b = rng.normal(size=(2, 2))
    assert numeric_rank(kron(a, b)) == numeric_rank(a) * numeric_rank(b)


def test_orthonormalize_rows_drops_dependent():
    rows = np.array([[1.0, 0.0], [2.0, 0.0], [1.0, 1.0]], dtype=complex)
    q = orthonormalize_rows(rows)
    assert q.shape == (2, 2)
    assert np.allclose(q @ q.conj().T, np.eye(2))


def test_tolerance_validation():
    with pytest.raises(InvalidInputError):
        Tolerance(eq_tol=0.0)
