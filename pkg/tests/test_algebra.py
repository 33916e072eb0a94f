import numpy as np
import pytest

from bifock.algebra import (
    StateOnMatrices,
    close_algebra,
    gns,
    is_faithful,
    min_tensor,
    product_state,
)
from bifock.errors import InvalidInputError
from bifock.linalg import DEFAULT_TOL, kron

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
E11 = np.array([[1, 0], [0, 0]], dtype=complex)


def rand_density(rng, n, full_rank=True):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    if full_rank:
        rho += 0.1 * np.eye(n)
    return rho / np.trace(rho)


def explicit_gram(basis, rho):
    """Independent Gram-matrix oracle: G[q, p] = trace(rho b_q* b_p)."""
    k = len(basis)
    g = np.zeros((k, k), dtype=complex)
    for q in range(k):
        for p in range(k):
            g[q, p] = np.trace(rho @ basis[q].conj().T @ basis[p])
    return g


def test_close_algebra_unital_closure_of_nothing():
    alg = close_algebra(2, [])
    assert alg.dim == 1
    assert np.allclose(alg.closure_basis[0], np.eye(2) / np.sqrt(2))


def test_close_algebra_paulis_exhaust_m2():
    # sigma_x sigma_z is proportional to sigma_y; with the identity this spans M_2
    alg = close_algebra(2, [SX, SZ])
    assert alg.dim == 4


def test_close_algebra_commutative_tensor_factor():
    g = kron(SX, np.eye(2))
    alg = close_algebra(4, [g])
    assert alg.dim == 2  # (sigma_x (x) I)^2 = I
    assert alg.contains(np.eye(4))
    assert alg.contains(g)


def test_close_algebra_is_star_and_multiplicatively_closed():
    rng = np.random.default_rng(5)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    alg = close_algebra(3, [g])
    for a in alg.closure_basis:
        assert alg.contains(a.conj().T)
        for b in alg.closure_basis:
            assert alg.contains(a @ b)


def test_is_faithful_full_rank_density():
    alg = close_algebra(2, [SX, SZ])
    ok, witness = is_faithful(StateOnMatrices(np.eye(2) / 2), alg)
    assert ok and witness is None


def test_is_faithful_pure_state_on_m2_fails():
    alg = close_algebra(2, [SX, SZ])
    state = StateOnMatrices(E11)
    ok, witness = is_faithful(state, alg)
    assert not ok
    # witness x has phi(x*x) at the cutoff scale, e.g. x = E22 works by hand
    val = state(witness.conj().T @ witness)
    assert abs(val) <= 1e-10
    assert np.linalg.norm(witness) > 0.1


def test_is_faithful_scalars_always():
    alg = close_algebra(2, [])
    ok, _ = is_faithful(StateOnMatrices(E11), alg)
    assert ok


def test_is_faithful_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        is_faithful(StateOnMatrices(np.eye(3) / 3), close_algebra(2, []))


def test_gns_scalars():
    alg = close_algebra(2, [])
    triple = gns(alg, StateOnMatrices(E11))
    assert triple.gns_dim == 1
    assert np.allclose(triple.represent(np.eye(2)), [[1.0]])
    assert np.allclose(triple.cyclic, [1.0])


def test_gns_dim_matches_explicit_gram_rank_tracial():
    alg = close_algebra(2, [SX, SZ])
    rho = np.eye(2, dtype=complex) / 2
    oracle_rank = np.linalg.matrix_rank(explicit_gram(alg.closure_basis, rho), tol=1e-10)
    triple = gns(alg, StateOnMatrices(rho))
    assert triple.gns_dim == oracle_rank == 4


def test_gns_dim_matches_explicit_gram_rank_pure():
    alg = close_algebra(2, [SX, SZ])
    oracle_rank = np.linalg.matrix_rank(explicit_gram(alg.closure_basis, E11), tol=1e-10)
    triple = gns(alg, StateOnMatrices(E11))
    assert triple.gns_dim == oracle_rank == 2


@pytest.mark.parametrize("seed", range(6))
def test_gns_invariants_random(seed):
    rng = np.random.default_rng(100 + seed)
    d = int(rng.integers(2, 5))
    gens = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(2)]
    alg = close_algebra(d, gens)
    state = StateOnMatrices(rand_density(rng, d))
    triple = gns(alg, state)

    # cyclic vector is e_0 and reproduces the state on every basis element
    assert np.allclose(triple.cyclic, np.eye(triple.gns_dim)[:, 0])
    for a, r in zip(alg.closure_basis, triple.rep_basis):
        got = np.vdot(triple.cyclic, r @ triple.cyclic)
        assert abs(got - state(a)) <= 10 * DEFAULT_TOL.eq_tol

    # multiplicativity on random basis pairs
    idx = rng.integers(0, alg.dim, size=(8, 2))
    for p, q in idx:
        a, b = alg.closure_basis[p], alg.closure_basis[q]
        lhs = triple.rep_basis[p] @ triple.rep_basis[q]
        rhs = triple.represent(a @ b)
        assert np.linalg.norm(lhs - rhs) <= 10 * DEFAULT_TOL.eq_tol

    # adjoints go to adjoints
    for p, a in enumerate(alg.closure_basis):
        assert np.linalg.norm(triple.rep_basis[p].conj().T - triple.represent(a.conj().T)) <= 1e-7

    # the map a -> rep(a) cyclic spans the GNS space
    cols = np.array([r @ triple.cyclic for r in triple.rep_basis]).T
    assert np.linalg.matrix_rank(cols, tol=1e-8) == triple.gns_dim


def test_faithful_iff_separating_cyclic():
    alg = close_algebra(2, [SX, SZ])
    for rho, expect in [(np.eye(2) / 2, True), (E11, False)]:
        state = StateOnMatrices(rho)
        triple = gns(alg, state)
        cols = np.array([r @ triple.cyclic for r in triple.rep_basis]).T
        separating = np.linalg.matrix_rank(cols, tol=1e-8) == alg.dim
        ok, _ = is_faithful(state, alg)
        assert ok == separating == expect


def test_full_rank_density_faithful_on_subalgebras():
    rng = np.random.default_rng(42)
    state = StateOnMatrices(rand_density(rng, 4))
    for gens in ([], [kron(SX, np.eye(2))], [kron(SX, SZ), kron(SY, np.eye(2))]):
        ok, _ = is_faithful(state, close_algebra(4, gens))
        assert ok


def test_min_tensor_dims():
    scalars = close_algebra(2, [])
    m2 = close_algebra(2, [SX, SZ])
    diag = close_algebra(2, [SZ])
    assert min_tensor(scalars, scalars).dim == 1
    assert min_tensor(m2, m2).dim == 16
    t = min_tensor(diag, diag)
    assert t.dim == 4
    assert t.ambient_dim == 4
    # commutative: all basis elements are diagonal
    for b in t.closure_basis:
        assert np.allclose(b, np.diag(np.diag(b)))


def test_product_state_densities():
    tr2 = StateOnMatrices(np.eye(2) / 2)
    assert np.allclose(product_state(tr2, tr2).density, np.eye(4) / 4)
    biased = StateOnMatrices(np.diag([2 / 3, 1 / 3]).astype(complex))
    both = product_state(biased, biased)
    assert np.allclose(both.density, np.diag([4 / 9, 2 / 9, 2 / 9, 1 / 9]))
    # phi(sigma_z (x) sigma_z) = (2/3 - 1/3)^2 = 1/9
    assert abs(both(kron(SZ, SZ)) - 1 / 9) < 1e-12


def test_state_validation_errors():
    with pytest.raises(InvalidInputError):
        StateOnMatrices(np.diag([0.5, 0.4]))  # trace 0.9
    with pytest.raises(InvalidInputError):
        StateOnMatrices(np.array([[0.5, 0.3], [0.0, 0.5]]))  # not Hermitian
    with pytest.raises(InvalidInputError):
        StateOnMatrices(np.diag([1.5, -0.5]))  # negative eigenvalue
