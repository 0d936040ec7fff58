import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import embed_loops, kron_loops, partial_trace_loops, random_density, random_unit
from qteleport.errors import (
    BadFactorIndex,
    DimensionMismatch,
    InvalidDensityOperator,
    NotNormalized,
    NotOrthonormalInput,
)
from qteleport.tensor import (
    TOL_NORM,
    TOL_UNITARY,
    DensityOperator,
    complete_to_unitary,
    dagger,
    embed,
    fidelity,
    haar_random_qubit,
    kron,
    partial_trace,
    projector,
    unitarity_defect,
)

PLUS = np.array([1, 0], dtype=complex)
MINUS = np.array([0, 1], dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
PSI_MINUS = np.array([0, 1, -1, 0]) / np.sqrt(2)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rand_matrix(rng, r, c):
    return rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))


# kron

def test_kron_identity():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_basis_vectors():
    assert np.array_equal(kron(PLUS, MINUS), [0, 1, 0, 0])


def test_kron_matches_index_formula():
    rng = np.random.default_rng(7)
    a, b = rand_matrix(rng, 2, 2), rand_matrix(rng, 2, 2)
    np.testing.assert_allclose(kron(a, b), kron_loops(a, b), atol=TOL_NORM)


def test_kron_rectangular():
    rng = np.random.default_rng(8)
    a, b = rand_matrix(rng, 2, 3), rand_matrix(rng, 4, 1)
    out = kron(a, b)
    assert out.shape == (8, 3)
    np.testing.assert_allclose(out, kron_loops(a, b), atol=TOL_NORM)


@given(seeds)
def test_kron_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rand_matrix(rng, 2, 2) for _ in range(3))
    np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=TOL_NORM)


# dagger

def test_dagger_identity():
    assert np.array_equal(dagger(np.eye(3)), np.eye(3))


def test_dagger_involution():
    a = rand_matrix(np.random.default_rng(1), 3, 2)
    assert np.array_equal(dagger(dagger(a)), a)


def test_dagger_column_vector_is_row():
    out = dagger(PLUS)
    assert out.shape == (1, 2)
    assert np.array_equal(out, [[1, 0]])


# projector

def test_projector_plus():
    assert np.array_equal(projector(PLUS), np.diag([1, 0]))


def test_projector_idempotent():
    v = random_unit(5, np.random.default_rng(3))
    p = projector(v)
    np.testing.assert_allclose(p @ p, p, atol=TOL_NORM)
    np.testing.assert_allclose(p, p.conj().T, atol=TOL_NORM)


def test_projector_trace_singlet():
    assert abs(np.trace(projector(PSI_MINUS)) - 1) < TOL_NORM


@pytest.mark.parametrize("v", [np.zeros(2), np.array([1.0, 1.0]), np.array([1 + 1e-9, 0])])
def test_projector_rejects_non_unit(v):
    with pytest.raises(NotNormalized):
        projector(v)


# DensityOperator

def test_density_operator_validation():
    DensityOperator(np.eye(4) / 4, (2, 2))
    with pytest.raises(InvalidDensityOperator):
        DensityOperator(np.eye(2), (2,))
    with pytest.raises(InvalidDensityOperator):
        DensityOperator(np.diag([1.5, -0.5]), (2,))
    with pytest.raises(InvalidDensityOperator):
        DensityOperator(np.array([[0.5, 0.1], [0.2, 0.5]]), (2,))
    with pytest.raises(DimensionMismatch):
        DensityOperator(np.eye(4) / 4, (2, 3))


def test_density_operator_is_read_only():
    rho = DensityOperator(np.eye(2) / 2, (2,))
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


# partial_trace

def test_partial_trace_product_state():
    rng = np.random.default_rng(11)
    phi, psi = random_unit(2, rng), random_unit(3, rng)
    rho = DensityOperator.from_vector(kron(phi, psi), (2, 3))
    np.testing.assert_allclose(partial_trace(rho, {0}).matrix, projector(phi), atol=TOL_NORM)


def test_partial_trace_singlet_half_identity():
    rho_mat = projector(PSI_MINUS)
    # oracle computed first, then frozen: the singlet marginal is I/2
    np.testing.assert_allclose(partial_trace_loops(rho_mat, (2, 2), [1]), np.eye(2) / 2,
                               atol=TOL_NORM)
    out = partial_trace(DensityOperator(rho_mat, (2, 2)), {1})
    np.testing.assert_allclose(out.matrix, np.eye(2) / 2, atol=TOL_NORM)
    assert out.shape == (2,)


def test_partial_trace_keep_all_is_identity():
    rho = DensityOperator(random_density(8, np.random.default_rng(2)), (2, 2, 2))
    out = partial_trace(rho, {0, 1, 2})
    np.testing.assert_allclose(out.matrix, rho.matrix, atol=TOL_NORM)


def test_partial_trace_keeps_original_factor_order():
    rng = np.random.default_rng(4)
    a, b = random_density(2, rng), random_density(3, rng)
    c = random_density(2, rng)
    rho = DensityOperator(np.kron(np.kron(a, b), c), (2, 3, 2))
    out = partial_trace(rho, [2, 0])
    assert out.shape == (2, 2)
    np.testing.assert_allclose(out.matrix, np.kron(a, c), atol=TOL_NORM)


@pytest.mark.parametrize("keep", [set(), {4}, {-1}])
def test_partial_trace_bad_index(keep):
    rho = DensityOperator(np.eye(16) / 16, (2, 2, 2, 2))
    with pytest.raises(BadFactorIndex):
        partial_trace(rho, keep)


SHAPES = [(2,), (2, 2), (3, 2), (2, 2, 2), (4, 2), (4, 2, 2), (4, 2, 2, 2)]


@pytest.mark.parametrize("shape", SHAPES)
def test_partial_trace_matches_oracle_all_subsets(shape):
    rng = np.random.default_rng(sum(shape) * 31 + len(shape))
    dim = int(np.prod(shape))
    rho_mat = random_density(dim, rng, rank=min(dim, 3))
    rho = DensityOperator(rho_mat, shape)
    n = len(shape)
    for mask in range(1, 2**n):
        keep = [f for f in range(n) if mask >> f & 1]
        got = partial_trace(rho, keep).matrix
        want = partial_trace_loops(rho_mat, shape, keep)
        assert np.abs(got - want).max() <= TOL_NORM
        assert abs(np.trace(got) - 1) <= TOL_NORM


@settings(max_examples=30, deadline=None)
@given(seeds, st.sets(st.integers(0, 3), min_size=1))
def test_partial_trace_preserves_trace(seed, keep):
    rho = DensityOperator(random_density(32, np.random.default_rng(seed)), (4, 2, 2, 2))
    assert abs(partial_trace(rho, keep).trace() - 1) <= TOL_NORM


# embed

def test_embed_identity():
    np.testing.assert_array_equal(embed(np.eye(8), (0, 3), (4, 2, 2, 2)), np.eye(32))


def test_embed_full_span():
    op = rand_matrix(np.random.default_rng(5), 16, 16)
    np.testing.assert_array_equal(embed(op, (0, 1), (4, 4)), op)


def test_embed_sigma_x_on_second_qubit():
    full = embed(SIGMA_X, (1,), (2, 2))
    np.testing.assert_array_equal(full, kron(np.eye(2), SIGMA_X))
    np.testing.assert_array_equal(full @ kron(PLUS, PLUS), kron(PLUS, MINUS))


@pytest.mark.parametrize("positions,shape", [
    ((0, 3), (4, 2, 2, 2)),
    ((3, 0), (4, 2, 2, 2)),
    ((0, 1, 2), (4, 2, 2, 2)),
    ((2, 1), (2, 3, 2)),
    ((1,), (2, 3, 2)),
])
def test_embed_matches_oracle(positions, shape):
    rng = np.random.default_rng(len(positions) * 10 + shape[0])
    d = int(np.prod([shape[p] for p in positions]))
    op = rand_matrix(rng, d, d)
    np.testing.assert_allclose(embed(op, positions, shape), embed_loops(op, positions, shape),
                               atol=TOL_NORM)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_embed_disjoint_factors_commute(seed):
    rng = np.random.default_rng(seed)
    shape = (4, 2, 2, 2)
    a = embed(rand_matrix(rng, 8, 8), (0, 3), shape)
    b = embed(rand_matrix(rng, 4, 4), (2, 1), shape)
    np.testing.assert_allclose(a @ b, b @ a, atol=1e-10)


def test_embed_errors():
    with pytest.raises(DimensionMismatch):
        embed(np.eye(4), (0,), (2, 2))
    with pytest.raises(BadFactorIndex):
        embed(np.eye(2), (2,), (2, 2))
    with pytest.raises(BadFactorIndex):
        embed(np.eye(4), (0, 0), (2, 2))


# complete_to_unitary

def test_complete_full_basis_supplied():
    q, _ = np.linalg.qr(rand_matrix(np.random.default_rng(6), 4, 4))
    out = complete_to_unitary([(j, q[:, j]) for j in range(4)])
    np.testing.assert_array_equal(out, q)


def test_complete_single_column_is_identity():
    e0 = np.eye(4)[:, 0]
    np.testing.assert_array_equal(complete_to_unitary([(0, e0)]), np.eye(4))


def test_complete_sixteen_dim_is_unitary():
    rng = np.random.default_rng(9)
    q, _ = np.linalg.qr(rand_matrix(rng, 16, 4))
    cols = [(3, q[:, 0]), (7, q[:, 1]), (0, q[:, 2]), (15, q[:, 3])]
    u = complete_to_unitary(cols)
    assert unitarity_defect(u) <= TOL_UNITARY
    for j, v in cols:
        np.testing.assert_array_equal(u[:, j], v)


def test_complete_is_deterministic():
    v = np.array([1, 1, 0, 0]) / np.sqrt(2)
    u1 = complete_to_unitary([(2, v)])
    u2 = complete_to_unitary([(2, v)])
    np.testing.assert_array_equal(u1, u2)
    # e_0 is projected against v first and lands in column 0
    np.testing.assert_allclose(u1[:, 0], [1 / np.sqrt(2), -1 / np.sqrt(2), 0, 0], atol=TOL_NORM)


def test_complete_rejects_non_orthonormal():
    with pytest.raises(NotOrthonormalInput):
        complete_to_unitary([(0, [1, 0, 0]), (1, [1, 0, 0])])
    with pytest.raises(NotOrthonormalInput):
        complete_to_unitary([(0, [2, 0, 0])])


# haar_random_qubit

@given(seeds)
def test_haar_qubit_unit_norm(seed):
    assert abs(np.linalg.norm(haar_random_qubit(seed)) - 1) <= TOL_NORM


def test_haar_qubit_deterministic():
    np.testing.assert_array_equal(haar_random_qubit(42), haar_random_qubit(42))
    assert not np.array_equal(haar_random_qubit(42), haar_random_qubit(43))


def test_haar_qubit_average_projector_is_maximally_mixed():
    mean = sum(projector(haar_random_qubit(s)) for s in range(10_000)) / 10_000
    assert np.abs(mean - np.eye(2) / 2).max() <= 0.02


# fidelity

def test_fidelity_pure_self():
    phi = haar_random_qubit(1)
    assert fidelity(phi, DensityOperator.from_vector(phi)) == pytest.approx(1, abs=TOL_NORM)


def test_fidelity_maximally_mixed_is_half():
    phi = haar_random_qubit(2)
    assert fidelity(phi, DensityOperator(np.eye(2) / 2, (2,))) == pytest.approx(0.5, abs=TOL_NORM)


def test_fidelity_orthogonal_is_zero():
    assert fidelity(PLUS, DensityOperator.from_vector(MINUS)) == 0.0


def test_fidelity_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        fidelity(PLUS, DensityOperator(np.eye(4) / 4, (4,)))


@given(seeds, st.floats(0, 2 * np.pi))
def test_fidelity_global_phase_invariant(seed, alpha):
    rng = np.random.default_rng(seed)
    rho = DensityOperator(random_density(2, rng), (2,))
    phi = random_unit(2, rng)
    assert abs(fidelity(np.exp(1j * alpha) * phi, rho) - fidelity(phi, rho)) <= TOL_NORM
