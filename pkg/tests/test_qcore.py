import numpy as np
import pytest

from subspace_witness.core.exceptions import (
    DimensionMismatch,
    NonHermitian,
    NonHermitianObservable,
    NonUnitary,
    NotNormalized,
    NotPositive,
)
from subspace_witness.quantum.qcore import (
    SX,
    SZ,
    DensityMatrix,
    PureState,
    basis_label,
    conjugate,
    embed,
    expect,
    hermitian_eigen,
    is_unitary,
    kron,
    local_z_unitary,
    pauli_product,
    psd_sqrt,
    random_density_matrix,
    random_local_unitary,
    random_product_density,
)
from subspace_witness.quantum.states import BellParams, bell


def _random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


@pytest.mark.unit
def test_kron_orders_qubit_one_first():
    m = kron(SZ, np.eye(2))
    assert np.allclose(np.diag(m).real, [1, 1, -1, -1])
    assert np.allclose(embed(SZ, 1, 2), m)
    assert basis_label(3, 2) == "11"


@pytest.mark.unit
def test_pauli_product_zz_diagonal():
    assert np.allclose(np.diag(pauli_product("zz")).real, [1, -1, -1, 1])


@pytest.mark.unit
def test_embed_rejects_qubit_outside_register():
    with pytest.raises(DimensionMismatch):
        embed(SX, 3, 2)


@pytest.mark.unit
def test_bell_correlators():
    rho = bell(BellParams()).density()
    assert expect(rho, pauli_product("zz")) == pytest.approx(1.0, abs=1e-12)
    assert expect(rho, pauli_product("xx")) == pytest.approx(1.0, abs=1e-12)
    assert expect(rho, pauli_product("yy")) == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.unit
def test_expect_rejects_non_hermitian_observable():
    rho = DensityMatrix.maximally_mixed(1)
    with pytest.raises(NonHermitianObservable):
        expect(rho, np.array([[0, 1], [0, 0]]))


@pytest.mark.unit
def test_expect_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        expect(DensityMatrix.maximally_mixed(1), pauli_product("zz"))


@pytest.mark.unit
def test_conjugate_rejects_non_unitary():
    with pytest.raises(NonUnitary):
        conjugate(np.eye(2), 2 * np.eye(2))


@pytest.mark.unit
def test_conjugate_applies_u_m_udagger():
    # X Z X = -Z
    assert np.allclose(conjugate(SZ, SX), -SZ)


@pytest.mark.unit
@pytest.mark.parametrize("dim", [2, 4, 8, 16])
def test_hermitian_eigen_matches_lapack(rng, dim):
    for _ in range(50):
        h = _random_hermitian(rng, dim)
        values, vectors = hermitian_eigen(h, vectors=True)
        assert np.allclose(values, np.linalg.eigvalsh(h), atol=1e-10)
        assert np.all(np.diff(values) >= 0)
        assert np.max(np.abs(h @ vectors - vectors * values)) < 1e-8
        assert is_unitary(vectors)


@pytest.mark.unit
@pytest.mark.parametrize("rank", [1, 2, 4])
def test_random_density_matrices_are_accepted(rng, rank):
    # low-rank and full-rank states alike must pass PSD validation
    for _ in range(200):
        rho = random_density_matrix(2, rng, rank=rank)
        assert np.allclose(rho.eigenvalues(), np.linalg.eigvalsh(rho.matrix), atol=1e-12)


@pytest.mark.unit
def test_kron_is_associative(rng):
    a, b, c = (_random_hermitian(rng, 2) for _ in range(3))
    assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-14)


@pytest.mark.unit
def test_conjugate_preserves_spectrum(rng):
    h = _random_hermitian(rng, 4)
    u = random_local_unitary(2, rng)
    assert np.allclose(hermitian_eigen(conjugate(h, u)), hermitian_eigen(h), atol=1e-10)


@pytest.mark.unit
def test_hermitian_eigen_degenerate_spectrum():
    values = hermitian_eigen(np.diag([1.0, 1.0, 0.5, 0.5]))
    assert np.allclose(values, [0.5, 0.5, 1.0, 1.0])


@pytest.mark.unit
def test_hermitian_eigen_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        hermitian_eigen(np.array([[1, 2], [0, 1]]))


@pytest.mark.unit
def test_psd_sqrt_squares_back(rng):
    rho = random_density_matrix(2, rng)
    root = psd_sqrt(rho.matrix)
    assert np.allclose(root @ root, rho.matrix, atol=1e-10)


@pytest.mark.unit
def test_density_matrix_validation():
    with pytest.raises(NotNormalized):
        DensityMatrix(np.eye(2))
    with pytest.raises(NotPositive):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(NonHermitian):
        DensityMatrix(np.array([[0.5, 0.1], [0.3, 0.5]]))
    with pytest.raises(DimensionMismatch):
        DensityMatrix(np.eye(3) / 3)


@pytest.mark.unit
def test_density_matrix_is_read_only():
    rho = DensityMatrix.maximally_mixed(2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


@pytest.mark.unit
def test_purity():
    assert bell(BellParams()).density().purity() == pytest.approx(1.0)
    assert DensityMatrix.maximally_mixed(2).purity() == pytest.approx(0.25)


@pytest.mark.unit
def test_pure_state_normalisation():
    with pytest.raises(NotNormalized):
        PureState(np.array([1.0, 1.0]))
    with pytest.raises(DimensionMismatch):
        PureState(np.ones(3) / np.sqrt(3))


@pytest.mark.unit
def test_random_generators_are_valid(rng):
    assert random_density_matrix(3, rng).n == 3
    low_rank = random_density_matrix(2, rng, rank=1)
    assert low_rank.purity() == pytest.approx(1.0, abs=1e-10)
    assert is_unitary(random_local_unitary(3, rng))
    product = random_product_density(2, rng)
    assert product.eigenvalues()[0] >= -1e-12


@pytest.mark.unit
def test_random_generators_are_deterministic():
    a = random_density_matrix(2, np.random.default_rng(5))
    b = random_density_matrix(2, np.random.default_rng(5))
    assert np.array_equal(a.matrix, b.matrix)


@pytest.mark.unit
def test_local_z_unitary_phases_coherence():
    rho = bell(BellParams()).density()
    rotated = conjugate(rho.matrix, local_z_unitary([0.3, 0.4]))
    assert rotated[0, 3] == pytest.approx(0.5 * np.exp(-0.7j))
