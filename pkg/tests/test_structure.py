import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bekktail.errors import ComplexEigenvalues, NoCommonRealEigenvector, NotDiagonalizable
from bekktail.fixtures import (circulant_3x3, non_triangular_pair, repeated_eigenvalue_3x3, rotated_triangular_pair,
                               symmetric_pair, triangular_pair, upper_triangular_2x2)
from bekktail.structure import (StructureKind, check_commuting, classify, classify_spec, simultaneous_diagonalize,
                                simultaneous_triangularize_2d, spectral_radius, struct_tol)


def _reconstructs(dec, mats):
    for A, T in zip(mats, dec.transformed):
        assert np.max(np.abs(dec.P @ A @ dec.P_inv - T)) <= dec.tol
    assert np.allclose(dec.P @ dec.P_inv, np.eye(len(dec.P)), atol=1e-10)
    assert dec.residual <= dec.tol


def test_commuting_symmetric_pair():
    assert check_commuting(symmetric_pair().lag_matrices())


def test_rotated_triangular_pair_does_not_commute():
    assert not check_commuting(rotated_triangular_pair().lag_matrices())


def test_single_matrix_commutes():
    assert check_commuting([np.array([[1.0, 2.0], [3.0, 4.0]])])


def test_upper_triangular_diagonalization():
    mats = upper_triangular_2x2().lag_matrices()
    dec = simultaneous_diagonalize(mats)
    assert np.allclose(np.diag(dec.transformed[0]), [0.5, 0.8])
    # rows of P proportional to (1, c/(a-b)) and (0, 1)
    P = dec.P / dec.P[:, [0, 1]][np.arange(2), np.argmax(np.abs(dec.P), axis=1)][:, None]
    assert np.allclose(P[0], [1.0, 0.2 / (0.5 - 0.8)]) and np.allclose(P[1], [0.0, 1.0])
    _reconstructs(dec, mats)


def test_circulant_eigenvalues():
    dec = simultaneous_diagonalize(circulant_3x3(0.5, 0.2).lag_matrices())
    assert np.allclose(sorted(np.diag(dec.transformed[0])), [0.3, 0.3, 0.9])


def test_commuting_pair_diagonals():
    dec = simultaneous_diagonalize(symmetric_pair().lag_matrices())
    d1, d2 = (np.diag(D) for D in dec.transformed)
    assert np.allclose(sorted(d1), [0.6, 1.2]) and np.allclose(d2, [0.4, 0.4])


def test_repeated_eigenvalue_3x3():
    mats = repeated_eigenvalue_3x3().lag_matrices()
    dec = simultaneous_diagonalize(mats)
    assert np.allclose(sorted(np.diag(dec.transformed[0])), [0.5, 0.5, 0.9])
    _reconstructs(dec, mats)


def test_rotation_has_complex_eigenvalues():
    with pytest.raises(ComplexEigenvalues):
        simultaneous_diagonalize([np.array([[0.0, -1.0], [1.0, 0.0]])])


def test_jordan_block_not_diagonalizable():
    with pytest.raises(NotDiagonalizable):
        simultaneous_diagonalize([np.array([[0.5, 1.0], [0.0, 0.5]])])
    assert classify([np.array([[0.5, 1.0], [0.0, 0.5]])]).kind is StructureKind.SIM_TRIANGULARIZABLE_2D


def test_triangular_pair_identity_transform():
    mats = triangular_pair().lag_matrices()
    dec = simultaneous_triangularize_2d(mats)
    assert np.allclose(np.abs(dec.P), np.eye(2))
    for A, U in zip(mats, dec.transformed):
        assert np.allclose(np.abs(U), np.abs(A))


def test_rotated_pair_triangularization():
    a, b, c = 0.5, 0.9, 0.3
    mats = rotated_triangular_pair(a, b, c).lag_matrices()
    dec = classify(mats)
    assert dec.kind is StructureKind.SIM_TRIANGULARIZABLE_2D
    _reconstructs(dec, mats)
    U1, U2 = dec.transformed
    assert np.allclose(np.diag(U1), [(a + b) / 2] * 2)
    assert np.allclose(np.diag(U2), [a + c, b - c])
    # off-diagonal entries agree with b - a up to the eigenvector scaling
    assert np.isclose(abs(U1[0, 1] / U2[0, 1]), 1.0)


def test_non_triangularizable_pair():
    mats = non_triangular_pair().lag_matrices()
    with pytest.raises(NoCommonRealEigenvector):
        simultaneous_triangularize_2d(mats)
    assert classify(mats).kind is StructureKind.GENERAL


def test_diagonal_input_is_already_diagonal():
    assert classify([np.diag([0.5, 0.8])]).kind is StructureKind.ALREADY_DIAGONAL


def test_order_two_is_general():
    from bekktail.fixtures import single_entry_order2
    assert classify_spec(single_entry_order2()).kind is StructureKind.GENERAL


def test_spectral_radius_examples():
    assert spectral_radius(np.eye(3)) == pytest.approx(1.0)
    assert spectral_radius(np.array([[0.0, 1.0], [0.0, 0.0]])) == 0.0
    assert spectral_radius(np.array([[0.5, 0.2], [0.0, 0.8]])) == pytest.approx(0.8)


@given(st.integers(2, 3), st.integers(0, 2 ** 32 - 1))
def test_kronecker_square_radius(d, seed):
    A = np.random.default_rng(seed).normal(size=(d, d))
    assert spectral_radius(np.kron(A, A)) == pytest.approx(spectral_radius(A) ** 2, rel=1e-8, abs=1e-8)


@given(st.integers(2, 4), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_commuting_family_reconstruction_and_similarity(d, l, seed):
    g = np.random.default_rng(seed)
    V = g.normal(size=(d, d)) + 2 * np.eye(d)
    Vi = np.linalg.inv(V)
    diags = g.uniform(-1, 1, size=(l, d))
    mats = [V @ np.diag(x) @ Vi for x in diags]
    dec = simultaneous_diagonalize(mats)
    _reconstructs(dec, mats)
    for A, D in zip(mats, dec.transformed):
        assert np.allclose(np.sort(np.linalg.eigvals(A).real), np.sort(np.diag(D)), atol=1e-8)


@given(st.integers(0, 2 ** 32 - 1))
def test_triangular_family_reconstruction(seed):
    g = np.random.default_rng(seed)
    V = g.normal(size=(2, 2)) + 2 * np.eye(2)
    mats = [np.linalg.inv(V) @ np.triu(g.normal(size=(2, 2))) @ V for _ in range(2)]
    dec = classify(mats)
    assert dec.kind is not StructureKind.GENERAL
    _reconstructs(dec, mats)
    for A, U in zip(mats, dec.transformed):
        assert np.allclose(np.sort(np.linalg.eigvals(A).real), np.sort(np.diag(U)), atol=1e-8)


def test_decomposition_is_deterministic():
    mats = circulant_3x3(0.5, 0.2).lag_matrices()
    a, b = simultaneous_diagonalize(mats), simultaneous_diagonalize(mats)
    assert np.array_equal(a.P, b.P)


def test_struct_tol_scales_with_norm():
    assert struct_tol([np.eye(2) * 10]) == pytest.approx(1e-8 * 11)
