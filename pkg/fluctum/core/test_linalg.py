"""
Tests for dense linear algebra: Jacobi eigensolver, norms, tensor structure.
"""

import math

import numpy as np
import pytest

from fluctum.config.settings import settings
from fluctum.core.linalg import (
    Subsystem,
    eigh,
    func_hermitian,
    hs_inner,
    identity,
    kron,
    maximally_entangled_state,
    norm_interpolation_check,
    partial_trace,
    positive_sqrt,
    schatten_norm,
    singular_values,
)
from fluctum.core.sampling import (
    complex_gaussian,
    make_rng,
    perturb_seed,
    random_density_matrix,
    random_hermitian,
    random_unitary,
)
from fluctum.utils.error_handling import (
    ConvergenceError,
    DimensionMismatchError,
    InvalidInputError,
    InvalidParameterError,
    NotPositiveError,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def test_hs_inner_basic_values():
    assert hs_inner(identity(2), identity(2)) == pytest.approx(2.0)
    assert abs(hs_inner(SX, SY)) < 1e-15


def test_hs_inner_matches_elementwise_sum_and_is_conjugate_symmetric():
    rng = make_rng(1)
    A = complex_gaussian((4, 4), rng)
    B = complex_gaussian((4, 4), rng)
    expected = sum(np.conj(A[i, j]) * B[i, j] for i in range(4) for j in range(4))
    assert abs(hs_inner(A, B) - expected) < 1e-12
    assert abs(hs_inner(A, B) - np.conj(hs_inner(B, A))) < 1e-12


def test_hs_inner_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        hs_inner(identity(2), identity(3))


def test_hs_norm_equals_schatten_two():
    rng = make_rng(2)
    A = complex_gaussian((3, 3), rng)
    value = hs_inner(A, A)
    assert abs(value.imag) < 1e-12 and value.real >= 0
    assert abs(math.sqrt(value.real) - schatten_norm(A, 2)) < 1e-12


def test_schatten_norm_trivial_cases():
    assert schatten_norm(identity(4), 1) == pytest.approx(4.0, abs=1e-12)
    assert schatten_norm(SZ, math.inf) == pytest.approx(1.0, abs=1e-12)


def test_schatten_norm_rejects_p_below_one():
    with pytest.raises(InvalidParameterError):
        schatten_norm(SZ, 0.5)


@pytest.mark.parametrize("dim", [2, 3, 4, 5])
def test_schatten_norm_is_monotone_in_p(dim):
    rng = make_rng(3, dim)
    for _ in range(100):
        A = complex_gaussian((dim, dim), rng)
        norms = [schatten_norm(A, p) for p in (1, 2, 4, math.inf)]
        for larger, smaller in zip(norms, norms[1:]):
            assert smaller <= larger * (1 + 1e-12)


def test_eigh_pauli_z():
    spectrum = eigh(SZ)
    assert np.allclose(spectrum.eigenvalues, [-1.0, 1.0], atol=1e-15)


def test_eigh_diagonal_permutes_identity():
    spectrum = eigh(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(spectrum.eigenvalues, [1.0, 2.0, 3.0], atol=1e-15)
    assert np.allclose(spectrum.eigenvectors, np.eye(3)[:, [1, 2, 0]], atol=1e-15)


@pytest.mark.parametrize("dim", [2, 3, 5, 8])
def test_eigh_reconstruction_and_orthonormality(dim):
    rng = make_rng(4, dim)
    for _ in range(20):
        H = random_hermitian(dim, rng)
        spectrum = eigh(H)
        V = spectrum.eigenvectors
        assert np.all(np.diff(spectrum.eigenvalues) >= 0)
        assert np.linalg.norm(V.conj().T @ V - np.eye(dim)) < 1e-12
        residual = np.linalg.norm(spectrum.reconstruct() - H)
        assert residual <= settings.tolerances.reconstruction * max(1.0, np.linalg.norm(H))


def test_eigh_phase_convention():
    rng = make_rng(5)
    V = eigh(random_hermitian(4, rng)).eigenvectors
    for j in range(4):
        lead = V[np.argmax(np.abs(V[:, j])), j]
        assert abs(lead.imag) < 1e-14 and lead.real > 0


def test_eigh_degenerate_spectrum_stays_orthonormal():
    rng = make_rng(6)
    U = random_unitary(4, rng)
    H = U @ np.diag([1.0, 1.0, 2.0, 2.0]) @ U.conj().T
    spectrum = eigh(H)
    assert np.allclose(spectrum.eigenvalues, [1, 1, 2, 2], atol=1e-12)
    V = spectrum.eigenvectors
    assert np.linalg.norm(V.conj().T @ V - np.eye(4)) < 1e-12


def test_eigh_rejects_non_hermitian():
    with pytest.raises(InvalidInputError):
        eigh(np.array([[0, 1], [0, 0]], dtype=complex))


def test_eigh_sweep_cap(monkeypatch):
    monkeypatch.setattr(settings, "jacobi_max_sweeps", 0)
    with pytest.raises(ConvergenceError):
        eigh(SX)


def test_eigh_checks_reconstruction(monkeypatch):
    H = random_hermitian(4, make_rng(11))
    eigh(H)
    monkeypatch.setattr(settings.tolerances, "reconstruction", -1.0)
    with pytest.raises(ConvergenceError):
        eigh(H)


def test_func_hermitian_exponential():
    assert np.allclose(func_hermitian(SZ, lambda x: np.exp(-0.0 * x)), identity(2))
    assert np.allclose(func_hermitian(SZ, lambda x: np.exp(-x)), np.diag([math.exp(-1), math.exp(1)]), atol=1e-14)


def test_func_hermitian_matches_taylor_series():
    rng = make_rng(7)
    H = random_hermitian(4, rng, scale=0.5)
    series = np.zeros((4, 4), dtype=complex)
    term = identity(4)
    for k in range(41):
        series += term
        term = term @ H / (k + 1)
    assert np.linalg.norm(func_hermitian(H, np.exp) - series) < 1e-10 * np.linalg.norm(series)


def test_positive_sqrt():
    assert np.allclose(positive_sqrt(identity(3)), identity(3))
    assert np.allclose(positive_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
    rng = make_rng(8)
    B = complex_gaussian((4, 4), rng)
    A = B.conj().T @ B
    P = positive_sqrt(A)
    assert np.linalg.norm(P @ P - A) < 1e-10 * max(1.0, np.linalg.norm(A))
    assert eigh(P).eigenvalues[0] >= -1e-12


def test_positive_sqrt_rejects_negative_matrix():
    with pytest.raises(NotPositiveError):
        positive_sqrt(np.diag([1.0, -0.5]))


def test_singular_values_of_non_hermitian_matrix():
    A = np.array([[0, 2], [0, 0]], dtype=complex)
    assert np.allclose(singular_values(A), [0.0, 2.0], atol=1e-12)


def test_norm_interpolation_inequality():
    rng = make_rng(9)
    for _ in range(50):
        square_hs, product = norm_interpolation_check(complex_gaussian((3, 3), rng))
        assert square_hs <= product * (1 + 1e-12)


def test_kron_identity_and_mixed_product():
    assert np.allclose(kron(identity(2), identity(2)), identity(4))
    flipped = kron(SX, identity(2)) @ np.array([1, 0, 0, 0], dtype=complex)
    assert np.allclose(flipped, [0, 0, 1, 0])
    rng = make_rng(10)
    A, C = complex_gaussian((2, 2), rng), complex_gaussian((2, 2), rng)
    B, D = complex_gaussian((3, 3), rng), complex_gaussian((3, 3), rng)
    assert np.linalg.norm(kron(A, B) @ kron(C, D) - kron(A @ C, B @ D)) < 1e-12


def test_partial_trace_of_product_state():
    rng = make_rng(11)
    rho, sigma = random_density_matrix(2, rng), random_density_matrix(3, rng)
    sigma = 2.5 * sigma
    product = np.kron(rho, sigma)
    assert np.allclose(partial_trace(product, 2, 3, Subsystem.A), 2.5 * rho)
    assert np.allclose(partial_trace(product, 2, 3, "B"), sigma)


def test_partial_trace_of_maximally_entangled_projector():
    for dim in (2, 3, 4):
        psi = maximally_entangled_state(dim)
        projector = np.outer(psi, psi.conj())
        for keep in (Subsystem.A, Subsystem.B):
            assert np.allclose(partial_trace(projector, dim, dim, keep), identity(dim) / dim)


def test_partial_trace_matches_index_loops():
    rng = make_rng(12)
    M = complex_gaussian((6, 6), rng)
    keep_a = np.zeros((2, 2), dtype=complex)
    keep_b = np.zeros((3, 3), dtype=complex)
    for a in range(2):
        for a2 in range(2):
            for b in range(3):
                keep_a[a, a2] += M[a * 3 + b, a2 * 3 + b]
    for b in range(3):
        for b2 in range(3):
            for a in range(2):
                keep_b[b, b2] += M[a * 3 + b, a * 3 + b2]
    assert np.allclose(partial_trace(M, 2, 3, Subsystem.A), keep_a)
    assert np.allclose(partial_trace(M, 2, 3, Subsystem.B), keep_b)
    assert abs(np.trace(partial_trace(M, 2, 3, Subsystem.A)) - np.trace(M)) < 1e-12


def test_partial_trace_is_linear():
    rng = make_rng(13)
    M1, M2 = complex_gaussian((6, 6), rng), complex_gaussian((6, 6), rng)
    lhs = partial_trace(2.0 * M1 - 1j * M2, 3, 2, Subsystem.B)
    rhs = 2.0 * partial_trace(M1, 3, 2, Subsystem.B) - 1j * partial_trace(M2, 3, 2, Subsystem.B)
    assert np.allclose(lhs, rhs)


def test_partial_trace_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        partial_trace(identity(5), 2, 3, Subsystem.A)


def test_rng_streams_are_deterministic():
    first = complex_gaussian((3, 3), make_rng(42, 1))
    second = complex_gaussian((3, 3), make_rng(42, 1))
    other = complex_gaussian((3, 3), make_rng(42, 2))
    assert np.array_equal(first, second)
    assert not np.array_equal(first, other)
    assert perturb_seed(42, 0) == 42
    assert perturb_seed(42, 1) != 42


def test_random_operators_have_their_defining_properties():
    rng = make_rng(14)
    U = random_unitary(4, rng)
    assert np.linalg.norm(U.conj().T @ U - np.eye(4)) < 1e-12
    rho = random_density_matrix(3, rng)
    assert abs(np.trace(rho) - 1) < 1e-12
    assert eigh(rho).eigenvalues[0] >= -1e-12
