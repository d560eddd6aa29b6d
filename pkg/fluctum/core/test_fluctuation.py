"""
Tests for TPM statistics and the fluctuation identities.

The exact identities are checked on seeded random channels and
Hamiltonians; the slow marker covers the full-size sweeps.
"""

import math

import numpy as np
import pytest

from fluctum.core.channel import identity_channel, random_channel, unitary_channel
from fluctum.core.fluctuation import (
    NONPOSITIVE_CORRECTION,
    Partition,
    correction_term,
    double_bracket,
    generalized_jarzynski,
    heat_transfer_check,
    high_temperature_correction,
    low_temperature_correction,
    proposition1_check,
    tpm_distribution,
    tpm_from_bases,
)
from fluctum.core.linalg import EigenSystem, eigh
from fluctum.core.sampling import make_rng, random_hermitian, random_probability_vector, random_unitary
from fluctum.core.thermal import boltzmann_weights, gibbs
from fluctum.core.zoo import (
    amplitude_damping_2,
    basis_state,
    complete_contraction,
    completely_depolarizing,
    gad_3,
    qubit_hamiltonian,
    random_unitary_mixture,
    spin1_hamiltonian,
    spin1_hamiltonian_at_angle,
    swap_channel,
)
from fluctum.utils.error_handling import DegenerateSpectrumError, DimensionMismatchError, InvalidInputError


def _random_case(dim, seed):
    rng = make_rng(seed, dim)
    phi = random_channel(dim, 1 + seed % 3, seed=seed)
    H0, H1 = random_hermitian(dim, rng), random_hermitian(dim, rng)
    beta0, beta1 = rng.uniform(0, 3, size=2)
    return phi, H0, H1, float(beta0), float(beta1)


def test_identity_channel_transitions_are_diagonal():
    H = np.diag([0.0, 1.0, 2.5]).astype(complex)
    dist = tpm_distribution(identity_channel(3), H, [0.2, 0.3, 0.5], H)
    assert np.allclose(dist.cond, np.eye(3))
    assert double_bracket(dist, lambda a, b: b - a) == pytest.approx(0.0, abs=1e-15)


def test_depolarizing_transitions_are_uniform():
    rng = make_rng(60)
    A, B = random_hermitian(3, rng), random_hermitian(3, rng)
    dist = tpm_distribution(completely_depolarizing(3), A, random_probability_vector(3, rng), B)
    assert np.allclose(dist.cond, 1 / 3)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_tpm_distribution_invariants(dim):
    rng = make_rng(61, dim)
    phi = random_channel(dim, 3, seed=dim)
    dist = tpm_distribution(phi, random_hermitian(dim, rng), random_probability_vector(dim, rng), random_hermitian(dim, rng))
    assert np.allclose(dist.row_sums(), 1.0, atol=1e-11)
    assert dist.cond.min() >= -1e-12
    assert np.array_equal(dist.joint, dist.p_a[:, None] * dist.cond)
    assert abs(dist.joint.sum() - 1) < 1e-11
    assert double_bracket(dist, lambda a, b: 1.0) == pytest.approx(1.0, abs=1e-12)


def test_tpm_distribution_rejects_invalid_probabilities():
    with pytest.raises(InvalidInputError):
        tpm_distribution(identity_channel(2), np.eye(2), [0.7, 0.7], np.eye(2))


def test_double_bracket_accepts_scalar_functions():
    H = np.diag([0.0, 1.0]).astype(complex)
    dist = tpm_distribution(amplitude_damping_2(0.5), H, [0.5, 0.5], H)
    vectorized = double_bracket(dist, lambda a, b: math.exp(a - b) if a > b else 0.0)
    assert vectorized == pytest.approx(0.0, abs=1e-15)


def test_proposition1_unital_reduction():
    rng = make_rng(62)
    phi = random_unitary_mixture(3, 3, seed=4)
    A, B = random_hermitian(3, rng), random_hermitian(3, rng)
    check = proposition1_check(phi, A, 0.7, B, 1.3)
    expected = np.exp(-1.3 * eigh(B).eigenvalues).sum() / np.exp(-0.7 * eigh(A).eigenvalues).sum()
    assert check.rhs == pytest.approx(expected, rel=1e-12)
    assert check.residual < 1e-10


def test_proposition1_at_zero_parameters_is_one():
    phi = random_channel(3, 2, seed=9)
    rng = make_rng(63)
    check = proposition1_check(phi, random_hermitian(3, rng), 0.0, random_hermitian(3, rng), 0.0)
    assert check.lhs == pytest.approx(1.0, abs=1e-12)
    assert check.rhs == pytest.approx(1.0, abs=1e-12)


def test_proposition1_random_tuples():
    rng = make_rng(64)
    for seed in range(200):
        phi = random_channel(3, 1 + seed % 4, seed=seed)
        A, B = random_hermitian(3, rng), random_hermitian(3, rng)
        alpha, beta = rng.uniform(0, 2, size=2)
        assert proposition1_check(phi, A, alpha, B, beta).residual < 1e-10


def test_proposition1_with_negative_parameters():
    rng = make_rng(65)
    phi = random_channel(2, 2, seed=1)
    check = proposition1_check(phi, random_hermitian(2, rng), -1.5, random_hermitian(2, rng), -0.5)
    assert check.residual < 1e-10


def test_jarzynski_unital_channel():
    rng = make_rng(66)
    phi = random_unitary_mixture(3, 2, seed=8)
    H0, H1 = random_hermitian(3, rng), random_hermitian(3, rng)
    report = generalized_jarzynski(phi, H0, H1, 1.2, 1.2)
    assert abs(report.correction) < 1e-12
    assert report.lhs == pytest.approx(math.exp(-1.2 * report.delta_F), rel=1e-10)
    assert report.residual < 1e-10
    assert report.jensen_holds()


def test_jarzynski_amplitude_damping_value():
    report = generalized_jarzynski(amplitude_damping_2(0.5), qubit_hamiltonian([0, 0, -1]), qubit_hamiltonian([0, 0, -1]), 1.0, 1.0)
    assert report.correction == pytest.approx(0.5 * math.tanh(1.0), abs=1e-12)
    assert report.correction == pytest.approx(0.380797, abs=1e-6)
    assert report.residual < 1e-10


@pytest.mark.parametrize("dim", [2, 3, 4, 5])
def test_jarzynski_identity_on_random_channels(dim):
    for seed in range(50):
        phi, H0, H1, beta0, beta1 = _random_case(dim, seed)
        report = generalized_jarzynski(phi, H0, H1, beta0, beta1)
        assert report.residual <= 1e-10, (dim, seed)


@pytest.mark.slow
@pytest.mark.parametrize("dim", [2, 3, 4, 5])
def test_jarzynski_identity_full_sweep(dim):
    for seed in range(500):
        phi, H0, H1, beta0, beta1 = _random_case(dim, 5000 + seed)
        report = generalized_jarzynski(phi, H0, H1, beta0, beta1)
        assert report.residual <= 1e-10
        equal = generalized_jarzynski(phi, H0, H1, beta0, beta0)
        assert equal.jensen_holds()


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_jensen_bound_at_equal_temperature(dim):
    for seed in range(30):
        phi, H0, H1, beta, _ = _random_case(dim, 300 + seed)
        report = generalized_jarzynski(phi, H0, H1, beta, beta)
        if beta > 0:
            assert report.delta_F is not None
            assert report.jensen_rhs is not None
            assert report.mean_work >= report.jensen_rhs - 1e-10


def test_unequal_temperatures_omit_free_energy():
    phi, H0, H1, _, _ = _random_case(3, 1)
    report = generalized_jarzynski(phi, H0, H1, 0.5, 1.5)
    assert report.delta_F is None and report.jensen_rhs is None
    assert report.residual < 1e-10


def test_nonpositive_correction_factor_is_flagged():
    # contraction onto the excited level; the ground population of omega1 is exactly 1
    H = np.diag([0.0, 40.0]).astype(complex)
    report = generalized_jarzynski(complete_contraction(basis_state(2, 2)), H, H, 1000.0, 1000.0)
    assert report.correction == -1.0
    assert report.flags == (NONPOSITIVE_CORRECTION,)
    assert report.jensen_rhs is None
    assert report.delta_F == pytest.approx(0.0, abs=1e-15)
    assert report.rhs == 0.0 and report.log_rhs is None
    assert report.residual < 1e-12
    assert report.jensen_holds()
    assert report.to_row("x")["flags"] == NONPOSITIVE_CORRECTION


def test_jarzynski_with_large_energy_shift():
    H0 = np.diag([0.0, 1.0]).astype(complex)
    H1 = H0 - 20.0 * np.eye(2)
    report = generalized_jarzynski(amplitude_damping_2(0.5), H0, H1, 40.0, 40.0)
    assert report.delta_F == pytest.approx(-20.0, abs=1e-12)
    assert math.isinf(report.lhs) and math.isinf(report.z_ratio) and math.isinf(report.rhs)
    assert report.log_lhs == pytest.approx(report.log_rhs, abs=1e-10)
    assert report.residual < 1e-10
    assert report.jensen_rhs is not None and math.isfinite(report.jensen_rhs)
    assert report.jensen_holds()

    check = proposition1_check(amplitude_damping_2(0.5), H0, 40.0, H1, 40.0)
    assert math.isinf(check.lhs)
    assert check.residual < 1e-10
    assert gibbs(H1, 40.0).Z == math.inf


def test_high_temperature_correction_stays_finite_when_cold():
    H = np.diag([5.0, 6.0]).astype(complex)
    value = high_temperature_correction(amplitude_damping_2(0.5), H, 1000.0)
    assert value == -math.inf
    assert high_temperature_correction(amplitude_damping_2(0.5), H, 0.0) == 0.0


def test_jarzynski_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        generalized_jarzynski(identity_channel(2), np.eye(3), np.eye(2), 1.0, 1.0)


def test_exponential_average_is_basis_independent_under_degeneracy():
    rng = make_rng(67)
    phi = random_channel(4, 2, seed=21)
    H0 = np.diag([0.0, 0.0, 1.0, 2.0]).astype(complex)
    H1 = np.diag([-1.0, 0.5, 0.5, 0.5]).astype(complex)
    beta = 0.9
    reference = generalized_jarzynski(phi, H0, H1, beta, beta).lhs

    mix0 = np.eye(4, dtype=complex)
    mix0[:2, :2] = random_unitary(2, rng)
    mix1 = np.eye(4, dtype=complex)
    mix1[1:, 1:] = random_unitary(3, rng)
    initial = EigenSystem(np.array([0.0, 0.0, 1.0, 2.0]), mix0)
    final = EigenSystem(np.array([-1.0, 0.5, 0.5, 0.5]), mix1)
    dist = tpm_from_bases(phi, initial, boltzmann_weights(initial.eigenvalues, beta), final)
    lhs = double_bracket(dist, lambda a, b: np.exp(beta * a - beta * b))
    assert lhs == pytest.approx(reference, rel=1e-10)


def test_correction_sign_coverage():
    H = qubit_hamiltonian([0, 0, -1])
    assert correction_term(amplitude_damping_2(0.8), H, 1.0) > 1e-3
    assert correction_term(amplitude_damping_2(0.8), -H, 1.0) < -1e-3
    assert abs(correction_term(amplitude_damping_2(0.8), qubit_hamiltonian([1, 0, 0]), 1.0)) < 1e-12


def test_high_temperature_correction_vanishes_for_perpendicular_field():
    assert abs(high_temperature_correction(amplitude_damping_2(0.7), qubit_hamiltonian([1, 0, 0]), 0.05)) < 1e-15


def test_high_temperature_correction_matches_spin1_closed_form():
    p, q, B, beta = 0.6, 0.3, 1.0, 0.01
    value = high_temperature_correction(gad_3(p, q), spin1_hamiltonian([0, 0, B]), beta, Partition.INFINITE_TEMPERATURE)
    assert value == pytest.approx((2 * p + q) * beta * B / 3, abs=1e-10)


def test_high_temperature_residual_scales_quadratically():
    phi, H = gad_3(0.6, 0.3), spin1_hamiltonian([0, 0, 1.0])
    residuals = [
        abs(correction_term(phi, H, beta) - high_temperature_correction(phi, H, beta))
        for beta in (0.02, 0.01)
    ]
    assert residuals[0] / residuals[1] == pytest.approx(4.0, rel=0.3)


def test_low_temperature_correction():
    assert abs(low_temperature_correction(random_unitary_mixture(3, 2, seed=3), spin1_hamiltonian([0, 0, 1]))) < 1e-12
    p, q = 0.5, 0.25
    assert low_temperature_correction(gad_3(p, q), spin1_hamiltonian([0, 0, 1])) == pytest.approx(p + q, abs=1e-12)
    phi, H = gad_3(p, q), spin1_hamiltonian_at_angle(1.0, 0.7)
    assert abs(correction_term(phi, H, 50.0) - low_temperature_correction(phi, H)) < 1e-10


def test_low_temperature_correction_needs_gapped_ground_state():
    with pytest.raises(DegenerateSpectrumError):
        low_temperature_correction(gad_3(0.5, 0.5), np.diag([0.0, 0.0, 1.0]))


def test_heat_transfer_unital_channel():
    rng = make_rng(68)
    A, B = random_hermitian(2, rng), random_hermitian(2, rng)
    check = heat_transfer_check(unitary_channel(random_unitary(4, rng)), A, 0.8, B, 1.4)
    assert check.rhs == pytest.approx(1.0, abs=1e-11)
    assert check.residual < 1e-10


def test_heat_transfer_swap_has_no_entropy_production():
    rng = make_rng(69)
    A = random_hermitian(2, rng)
    check = heat_transfer_check(swap_channel(2), A, 1.1, A, 1.1)
    assert abs(check.delta_S) < 1e-12
    assert check.residual < 1e-10


def test_heat_transfer_random_bipartite_channels():
    rng = make_rng(70)
    for seed in range(100):
        psi = random_channel(4, 1 + seed % 4, seed=seed)
        A, B = random_hermitian(2, rng), random_hermitian(2, rng)
        alpha, beta = rng.uniform(0, 2, size=2)
        check = heat_transfer_check(psi, A, alpha, B, beta)
        assert check.residual <= 1e-10
        assert check.entropy_bound is not None
        assert check.delta_S >= check.entropy_bound - 1e-10


def test_heat_transfer_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        heat_transfer_check(identity_channel(3), np.eye(2), 1.0, np.eye(2), 1.0)
