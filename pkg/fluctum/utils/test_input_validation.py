import numpy as np
import pytest

from fluctum.utils.error_handling import DimensionMismatchError, InvalidInputError, InvalidParameterError
from fluctum.utils.input_validation import InputValidator


def test_matrix_shapes():
    assert InputValidator.matrix([[1, 2]]).dtype == np.complex128
    with pytest.raises(DimensionMismatchError):
        InputValidator.matrix([1, 2])
    with pytest.raises(DimensionMismatchError):
        InputValidator.square(np.zeros((2, 3)))
    with pytest.raises(DimensionMismatchError):
        InputValidator.dimension(np.eye(2), 3)
    with pytest.raises(DimensionMismatchError):
        InputValidator.same_shape(np.eye(2), np.eye(3))


def test_hermitian_tolerance_scales_with_norm():
    H = 1e6 * np.array([[1, 1e-12], [0, 1]])
    InputValidator.hermitian(H)
    with pytest.raises(InvalidInputError):
        InputValidator.hermitian([[0, 1], [0, 0]])


def test_unitary_and_unit_vector():
    InputValidator.unitary(np.array([[0, 1j], [1j, 0]]))
    with pytest.raises(InvalidInputError):
        InputValidator.unitary(np.diag([1.0, 2.0]))
    assert InputValidator.unit_vector([0, 1]).shape == (2,)
    with pytest.raises(InvalidInputError):
        InputValidator.unit_vector([1, 1])
    with pytest.raises(DimensionMismatchError):
        InputValidator.unit_vector([])


def test_probability_vector():
    InputValidator.probability_vector([0.25, 0.75], 2)
    with pytest.raises(DimensionMismatchError):
        InputValidator.probability_vector([1.0], 2)
    with pytest.raises(InvalidInputError):
        InputValidator.probability_vector([1.5, -0.5], 2)
    with pytest.raises(InvalidInputError):
        InputValidator.probability_vector([0.5, 0.4], 2)


def test_parameter_ranges():
    assert InputValidator.in_range(0.5, 0, 1, "p") == 0.5
    with pytest.raises(InvalidParameterError):
        InputValidator.in_range(float("nan"), 0, 1, "p")
    assert InputValidator.beta(0.0) == 0.0
    with pytest.raises(InvalidParameterError):
        InputValidator.beta(-1e-3)
