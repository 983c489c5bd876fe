"""
Coherence (Bloch) vector algebra for qubit states and rank-1 projective measurements.

A state is rho = (I + v . sigma) / 2 with sigma = (sigma_x, sigma_y, sigma_z).
Vectors stay 3-component float arrays; 2x2 matrices are only built on request.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from .errors import InvalidAxisError, InvalidDensityError, InvalidProbabilityError, InvalidStateError

Vector = npt.NDArray[np.float64]
Matrix = npt.NDArray[np.complex128]

STATE_TOLERANCE = 1e-12
AXIS_TOLERANCE = 1e-9

IDENTITY = np.eye(2, dtype=np.complex128)
PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=np.complex128)


class TransitionPoint(NamedTuple('BaseTransitionPoint', [('p11', float), ('p00', float)])):
    """
    Classical binary channel given by its correct-decision probabilities (p11, p00)
    """

    def swapped(self) -> TransitionPoint:
        return TransitionPoint(self.p00, self.p11)

    def complement(self) -> TransitionPoint:
        return TransitionPoint(1.0 - self.p11, 1.0 - self.p00)


class ProjectorPair(NamedTuple):
    axis: Vector
    pi0: Matrix
    pi1: Matrix


def as_vector(v, *, name: str = 'vector') -> Vector:
    vector = np.asarray(v, dtype=np.float64)
    if vector.shape != (3,):
        raise TypeError(f'{name} have to be a 3 component vector. got shape {vector.shape}')
    return vector


def check_state_vector(v, *, name: str = 'state', tol: float = STATE_TOLERANCE) -> Vector:
    vector = as_vector(v, name=name)
    norm = np.linalg.norm(vector)
    if norm > 1.0 + tol:
        raise InvalidStateError(f'{name} coherence vector lies outside the Bloch ball (norm {norm!r})')
    return vector


def check_axis(axis, *, tol: float = AXIS_TOLERANCE) -> Vector:
    vector = as_vector(axis, name='axis')
    norm = np.linalg.norm(vector)
    if abs(norm - 1.0) > tol:
        raise InvalidAxisError(f'measurement axis have to be a unit vector (norm {norm!r})')
    return vector


def check_probability(value, *, name: str = 'probability') -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise InvalidProbabilityError(f'{name} have to be in [0, 1]. got {value!r}')
    return value


def sigma_dot(v: Vector) -> Matrix:
    """ v . sigma """
    return np.tensordot(as_vector(v), PAULI, axes=1)


def coherence_to_state(v) -> Matrix:
    """
    Density matrix of the coherence vector v

    >> coherence_to_state([0, 0, 1])
    << array([[1, 0], [0, 0]])
    """
    vector = check_state_vector(v)
    return 0.5 * (IDENTITY + sigma_dot(vector))


def state_to_coherence(rho) -> Vector:
    """
    Coherence vector v_i = tr(rho sigma_i) of a density matrix
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (2, 2):
        raise InvalidDensityError(f'density matrix have to be 2x2. got shape {rho.shape}')
    if not np.allclose(rho, rho.conj().T, rtol=0.0, atol=STATE_TOLERANCE):
        raise InvalidDensityError('density matrix is not Hermitian')
    trace = np.trace(rho).real
    if abs(trace - 1.0) > STATE_TOLERANCE:
        raise InvalidDensityError(f'density matrix trace have to be 1. got {trace!r}')
    eigenvalues = np.linalg.eigvalsh(rho)
    if eigenvalues[0] < -STATE_TOLERANCE:
        raise InvalidDensityError(f'density matrix is not positive (eigenvalue {eigenvalues[0]!r})')
    return np.einsum('ij,kji->k', rho, PAULI).real


def measurement_pair_from_axis(axis) -> ProjectorPair:
    """
    Rank-1 projectors Pi1 = (I + axis . sigma) / 2 and Pi0 = I - Pi1
    """
    axis = check_axis(axis)
    pi1 = 0.5 * (IDENTITY + sigma_dot(axis))
    return ProjectorPair(axis=axis, pi0=IDENTITY - pi1, pi1=pi1)


def transition_probabilities(axis, w0, w1, *, tol: float = STATE_TOLERANCE) -> TransitionPoint:
    """
    Binary channel seen through the projectors of `axis` when x=0 and x=1 arrive as w0 and w1.

    tol is how far past the Bloch ball w0 and w1 may lie; probabilities are clipped to [0, 1].
    """
    axis = check_axis(axis)
    w0 = check_state_vector(w0, name='w0', tol=tol)
    w1 = check_state_vector(w1, name='w1', tol=tol)
    p11 = (1.0 + axis @ w1) / 2.0
    p00 = (1.0 - axis @ w0) / 2.0
    return TransitionPoint(_clip_probability(p11), _clip_probability(p00))


def _clip_probability(value: float) -> float:
    return float(min(1.0, max(0.0, value)))
