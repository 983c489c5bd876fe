"""
Orderings of classical binary channels: product ordering, stochastic degradedness and capability.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from .bloch import TransitionPoint, Vector, check_probability, coherence_to_state, state_to_coherence
from .capacity import mutual_information_curve
from .errors import InvalidProbabilityError

COLUMN_TOLERANCE = 1e-12
SINGULAR_TOLERANCE = 1e-12
DEFAULT_DEGRADED_TOLERANCE = 1e-9
DEFAULT_CAPABILITY_GRID = 1001
CAPABILITY_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """
    Column-stochastic matrix P(y | x), columns indexed by the input x and rows by the output y
    """
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        if matrix.shape != (2, 2):
            raise TypeError(f'transition matrix have to be 2x2. got shape {matrix.shape}')
        if np.any(matrix < -COLUMN_TOLERANCE) or np.any(matrix > 1.0 + COLUMN_TOLERANCE):
            raise InvalidProbabilityError(f'transition matrix entries have to be in [0, 1]. got {matrix.tolist()}')
        if not np.allclose(matrix.sum(axis=0), 1.0, rtol=0.0, atol=COLUMN_TOLERANCE):
            raise InvalidProbabilityError(f'transition matrix columns have to sum to 1. got {matrix.tolist()}')
        matrix = np.clip(matrix, 0.0, 1.0)
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    def __repr__(self):
        return f'{type(self).__name__}({self.matrix.tolist()})'

    @property
    def point(self) -> TransitionPoint:
        return TransitionPoint(float(self.matrix[1, 1]), float(self.matrix[0, 0]))

    @classmethod
    def identity(cls) -> TransitionMatrix:
        return cls(np.eye(2))

    @classmethod
    def from_point(cls, p) -> TransitionMatrix:
        p11 = check_probability(p[0], name='p11')
        p00 = check_probability(p[1], name='p00')
        return cls(np.array([[p00, 1.0 - p11], [1.0 - p00, p11]]))

    @classmethod
    def from_measurement(cls, outputs, effect0) -> TransitionMatrix:
        """
        Binary channel of the output states (w0, w1) read by the two-outcome POVM {E0, I - E0}
        """
        effect0 = _check_effect(effect0)
        p00, p10 = (float(np.trace(effect0 @ coherence_to_state(w)).real) for w in outputs)
        p00, p10 = np.clip([p00, p10], 0.0, 1.0)
        return cls.from_point((1.0 - p10, p00))


class DegradationResult(NamedTuple):
    degraded: bool
    witness: Optional[TransitionMatrix]


class ProjectiveRefinement(NamedTuple):
    axis: Vector
    projective: TransitionMatrix
    povm: TransitionMatrix
    witness: TransitionMatrix


ChannelLike = Union[TransitionMatrix, TransitionPoint, tuple]


def dominates(c, c_prime) -> bool:
    """ c_prime is below c in both correct-decision probabilities """
    return c_prime[1] <= c[1] and c_prime[0] <= c[0]


def stochastically_degraded(c_prime: ChannelLike, c: ChannelLike,
                            tol: float = DEFAULT_DEGRADED_TOLERANCE) -> DegradationResult:
    """
    Whether c_prime is c followed by some binary channel W, T' = W T; the witness is W
    """
    target = _as_matrix(c_prime).matrix
    source = _as_matrix(c).matrix
    determinant = float(np.linalg.det(source))
    if abs(determinant) > SINGULAR_TOLERANCE:
        witness = target @ np.linalg.inv(source)
        feasible = bool(np.all(witness >= -tol) and np.all(witness <= 1.0 + tol)
                        and np.allclose(witness.sum(axis=0), 1.0, rtol=0.0, atol=tol))
        if not feasible:
            return DegradationResult(degraded=False, witness=None)
        witness = np.clip(witness, 0.0, 1.0)
        return DegradationResult(degraded=True, witness=TransitionMatrix(witness / witness.sum(axis=0)))

    # T has two equal columns, so W T does too whatever W is
    if np.allclose(target[:, 0], target[:, 1], rtol=0.0, atol=tol):
        return DegradationResult(degraded=True, witness=TransitionMatrix(np.column_stack([target[:, 0]] * 2)))
    return DegradationResult(degraded=False, witness=None)


def less_capable(c_prime, c, grid_n: int = DEFAULT_CAPABILITY_GRID) -> bool:
    """ I(X; Y') <= I(X; Y) on a uniform grid of priors """
    if grid_n < 2:
        raise ValueError(f'grid_n have to be at least 2. got {grid_n}')
    priors = np.linspace(0.0, 1.0, grid_n)
    return bool(np.all(
        mutual_information_curve(_as_point(c_prime), priors)
        <= mutual_information_curve(_as_point(c), priors) + CAPABILITY_SLACK))


def projective_refinement(outputs, effect0) -> ProjectiveRefinement:
    """
    Projective measurement on the eigenbasis of E0 and the binary channel W with
    POVM channel = W . projective channel.

    E0 = q_a Pi0 + q_b Pi1 with q_a >= q_b, so W has columns (q_a, 1 - q_a) and (q_b, 1 - q_b).
    """
    effect0 = _check_effect(effect0)
    eigenvalues, eigenvectors = np.linalg.eigh(effect0)
    q_b, q_a = np.clip(eigenvalues, 0.0, 1.0)
    pi1 = np.outer(eigenvectors[:, 0], eigenvectors[:, 0].conj())
    axis = state_to_coherence(pi1)
    axis = axis / np.linalg.norm(axis)
    projective = TransitionMatrix.from_measurement(outputs, np.eye(2) - pi1)
    return ProjectiveRefinement(
        axis=axis,
        projective=projective,
        povm=TransitionMatrix.from_measurement(outputs, effect0),
        witness=TransitionMatrix(np.array([[q_a, q_b], [1.0 - q_a, 1.0 - q_b]])))


def _check_effect(effect0) -> np.ndarray:
    effect0 = np.asarray(effect0, dtype=np.complex128)
    if effect0.shape != (2, 2):
        raise TypeError(f'POVM effect have to be 2x2. got shape {effect0.shape}')
    if not np.allclose(effect0, effect0.conj().T, rtol=0.0, atol=1e-12):
        raise InvalidProbabilityError('POVM effect is not Hermitian')
    eigenvalues = np.linalg.eigvalsh(effect0)
    if eigenvalues[0] < -1e-12 or eigenvalues[-1] > 1.0 + 1e-12:
        raise InvalidProbabilityError(f'POVM effect eigenvalues have to be in [0, 1]. got {eigenvalues.tolist()}')
    return effect0


def _as_matrix(channel: ChannelLike) -> TransitionMatrix:
    if isinstance(channel, TransitionMatrix):
        return channel
    return TransitionMatrix.from_point(channel)


def _as_point(channel: ChannelLike) -> TransitionPoint:
    if isinstance(channel, TransitionMatrix):
        return channel.point
    return TransitionPoint(*channel)
