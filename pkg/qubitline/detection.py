"""
Probability of correct decision for a binary prior, optimized over antipodal input pairs and
projective measurements, with the two trivial (measurement-free) decisions as competitors.
"""
from __future__ import annotations

import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .bloch import TransitionPoint, Vector, check_probability, transition_probabilities
from .channel import AffineChannel, antipodal_inputs, diagonalize, farthest_point, image_tolerance, require_cptp
from .configuration import configuration_map
from .errors import InvalidDensityError

logger = logging.getLogger(__name__)

PROJECTIVE = 'projective'
TRIVIAL_IDENTITY = 'trivial-identity'
TRIVIAL_NULL = 'trivial-null'

# {Pi0, Pi1} = {I, 0} always answers 0, {0, I} always answers 1
TRIVIAL_POINTS = {
    TRIVIAL_IDENTITY: TransitionPoint(0.0, 1.0),
    TRIVIAL_NULL: TransitionPoint(1.0, 0.0),
}

DEGENERACY_DIRECTIONS = 4096
DEGENERACY_TOLERANCE = 1e-9
DEGENERACY_MIN_ANGLE = 1e-3


class DetectionReport(NamedTuple):
    pc: float
    mode: str
    axis: Optional[Vector]
    d: Vector
    inputs: Tuple[Vector, Vector]
    point: TransitionPoint
    p0: float
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {
            'pc': self.pc,
            'mode': self.mode,
            'p0': self.p0,
            'axis': None if self.axis is None else self.axis.tolist(),
            'd': self.d.tolist(),
            'inputs': [vector.tolist() for vector in self.inputs],
            'point': {'p11': self.point.p11, 'p00': self.point.p00},
            'degenerate': self.degenerate,
        }


def pc_of_point(p, p0: float) -> float:
    """
    Correct-decision probability p00 p0 + p11 (1 - p0) of a binary channel under prior p0
    """
    p11 = check_probability(p[0], name='p11')
    p00 = check_probability(p[1], name='p00')
    p0 = check_probability(p0, name='p0')
    return p00 * p0 + p11 * (1.0 - p0)


def optimize_pc(channel: AffineChannel, p0: float, *, cp_tol: Optional[float] = None) -> DetectionReport:
    p0 = check_probability(p0, name='p0')
    cp_tol = configuration_map.get_configuration().cp_tol if cp_tol is None else cp_tol
    require_cptp(channel, cp_tol)
    p1 = 1.0 - p0
    frame = diagonalize(channel)
    q = 2.0 * p0 * channel.b
    farthest = farthest_point(frame, q)
    d = farthest.w - q
    distance = float(np.linalg.norm(d))

    if distance > 1e-15 and abs(p1 - p0) <= distance:
        axis = d / distance
        inputs = antipodal_inputs(frame, axis)
        w1 = farthest.w
        return DetectionReport(
            pc=(1.0 + distance) / 2.0,
            mode=PROJECTIVE,
            axis=axis,
            d=d,
            inputs=inputs,
            point=transition_probabilities(axis, 2.0 * channel.b - w1, w1, tol=image_tolerance(cp_tol)),
            p0=p0,
            degenerate=_has_other_optimum(frame, channel.b - q, axis, distance))

    mode = TRIVIAL_IDENTITY if p0 >= p1 else TRIVIAL_NULL
    logger.debug('p0=%r: measuring does not help (|d|=%r), %s decision', p0, distance, mode)
    return DetectionReport(
        pc=max(p0, p1),
        mode=mode,
        axis=None,
        d=d,
        inputs=(-farthest.v_in, farthest.v_in),
        point=TRIVIAL_POINTS[mode],
        p0=p0)


def helstrom_pc(rho0, rho1, p0: float) -> float:
    """
    (1 + || p1 rho1 - p0 rho0 ||_1) / 2 from density matrices
    """
    p0 = check_probability(p0, name='p0')
    rho0 = np.asarray(rho0, dtype=np.complex128)
    rho1 = np.asarray(rho1, dtype=np.complex128)
    if rho0.shape != (2, 2) or rho1.shape != (2, 2):
        raise InvalidDensityError('density matrices have to be 2x2')
    difference = (1.0 - p0) * rho1 - p0 * rho0
    trace_norm = float(np.abs(np.linalg.eigvalsh(difference)).sum())
    return (1.0 + trace_norm) / 2.0


def fibonacci_directions(count: int) -> np.ndarray:
    """ Nearly uniform unit vectors on the sphere """
    index = np.arange(count) + 0.5
    z = 1.0 - 2.0 * index / count
    radius = np.sqrt(1.0 - z * z)
    angle = np.pi * (1.0 + np.sqrt(5.0)) * index
    return np.column_stack([radius * np.cos(angle), radius * np.sin(angle), z])


def _has_other_optimum(frame, offset: Vector, axis: Vector, distance: float) -> bool:
    """
    A direction away from the line of axis whose support value |T^T u| + u . (b - q) reaches the optimum.
    -axis is skipped, it is the same decision with the labels swapped.
    """
    directions = fibonacci_directions(DEGENERACY_DIRECTIONS)
    angles = np.arccos(np.clip(np.abs(directions @ axis), 0.0, 1.0))
    directions = directions[angles > DEGENERACY_MIN_ANGLE]
    transform = frame.transform
    values = np.linalg.norm(directions @ transform, axis=1) + directions @ offset
    return bool(np.any(values >= distance - DEGENERACY_TOLERANCE))
