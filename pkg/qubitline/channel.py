"""
Affine qubit channels v -> T v + b, their Choi-matrix CP test, the diagonal (SVD) frame
and the two pieces of ellipsoid geometry the optimizers need.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .bloch import IDENTITY, PAULI, STATE_TOLERANCE, Vector, as_vector, check_axis, check_state_vector
from .errors import NotCPTPError

logger = logging.getLogger(__name__)

RADIUS_TOLERANCE = 1e-12
SINGULAR_VALUE_TIE = 1e-12
DEFAULT_CP_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class AffineChannel:
    """
    Qubit channel in coherence-vector form, the image of v is T v + b
    """
    T: np.ndarray
    b: np.ndarray
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        transform = np.array(self.T, dtype=np.float64)
        shift = np.array(self.b, dtype=np.float64)
        if transform.shape != (3, 3):
            raise TypeError(f'T have to be a 3x3 matrix. got shape {transform.shape}')
        if shift.shape != (3,):
            raise TypeError(f'b have to be a 3 component vector. got shape {shift.shape}')
        if not (np.all(np.isfinite(transform)) and np.all(np.isfinite(shift))):
            raise ValueError('channel parameters have to be finite')
        transform.setflags(write=False)
        shift.setflags(write=False)
        object.__setattr__(self, 'T', transform)
        object.__setattr__(self, 'b', shift)

    def __repr__(self):
        label = f', name={self.name!r}' if self.name else ''
        return f'{type(self).__name__}(T={self.T.tolist()}, b={self.b.tolist()}{label})'

    @classmethod
    def diagonal(cls, diag, b=(0.0, 0.0, 0.0), *, name=None) -> AffineChannel:
        return cls(np.diag(as_vector(diag, name='diag')), b, name=name)

    @classmethod
    def identity(cls) -> AffineChannel:
        return cls(np.eye(3), np.zeros(3), name='identity')


@dataclass(frozen=True, eq=False)
class DiagonalFrame:
    """
    T = U diag(s) V^T with s sorted descending, xi = U^T b.

    In the frame the image of the Bloch ball is the axis-aligned ellipsoid of radii s centered at xi.
    """
    U: np.ndarray
    V: np.ndarray
    s: np.ndarray
    xi: np.ndarray

    @property
    def shift(self) -> Vector:
        return self.U @ self.xi

    @property
    def transform(self) -> np.ndarray:
        return self.U @ np.diag(self.s) @ self.V.T


class CPReport(NamedTuple):
    is_cp: bool
    min_eigenvalue: float


class SupportPoint(NamedTuple):
    w: Vector
    value: float
    v_in: Optional[Vector]
    degenerate: bool = False


class FarthestPoint(NamedTuple):
    w: Vector
    distance: float
    v_in: Vector
    hard_case: bool = False


def apply(channel: AffineChannel, v) -> Vector:
    return channel.T @ check_state_vector(v) + channel.b


def choi_matrix(channel: AffineChannel) -> np.ndarray:
    """
    Unnormalized Choi matrix sum_kl |k><l| (x) Phi(|k><l|); the identity channel gives 2|Phi+><Phi+|
    """
    choi = np.zeros((4, 4), dtype=np.complex128)
    for k in range(2):
        for l in range(2):
            unit = np.zeros((2, 2), dtype=np.complex128)
            unit[k, l] = 1.0
            choi += np.kron(unit, _apply_to_operator(channel, unit))
    return choi


def choi_cptp_check(channel: AffineChannel, tol: float = DEFAULT_CP_TOLERANCE) -> CPReport:
    eigenvalues = np.linalg.eigvalsh(choi_matrix(channel))
    min_eigenvalue = float(eigenvalues[0])
    return CPReport(is_cp=min_eigenvalue >= -tol, min_eigenvalue=min_eigenvalue)


def is_cptp(channel: AffineChannel, tol: float = DEFAULT_CP_TOLERANCE) -> bool:
    return choi_cptp_check(channel, tol).is_cp


def require_cptp(channel: AffineChannel, tol: float = DEFAULT_CP_TOLERANCE) -> CPReport:
    report = choi_cptp_check(channel, tol)
    if not report.is_cp:
        raise NotCPTPError(report)
    return report


def image_tolerance(cp_tol: float = DEFAULT_CP_TOLERANCE) -> float:
    """
    How far past the Bloch ball a pure-input image can lie for a channel accepted at cp_tol.

    Every output eigenvalue (1 - |w|) / 2 is bounded below by the smallest Choi eigenvalue.
    """
    return STATE_TOLERANCE + 2.0 * cp_tol


def diagonalize(channel: AffineChannel) -> DiagonalFrame:
    U, s, Vt = np.linalg.svd(channel.T)
    V = Vt.T.copy()
    U = U.copy()
    for column in range(3):
        pivot = np.argmax(np.abs(U[:, column]))
        if U[pivot, column] < 0:
            U[:, column] *= -1
            V[:, column] *= -1
    order = _tie_broken_order(U, s)
    U, V, s = U[:, order], V[:, order], s[order]
    return DiagonalFrame(U=U, V=V, s=s, xi=U.T @ channel.b)


def _tie_broken_order(U: np.ndarray, s: np.ndarray) -> list:
    """
    Column order with s descending, equal singular values ordered by their left vectors,
    lexicographically largest first
    """
    order = []
    start = 0
    while start < 3:
        stop = start + 1
        while stop < 3 and s[start] - s[stop] <= SINGULAR_VALUE_TIE:
            stop += 1
        group = range(start, stop)
        order.extend(sorted(group, key=lambda column: tuple(np.round(U[:, column], 12)), reverse=True))
        start = stop
    return order


def support_point(frame: DiagonalFrame, axis) -> SupportPoint:
    """
    Point of the image ellipsoid maximizing axis . w, value = |T^T axis| + axis . b.

    When T^T axis vanishes every point of the ellipsoid ties; w = b is returned with v_in undefined.
    """
    axis = check_axis(axis)
    shift = frame.shift
    gradient = frame.s * (frame.U.T @ axis)
    norm = float(np.linalg.norm(gradient))
    if norm <= RADIUS_TOLERANCE:
        return SupportPoint(w=shift, value=float(axis @ shift), v_in=None, degenerate=True)
    psi = gradient / norm
    w = frame.U @ (frame.s * psi) + shift
    return SupportPoint(w=w, value=norm + float(axis @ shift), v_in=frame.V @ psi)


def antipodal_inputs(frame: DiagonalFrame, axis):
    """
    Orthogonal pure inputs (v0, v1) = (-v, v) with v = T^T axis / |T^T axis|, so that T v1 + b is the
    support point of axis. Any pair is optimal when T^T axis vanishes; axis itself is used then.
    """
    v_in = support_point(frame, axis).v_in
    if v_in is None:
        v_in = check_axis(axis)
    return -v_in, v_in


def farthest_point(frame: DiagonalFrame, q) -> FarthestPoint:
    """
    Point of the image ellipsoid farthest from q
    """
    q = as_vector(q, name='q')
    offset = frame.U.T @ q - frame.xi
    psi, hard_case = farthest_offset(frame.s, offset)
    y = frame.s * psi
    return FarthestPoint(
        w=frame.U @ (frame.xi + y),
        distance=float(np.linalg.norm(y - offset)),
        v_in=frame.V @ psi,
        hard_case=hard_case)


def farthest_offset(radii, c, *, max_iter: int = 200):
    """
    Maximize |diag(radii) psi - c| over the unit sphere |psi| = 1.

    Stationary points satisfy psi_i = r_i c_i / (r_i^2 - mu) with mu >= max(r)^2; the multiplier
    is found by safeguarded Newton on 1/|psi(mu)| - 1. When c has no component along the largest
    radii the multiplier may sit on the boundary (hard case); the free component then goes to the
    first largest axis with a positive sign.

    Returns (psi, hard_case).
    """
    radii = np.where(np.asarray(radii, dtype=np.float64) < RADIUS_TOLERANCE, 0.0, radii)
    c = np.asarray(c, dtype=np.float64)
    psi = np.zeros_like(radii)
    top = radii.max()
    if top == 0.0:
        psi[0] = 1.0
        return psi, True

    top_mask = radii >= top - RADIUS_TOLERANCE
    numerators = radii * c
    gaps = np.where(top_mask, 0.0, radii ** 2 - top ** 2)
    scale = max(1.0, top * float(np.linalg.norm(c)))
    if np.all(np.abs(numerators[top_mask]) <= 1e-13 * scale):
        rest = np.where(top_mask, 0.0, numerators / np.where(top_mask, -1.0, gaps))
        rest_norm_squared = float(rest @ rest)
        if rest_norm_squared <= 1.0:
            psi = rest
            psi[np.flatnonzero(top_mask)[0]] = np.sqrt(1.0 - rest_norm_squared)
            return psi, True

    low, high = 0.0, top * float(np.linalg.norm(c))
    delta = high
    for iteration in range(max_iter):
        denominators = gaps - delta
        psi = numerators / denominators
        norm = float(np.linalg.norm(psi))
        secular = 1.0 / norm - 1.0
        if abs(secular) <= 1e-15:
            break
        if secular < 0.0:
            low = delta
        else:
            high = delta
        if high - low <= 1e-16 * max(1.0, high):
            break
        slope = -float(psi @ (psi / denominators)) / norm ** 3
        candidate = delta - secular / slope if slope > 0.0 else low - 1.0
        if not low < candidate < high:
            candidate = 0.5 * (low + high)
        delta = candidate
    logger.debug('secular equation solved in %d iterations, multiplier offset %r', iteration + 1, delta)
    return psi / np.linalg.norm(psi), False


def sample_cptp_channel(rng: np.random.Generator, *, tol: float = DEFAULT_CP_TOLERANCE,
                        max_attempts: int = 10_000, name: Optional[str] = None) -> AffineChannel:
    """
    Uniform-contraction sampler: T entries uniform in [-1, 1] rescaled to a uniformly drawn
    operator norm, b uniform in the unit ball, rejected until the Choi matrix is positive.
    """
    for attempt in range(1, max_attempts + 1):
        raw = rng.uniform(-1.0, 1.0, size=(3, 3))
        norm = np.linalg.norm(raw, ord=2)
        transform = raw / norm * rng.uniform(0.0, 1.0) if norm > 0 else raw
        direction = rng.normal(size=3)
        shift = direction / np.linalg.norm(direction) * rng.uniform(0.0, 1.0) ** (1.0 / 3.0)
        channel = AffineChannel(transform, shift, name=name)
        if is_cptp(channel, tol):
            if attempt > 100:
                logger.warning('sampler needed %d draws for one CP channel', attempt)
            return channel
    raise RuntimeError(f'no completely positive channel found in {max_attempts} draws')


def _apply_to_operator(channel: AffineChannel, operator: np.ndarray) -> np.ndarray:
    """ Linear extension of the affine map to any 2x2 operator """
    trace = np.trace(operator)
    components = np.einsum('ij,kji->k', operator, PAULI)
    image = channel.T @ components
    return 0.5 * (trace * (IDENTITY + np.tensordot(channel.b, PAULI, axes=1))
                  + np.tensordot(image, PAULI, axes=1))


EXAMPLE_CHANNELS = {
    'identity': AffineChannel.identity(),
    'depolarized': AffineChannel.diagonal([0.0, 0.0, 0.0], name='depolarized'),
    'region': AffineChannel.diagonal([0.1, 0.4, 0.1], [0.23, 0.32, 0.05], name='region'),
    'separation-1': AffineChannel.diagonal([0.14, 0.07, 0.19], [0.46, 0.74, 0.03], name='separation-1'),
    'separation-2': AffineChannel.diagonal([0.34, 0.24, 0.45], [-0.42, -0.27, -0.26], name='separation-2'),
    'separation-3': AffineChannel.diagonal([0.11, 0.64, 0.07], [-0.24, -0.15, 0.45], name='separation-3'),
    'shape-1': AffineChannel.diagonal([0.3, 0.3, 0.9], [0.3, 0.0, 0.0], name='shape-1'),
    'shape-2': AffineChannel.diagonal([0.2, 0.1, 0.62], [0.3, 0.0, 0.15], name='shape-2'),
    'shape-3': AffineChannel.diagonal([0.55, 0.3, 0.3], [0.2, 0.0, 0.0], name='shape-3'),
    'shape-4': AffineChannel.diagonal([0.25, 0.25, 0.2], [0.5, 0.0, 0.0], name='shape-4'),
    'shape-5': AffineChannel.diagonal([0.1, 0.1, 0.1], [0.3, 0.0, 0.0], name='shape-5'),
}
