"""
Region of achievable binary transition probabilities of a qubit channel.

For every k = axis . xi the edge problem picks the measurement axis maximizing |S^T axis|; the
resulting transition points (and their mirror images) generate the region as a union of
parallelograms spanned with the trivial channels (0, 1) and (1, 0).
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .bloch import TransitionPoint, Vector, transition_probabilities
from .channel import (
    DEFAULT_CP_TOLERANCE,
    AffineChannel,
    DiagonalFrame,
    diagonalize,
    farthest_offset,
    image_tolerance,
    require_cptp,
    support_point,
)
from .configuration import configuration_map, ordered_map
from .errors import DegenerateConicError, DegenerateReductionError, InfeasibleConstraintError

logger = logging.getLogger(__name__)

REDUCTION_TOLERANCE = 1e-9
BOUNDARY_TOLERANCE = 1e-9
DIRECT_RESTARTS = 16
REGION_CSV_HEADER = ('k', 'axis_x', 'axis_y', 'axis_z', 'p11', 'p00', 'objective')
BORDER_CSV_HEADER = ('p11', 'p00')


class RegionSample(NamedTuple):
    k: float
    axis: Vector
    point: TransitionPoint
    objective: float

    def mirrored(self) -> RegionSample:
        """ Same sample seen with the projectors (and input states) swapped """
        return RegionSample(k=-self.k, axis=-self.axis, point=self.point.swapped(), objective=self.objective)


@dataclass(frozen=True, eq=False)
class EllipseProblem:
    """
    Edge problem at fixed k rewritten as the farthest point of a conic from the origin.

    The plane-sphere circle {|p| = 1, p . xi = k} of the diagonal frame is carried by
    p = H1 (H2 x2 + t2), x2 = H3 x3, x3 = H4 x4 + t4, x4 = H5 x5 onto the conic
    A x5^2 + B x5 y5 + C y5^2 + D x5 + E y5 + F = 0 while |S p|^2 becomes
    (x5^2 + y5^2) / xi_z^2 plus a constant.
    """
    k: float
    radii: Vector
    xi: Vector
    A: float
    B: float
    C: float
    D: float
    E: float
    F: float
    center: Vector
    conic_radii: Vector
    H1: np.ndarray
    H2: np.ndarray
    t2: Vector
    H3: np.ndarray
    H4: np.ndarray
    t4: Vector
    H5: np.ndarray
    R: float
    S: float
    v: float
    n1: float
    n2: float

    def conic(self, point) -> float:
        x, y = point
        return self.A * x * x + self.B * x * y + self.C * y * y + self.D * x + self.E * y + self.F

    def axis_from_conic(self, point) -> Vector:
        """ Undo the substitutions, returns the measurement axis in the diagonal frame """
        x4 = self.H5 @ np.asarray(point, dtype=np.float64)
        x2 = self.H3 @ (self.H4 @ x4 + self.t4)
        return self.H1 @ (self.H2 @ x2 + self.t2)


@dataclass(frozen=True, eq=False)
class Region:
    channel: AffineChannel
    frame: DiagonalFrame
    samples: Sequence[RegionSample]
    border: Sequence[TransitionPoint]
    maximal: Sequence[RegionSample]
    cp_tol: float = DEFAULT_CP_TOLERANCE

    def __repr__(self):
        return (f'{type(self).__name__}(channel={self.channel!r}, samples={len(self.samples)}, '
                f'border={len(self.border)}, maximal={len(self.maximal)})')

    def area(self) -> float:
        """ Area of the region, twice the part above the anti-bisecting line """
        polygon = np.array(self.border, dtype=np.float64)
        x, y = polygon[:, 0], polygon[:, 1]
        upper = 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
        return float(2.0 * upper)

    def frontier(self) -> list:
        """ Closed frontier: the border followed by its reflection through (0.5, 0.5) """
        return list(self.border) + [point.complement() for point in self.border[1:]]


def chebyshev_nodes(upper: float, count: int) -> Vector:
    """ Chebyshev-Lobatto nodes on [0, upper], both endpoints included """
    if count < 2:
        raise ValueError(f'count have to be at least 2. got {count}')
    nodes = upper * (1.0 - np.cos(np.pi * np.arange(count) / (count - 1))) / 2.0
    nodes[0], nodes[-1] = 0.0, upper
    return nodes


def ellipse_reduction(frame: DiagonalFrame, k: float) -> EllipseProblem:
    """
    Reduction of the edge problem in the frame as given, dividing by the radii and by xi_z
    """
    return _reduce(frame.s, frame.xi, k)


def farthest_on_ellipse(problem: EllipseProblem) -> Vector:
    """
    Point of the conic farthest from the origin; among equal maxima the one with the largest (x, y)
    """
    rx, ry = problem.conic_radii
    if not (problem.A > 0 and problem.C > 0 and np.isfinite(rx) and np.isfinite(ry)):
        raise DegenerateConicError(f'conic is not an ellipse (A={problem.A!r}, C={problem.C!r})')
    psi, _ = farthest_offset(problem.conic_radii, -problem.center)
    return problem.center + problem.conic_radii * psi


def edge_problem(frame: DiagonalFrame, k: float, *, method: str = 'auto',
                 cp_tol: Optional[float] = None) -> RegionSample:
    """
    Measurement axis maximizing |S^T axis| among unit axes with axis . xi == k, with its transition point.

    method: 'ellipse' runs the conic reduction (raising DegenerateReductionError when it does not
    apply), 'direct' runs ascent on the feasible circle, 'auto' tries the first and falls back.
    cp_tol is the tolerance the channel was accepted with; its images may overshoot the ball by that much.
    """
    if method not in ('auto', 'ellipse', 'direct'):
        raise ValueError(f'unknown edge problem method {method!r}')
    k = float(k)
    xi_norm = float(np.linalg.norm(frame.xi))
    if abs(k) > xi_norm + 1e-12:
        raise InfeasibleConstraintError(f'|k| = {abs(k)!r} exceeds |xi| = {xi_norm!r}')
    k = float(np.clip(k, -xi_norm, xi_norm))

    if xi_norm <= 1e-12:
        axis_frame = np.array([1.0, 0.0, 0.0])
    elif 1.0 - (k / xi_norm) ** 2 <= 1e-15:
        axis_frame = np.sign(k) * frame.xi / xi_norm
    elif method == 'direct':
        axis_frame = _edge_direct(frame.s, frame.xi, k)
    elif method == 'ellipse':
        axis_frame = _edge_ellipse(frame.s, frame.xi, k)
    else:
        try:
            axis_frame = _edge_ellipse(frame.s, frame.xi, k)
        except (DegenerateReductionError, DegenerateConicError) as error:
            logger.debug('k=%r: ellipse reduction unavailable (%s), using direct solver', k, error)
            axis_frame = _edge_direct(frame.s, frame.xi, k)

    axis_frame = axis_frame / np.linalg.norm(axis_frame)
    axis = frame.U @ axis_frame
    axis /= np.linalg.norm(axis)
    w1 = support_point(frame, axis).w
    cp_tol = configuration_map.get_configuration().cp_tol if cp_tol is None else cp_tol
    point = transition_probabilities(axis, 2.0 * frame.shift - w1, w1, tol=image_tolerance(cp_tol))
    return RegionSample(k=k, axis=axis, point=point, objective=float(np.linalg.norm(frame.s * axis_frame)))


def generate_region(channel: AffineChannel, n_samples: Optional[int] = None, *,
                    cp_tol: Optional[float] = None, parallel: bool = True) -> Region:
    settings = configuration_map.get_configuration()
    n_samples = settings.samples if n_samples is None else n_samples
    if n_samples < 2:
        raise ValueError(f'n_samples have to be at least 2. got {n_samples}')
    cp_tol = settings.cp_tol if cp_tol is None else cp_tol
    require_cptp(channel, cp_tol)

    frame = diagonalize(channel)
    xi_norm = float(np.linalg.norm(frame.xi))
    nodes = chebyshev_nodes(xi_norm, n_samples) if xi_norm > 1e-12 else np.zeros(1)
    samples = ordered_map(lambda k: edge_problem(frame, k, cp_tol=cp_tol), nodes, parallel=parallel)
    mirrored = [sample.mirrored() for sample in reversed(samples) if sample.k > 0.0]
    generating = mirrored + samples
    border, maximal = _border_and_maximal(generating)
    logger.info('region of %r: %d generating samples, %d maximal', channel.name or 'channel',
                len(generating), len(maximal))
    return Region(
        channel=channel,
        frame=frame,
        samples=tuple(generating),
        border=tuple(border),
        maximal=tuple(maximal),
        cp_tol=cp_tol)


def region_contains(region: Region, p, tol: float = BOUNDARY_TOLERANCE) -> bool:
    """
    True when p lies in one of the parallelograms (0, 1), s, (1, 0), (1, 1) - s spanned by the samples
    """
    p11, p00 = p
    if not (-tol <= p11 <= 1 + tol and -tol <= p00 <= 1 + tol):
        return False
    points = np.array([sample.point for sample in region.samples], dtype=np.float64)
    ex, ey = p11 - 0.5, p00 - 0.5
    d1x, d1y = 0.5, -0.5
    d2x, d2y = points[:, 0] - 0.5, points[:, 1] - 0.5
    det = d1x * d2y - d2x * d1y
    regular = np.abs(det) > 1e-15
    with np.errstate(divide='ignore', invalid='ignore'):
        alpha = (ex * d2y - d2x * ey) / det
        beta = (d1x * ey - d1y * ex) / det
    if np.any(regular & (np.abs(alpha) + np.abs(beta) <= 1.0 + tol)):
        return True
    # a flat parallelogram is the segment from (0, 1) to (1, 0)
    on_segment = abs(p11 + p00 - 1.0) <= tol and abs(ex * d1x + ey * d1y) / 0.5 <= 1.0 + tol
    return bool(on_segment and np.any(~regular))


def dump_region_csv(region: Region, stream):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(REGION_CSV_HEADER)
    for sample in region.samples:
        writer.writerow([_number(value) for value in (
            sample.k, *sample.axis, sample.point.p11, sample.point.p00, sample.objective)])


def dump_border_csv(region: Region, stream):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(BORDER_CSV_HEADER)
    for point in region.border:
        writer.writerow([_number(point.p11), _number(point.p00)])


def _number(value: float) -> str:
    return format(float(value), '.17g')


def _edge_ellipse(radii: Vector, xi: Vector, k: float) -> Vector:
    """ Conic path with the axes relabelled so the divisor xi_z is the largest |xi| component """
    permutation = _divisor_last(xi)
    problem = _reduce(radii[permutation], xi[permutation], k)
    point = farthest_on_ellipse(problem)
    axis = np.empty(3)
    axis[permutation] = problem.axis_from_conic(point)
    return axis


def _divisor_last(xi: Vector) -> list:
    largest = int(np.argmax(np.abs(xi)))
    return [index for index in range(3) if index != largest] + [largest]


def _reduce(radii: Vector, xi: Vector, k: float) -> EllipseProblem:
    a, b, c = (float(value) for value in radii)
    bx, by, bz = (float(value) for value in xi)
    xi_norm = float(np.linalg.norm(xi))
    if abs(k) > xi_norm + 1e-12:
        raise InfeasibleConstraintError(f'|k| = {abs(k)!r} exceeds |xi| = {xi_norm!r}')
    if min(a, b, c) < REDUCTION_TOLERANCE:
        raise DegenerateReductionError(f'radius below {REDUCTION_TOLERANCE}: {(a, b, c)!r}')
    if abs(bz) < REDUCTION_TOLERANCE:
        raise DegenerateReductionError(f'|xi_z| below {REDUCTION_TOLERANCE}: {bz!r}')

    v = b * b * bx * bx + a * a * by * by
    root_v = np.sqrt(v)
    R = np.sqrt(a * a * b * b * bz * bz + c * c * v)

    H1 = np.diag([1.0 / a, 1.0 / b, 1.0 / c])
    H2 = np.array([
        [1.0, 0.0],
        [0.0, 1.0],
        [-c * bx / (a * bz), -c * by / (b * bz)],
    ])
    t2 = np.array([0.0, 0.0, c * k / bz])
    if root_v > 1e-12:
        H3 = np.array([[b * bx, a * by], [a * by, -b * bx]]) / root_v
    else:
        H3 = np.eye(2)
    H4 = np.diag([a * b / R, 1.0 / bz])
    t4 = np.array([k * a * b * c * c * root_v / (R * R), 0.0])

    # sphere |H1 (H2 x2 + t2)| = 1 as x2^T Q x2 + 2 q^T x2 + r = 0
    slope = H2[2]
    offset = t2[2]
    Q = np.diag([1.0 / (a * a), 1.0 / (b * b)]) + np.outer(slope, slope) / (c * c)
    q = slope * offset / (c * c)
    r = offset * offset / (c * c) - 1.0

    L = H3 @ H4
    m = H3 @ t4
    Q4 = L.T @ Q @ L
    q4 = L.T @ (Q @ m + q)
    r4 = float(m @ Q @ m + 2.0 * q @ m + r)

    H5, larger, smaller, n1, n2 = _principal_axes(Q4)
    q5 = H5.T @ q4
    scale = bz * bz
    A, C = scale * larger, scale * smaller
    D, E = scale * 2.0 * q5[0], scale * 2.0 * q5[1]
    F = scale * r4
    S = _conic_radicand(a, b, c, bx, by, bz)

    _cross_check(a, b, c, bx, by, bz, k, R, A, C, F, S)

    center = np.array([-D / (2.0 * A), -E / (2.0 * C)])
    numerator = D * D * C + E * E * A - 4.0 * A * C * F
    if numerator < 0.0:
        if numerator < -1e-12 * max(1.0, abs(4.0 * A * C * F)):
            raise DegenerateConicError(f'conic has no real points (k={k!r})')
        numerator = 0.0
    conic_radii = np.array([np.sqrt(numerator / (4.0 * A * A * C)), np.sqrt(numerator / (4.0 * A * C * C))])
    return EllipseProblem(
        k=k, radii=np.array([a, b, c]), xi=np.array([bx, by, bz]),
        A=A, B=0.0, C=C, D=D, E=E, F=F,
        center=center, conic_radii=conic_radii,
        H1=H1, H2=H2, t2=t2, H3=H3, H4=H4, t4=t4, H5=H5,
        R=float(R), S=float(S), v=float(v), n1=n1, n2=n2)


def _principal_axes(quadratic: np.ndarray):
    """
    Rotation whose first column is the eigenvector of the larger eigenvalue, built from the
    unnormalized closed-form eigenvectors; returns (H5, larger, smaller, n1, n2)
    """
    p, s, r = quadratic[0, 0], quadratic[1, 1], quadratic[0, 1]
    mean = 0.5 * (p + s)
    spread = np.hypot(0.5 * (p - s), r)
    larger, smaller = mean + spread, mean - spread
    if abs(r) <= 1e-15 * max(1.0, abs(p), abs(s)):
        H5 = np.eye(2) if p >= s else np.array([[0.0, -1.0], [1.0, 0.0]])
        return H5, float(larger), float(smaller), 1.0, 1.0
    if p >= s:
        first = np.array([larger - s, r])
        second = np.array([r, smaller - p])
    else:
        first = np.array([r, larger - p])
        second = np.array([smaller - s, r])
    n1, n2 = float(np.linalg.norm(first)), float(np.linalg.norm(second))
    H5 = np.column_stack([first / n1, second / n2])
    return H5, float(larger), float(smaller), n1, n2


def _conic_radicand(a, b, c, bx, by, bz) -> float:
    """ Expression under the root of the closed-form A and C, R^2 (A - C) = sqrt(S) """
    return float(((b * b - c * c) * bx * bx + (a * a - c * c) * by * by + (a * a - b * b) * bz * bz
                  - 4.0 * bx * bx * bz * bz * (a * a - b * b) * (b * b - c * c)))


def _cross_check(a, b, c, bx, by, bz, k, R, A, C, F, radicand):
    """
    Compare with the closed-form conic coefficients; the substitution chain is authoritative
    """
    base = (a * a + b * b) * bz * bz + (b * b + c * c) * bx * bx + (a * a + c * c) * by * by
    root = np.sqrt(radicand) if radicand >= 0 else np.nan
    closed_a = (base + root) / (2.0 * R * R)
    closed_c = (base - root) / (2.0 * R * R)
    closed_f = bz * bz * (k * k * (a ** 4 * b ** 4 * bz * bz + b ** 4 * c ** 4 * bx * bx
                                   + a ** 4 * c ** 4 * by * by) / R ** 4 - 1.0)
    if not np.allclose([closed_a, closed_c, closed_f], [A, C, F], rtol=1e-8, atol=1e-12):
        logger.debug('closed-form conic (A, C, F)=%r differs from substitution chain %r; keeping the chain',
                     (closed_a, closed_c, closed_f), (A, C, F))
    if not np.isclose(base / (R * R), A + C, rtol=1e-8, atol=1e-12):
        logger.debug('conic trace %r differs from closed form %r', A + C, base / (R * R))


def _edge_direct(radii: Vector, xi: Vector, k: float) -> Vector:
    """
    Ascent on the feasible circle p(theta) = center + rho (cos theta e1 + sin theta e2) from
    equally spaced starts; |S p|^2 is a degree-2 trigonometric polynomial in theta
    """
    xi_norm = float(np.linalg.norm(xi))
    normal = xi / xi_norm
    e1, e2 = _orthonormal_complement(normal)
    center = (k / xi_norm) * normal
    rho = float(np.sqrt(max(0.0, 1.0 - (k / xi_norm) ** 2)))
    weights = np.asarray(radii, dtype=np.float64) ** 2

    alpha1 = float(center @ (weights * e1))
    alpha2 = float(center @ (weights * e2))
    m11 = float(e1 @ (weights * e1))
    m22 = float(e2 @ (weights * e2))
    m12 = float(e1 @ (weights * e2))
    base = float(center @ (weights * center))

    def value(theta):
        return (base + 2 * rho * (alpha1 * np.cos(theta) + alpha2 * np.sin(theta))
                + rho * rho * (m11 * np.cos(theta) ** 2 + 2 * m12 * np.sin(theta) * np.cos(theta)
                               + m22 * np.sin(theta) ** 2))

    def slope(theta):
        return (2 * rho * (alpha2 * np.cos(theta) - alpha1 * np.sin(theta))
                + rho * rho * ((m22 - m11) * np.sin(2 * theta) + 2 * m12 * np.cos(2 * theta)))

    def curvature(theta):
        return (-2 * rho * (alpha2 * np.sin(theta) + alpha1 * np.cos(theta))
                + rho * rho * (2 * (m22 - m11) * np.cos(2 * theta) - 4 * m12 * np.sin(2 * theta)))

    lipschitz = 2 * rho * (abs(alpha1) + abs(alpha2)) + rho * rho * (2 * abs(m22 - m11) + 4 * abs(m12)) + 1e-300
    best_theta, best_value = 0.0, -np.inf
    for start in range(DIRECT_RESTARTS):
        theta = 2 * np.pi * start / DIRECT_RESTARTS
        for _ in range(200):
            gradient = slope(theta)
            if abs(gradient) <= 1e-15 * lipschitz:
                break
            bend = curvature(theta)
            step = gradient / lipschitz
            if bend < 0:
                newton = -gradient / bend
                if abs(newton) <= 0.5:
                    step = newton
            if value(theta + step) < value(theta) - 1e-15 * lipschitz:
                step = gradient / lipschitz
            theta += step
            if abs(step) <= 1e-12:
                break
        current = value(theta)
        if current > best_value + 1e-15:
            best_theta, best_value = theta, current
    return center + rho * (np.cos(best_theta) * e1 + np.sin(best_theta) * e2)


def _orthonormal_complement(normal: Vector):
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(normal)))] = 1.0
    e1 = np.cross(normal, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(normal, e1)


def _border_and_maximal(samples: Sequence[RegionSample]):
    """
    Upper border of the union of triangles (0, 1), s, (1, 0) and the samples lying on it.

    With t = p11 - p00 and h = p11 + p00 - 1 a triangle covers (t, h) iff
    h / (1 + t) <= h_s / (1 + t_s) and h / (1 - t) <= h_s / (1 - t_s), so the border is the image
    of the staircase over the Pareto front of these two slopes.
    """
    points = np.array([sample.point for sample in samples], dtype=np.float64)
    t = points[:, 0] - points[:, 1]
    h = points[:, 0] + points[:, 1] - 1.0
    raised = np.flatnonzero(h > 1e-15)
    start, end = TransitionPoint(0.0, 1.0), TransitionPoint(1.0, 0.0)
    if raised.size == 0:
        return [start, end], list(samples)

    left = h[raised] / (1.0 + t[raised])
    right = h[raised] / (1.0 - t[raised])

    order = np.lexsort((-right, -left))
    front = []
    best_right = -np.inf
    for index in order:
        if right[index] > best_right + 1e-15:
            front.append(index)
            best_right = right[index]

    vertices = [(-1.0, 0.0)]
    for position, index in enumerate(front):
        vertices.append((t[raised][index], h[raised][index]))
        if position + 1 < len(front):
            corner_left, corner_right = left[front[position + 1]], right[index]
            vertices.append(((corner_right - corner_left) / (corner_right + corner_left),
                             2.0 * corner_left * corner_right / (corner_left + corner_right)))
    vertices.append((1.0, 0.0))

    border = []
    for vt, vh in vertices:
        point = TransitionPoint(float((1.0 + vh + vt) / 2.0), float((1.0 + vh - vt) / 2.0))
        if not border or max(abs(point.p11 - border[-1].p11), abs(point.p00 - border[-1].p00)) > 1e-15:
            border.append(point)
    border[0], border[-1] = start, end

    dominated = ((left[None, :] > left[:, None] + 1e-12) & (right[None, :] > right[:, None] + 1e-12)).any(axis=1)
    maximal = [samples[index] for index in raised[~dominated]]
    return border, maximal
