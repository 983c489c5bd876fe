"""
Binary capacity of a qubit channel restricted to orthogonal pure inputs and projective measurements.

The prior is optimized in closed form for every transition point; the outer search runs over the
region's generating samples and is refined by golden-section search on k.
"""
from __future__ import annotations

import logging
import math
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy.special import expit, xlogy

from .bloch import TransitionPoint, Vector, check_probability
from .channel import AffineChannel, antipodal_inputs
from .configuration import configuration_map
from .region import Region, edge_problem, generate_region

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
SINGULAR_TOLERANCE = 1e-12
GOLDEN_RATIO = (math.sqrt(5.0) - 1.0) / 2.0


class PriorOptimum(NamedTuple):
    p1: float
    r: float
    i: float


class CapacityReport(NamedTuple):
    c_bin: float
    point: TransitionPoint
    prior_p1: float
    r: float
    axis: Vector
    inputs: Tuple[Vector, Vector]
    k_at_opt: float
    unimodal: bool = True

    def as_dict(self) -> dict:
        return {
            'c_bin': self.c_bin,
            'prior_p1': self.prior_p1,
            'r': self.r,
            'point': {'p11': self.point.p11, 'p00': self.point.p00},
            'axis': self.axis.tolist(),
            'inputs': [vector.tolist() for vector in self.inputs],
            'k_at_opt': self.k_at_opt,
            'unimodal': self.unimodal,
        }


class CapacityGrid(NamedTuple):
    p11: np.ndarray
    p00: np.ndarray
    capacity: np.ndarray
    prior_p1: np.ndarray


def binary_entropy(x: float) -> float:
    x = check_probability(x, name='x')
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def binary_entropy_derivative(x: float) -> float:
    """ h'(x) = log2((1 - x) / x), infinite at the endpoints """
    x = check_probability(x, name='x')
    if x == 0.0:
        return math.inf
    if x == 1.0:
        return -math.inf
    return math.log2((1.0 - x) / x)


def inverse_entropy_derivative(y: float) -> float:
    """ g(y) = 1 / (2^y + 1), the inverse of h' """
    return float(expit(-y * LN2))


def mutual_information(p, p1: float) -> float:
    p11 = check_probability(p[0], name='p11')
    p00 = check_probability(p[1], name='p00')
    p1 = check_probability(p1, name='p1')
    r = min(1.0, max(0.0, p00 + p1 * (1.0 - p11 - p00)))
    information = binary_entropy(r) - p1 * binary_entropy(p11) - (1.0 - p1) * binary_entropy(p00)
    return max(0.0, information)


def mutual_information_curve(p, priors) -> np.ndarray:
    """ mutual_information over an array of priors """
    p11, p00 = (check_probability(value) for value in p)
    priors = np.asarray(priors, dtype=np.float64)
    r = np.clip(p00 + priors * (1.0 - p11 - p00), 0.0, 1.0)
    information = _entropy(r) - priors * _entropy(p11) - (1.0 - priors) * _entropy(p00)
    return np.maximum(information, 0.0)


def optimal_prior(p) -> PriorOptimum:
    """
    Capacity-achieving prior P(X=1) of a binary channel and the resulting output probability
    r = P(Y=0) and mutual information i.

    >> optimal_prior((1.0, 0.5))
    << PriorOptimum(p1=0.6, r=0.2, i=0.3219...)
    """
    p11 = check_probability(p[0], name='p11')
    p00 = check_probability(p[1], name='p00')
    denominator = 1.0 - p11 - p00
    if abs(denominator) < SINGULAR_TOLERANCE:
        # output independent of the input
        return PriorOptimum(p1=0.5, r=p00, i=0.0)
    r = inverse_entropy_derivative((binary_entropy(p11) - binary_entropy(p00)) / denominator)
    p1 = (r - p00) / denominator
    if not 0.0 <= p1 <= 1.0:
        p1 = min(1.0, max(0.0, p1))
        r = min(1.0, max(0.0, p00 + p1 * denominator))
    return PriorOptimum(p1=p1, r=r, i=mutual_information((p11, p00), p1))


def capacity_grid(n: int) -> CapacityGrid:
    """
    Prior-optimized mutual information on an n x n grid of (p11, p00); rows index p11
    """
    if n < 2:
        raise ValueError(f'n have to be at least 2. got {n}')
    values = np.linspace(0.0, 1.0, n)
    p11, p00 = np.meshgrid(values, values, indexing='ij')
    denominator = 1.0 - p11 - p00
    singular = np.abs(denominator) < SINGULAR_TOLERANCE
    safe = np.where(singular, 1.0, denominator)
    r = expit(-LN2 * (_entropy(p11) - _entropy(p00)) / safe)
    prior = np.clip((r - p00) / safe, 0.0, 1.0)
    r = np.clip(p00 + prior * denominator, 0.0, 1.0)
    capacity = np.maximum(_entropy(r) - prior * _entropy(p11) - (1.0 - prior) * _entropy(p00), 0.0)
    prior = np.where(singular, 0.5, prior)
    capacity = np.where(singular, 0.0, capacity)
    return CapacityGrid(p11=p11, p00=p00, capacity=capacity, prior_p1=prior)


def golden_section_maximize(function, low: float, high: float, tol: float):
    """
    Maximizer of a unimodal function on [low, high] to an interval width below tol.
    Returns (x, function(x)).
    """
    a, b = low, high
    c = b - GOLDEN_RATIO * (b - a)
    d = a + GOLDEN_RATIO * (b - a)
    fc, fd = function(c), function(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN_RATIO * (b - a)
            fc = function(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN_RATIO * (b - a)
            fd = function(d)
    x = 0.5 * (a + b)
    return x, function(x)


def optimize_capacity(channel: AffineChannel, n_samples: Optional[int] = None,
                      refine_tol: Optional[float] = None, *, cp_tol: Optional[float] = None,
                      parallel: bool = True) -> CapacityReport:
    settings = configuration_map.get_configuration()
    n_samples = settings.samples if n_samples is None else n_samples
    if n_samples < 8:
        raise ValueError(f'n_samples have to be at least 8. got {n_samples}')
    region = generate_region(channel, n_samples, cp_tol=cp_tol, parallel=parallel)
    return capacity_of_region(region, refine_tol)


def capacity_of_region(region: Region, refine_tol: Optional[float] = None) -> CapacityReport:
    """
    Outer capacity search over an already generated region
    """
    refine_tol = configuration_map.get_configuration().refine_tol if refine_tol is None else refine_tol
    if refine_tol <= 0:
        raise ValueError(f'refine_tol have to be positive. got {refine_tol}')
    frame = region.frame
    # mirrored samples carry the same capacity with the prior flipped
    candidates = [sample for sample in region.samples if sample.k >= 0.0]
    optima = [optimal_prior(sample.point) for sample in candidates]

    best = 0
    for index, optimum in enumerate(optima):
        if optimum.i > optima[best].i + 1e-15:
            best = index
    seed, seed_optimum = candidates[best], optima[best]
    chosen, chosen_optimum, unimodal = seed, seed_optimum, True

    if len(candidates) > 1:
        low = candidates[max(best - 1, 0)].k
        high = candidates[min(best + 1, len(candidates) - 1)].k

        def information(k):
            return optimal_prior(edge_problem(frame, k, cp_tol=region.cp_tol).point).i

        k_refined, _ = golden_section_maximize(information, low, high, refine_tol)
        refined = edge_problem(frame, k_refined, cp_tol=region.cp_tol)
        refined_optimum = optimal_prior(refined.point)
        if refined_optimum.i >= seed_optimum.i:
            chosen, chosen_optimum = refined, refined_optimum
        elif refined_optimum.i < seed_optimum.i - 1e-12:
            unimodal = False
            logger.warning('capacity refinement around k=%r fell below the seed sample (%r < %r)',
                           seed.k, refined_optimum.i, seed_optimum.i)

    logger.info('binary capacity %r at k=%r', chosen_optimum.i, chosen.k)
    return CapacityReport(
        c_bin=chosen_optimum.i,
        point=chosen.point,
        prior_p1=chosen_optimum.p1,
        r=chosen_optimum.r,
        axis=chosen.axis,
        inputs=antipodal_inputs(frame, chosen.axis),
        k_at_opt=chosen.k,
        unimodal=unimodal)


def _entropy(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return -(xlogy(x, x) + xlogy(1.0 - x, 1.0 - x)) / LN2
