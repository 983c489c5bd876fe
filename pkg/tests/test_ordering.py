import numpy as np
import pytest
from scipy.stats import unitary_group

from qubitline.bloch import TransitionPoint
from qubitline.capacity import optimal_prior
from qubitline.channel import apply, sample_cptp_channel
from qubitline.detection import pc_of_point
from qubitline.errors import InvalidProbabilityError
from qubitline.ordering import (
    TransitionMatrix,
    dominates,
    less_capable,
    projective_refinement,
    stochastically_degraded,
)


def _upper_point(rng):
    """ Uniform point of [0, 1]^2 with p11 + p00 >= 1 """
    p11, p00 = rng.uniform(0, 1, size=2)
    if p11 + p00 < 1:
        p11, p00 = 1 - p11, 1 - p00
    return TransitionPoint(p11, p00)


def _random_antipodal_outputs(rng, channel):
    direction = rng.normal(size=3)
    v = direction / np.linalg.norm(direction)
    return apply(channel, -v), apply(channel, v)


def test_transition_matrix():
    matrix = TransitionMatrix.from_point((0.95, 0.65))
    assert np.allclose(matrix.matrix, [[0.65, 0.05], [0.35, 0.95]])
    assert matrix.point == pytest.approx((0.95, 0.65))
    assert np.allclose(TransitionMatrix.identity().matrix, np.eye(2))
    with pytest.raises(ValueError):
        matrix.matrix[0, 0] = 0.0

    with pytest.raises(TypeError):
        TransitionMatrix(np.eye(3))
    with pytest.raises(InvalidProbabilityError):
        TransitionMatrix([[0.5, 0.5], [0.6, 0.5]])
    with pytest.raises(InvalidProbabilityError):
        TransitionMatrix([[1.5, 0.5], [-0.5, 0.5]])
    with pytest.raises(InvalidProbabilityError):
        TransitionMatrix.from_point((1.1, 0.5))


def test_dominates():
    assert dominates((0.95, 0.65), (0.9, 0.6))
    assert dominates((0.95, 0.65), (0.95, 0.65))
    assert not dominates((0.95, 0.65), (0.99, 0.1))


def test_stochastically_degraded():
    result = stochastically_degraded((0.9, 0.6), (0.95, 0.65))
    assert result.degraded
    assert np.allclose(result.witness.matrix, [[0.891667, 0.058333], [0.108333, 0.941667]], atol=1e-6)
    assert np.allclose(result.witness.matrix @ TransitionMatrix.from_point((0.95, 0.65)).matrix,
                       TransitionMatrix.from_point((0.9, 0.6)).matrix)

    result = stochastically_degraded((0.95, 0.65), (0.95, 0.65))
    assert result.degraded
    assert np.allclose(result.witness.matrix, np.eye(2))

    result = stochastically_degraded((0.99, 0.99), (0.95, 0.65))
    assert not result.degraded
    assert result.witness is None


def test_stochastically_degraded_singular_source():
    useless = (0.7, 0.3)
    result = stochastically_degraded((0.4, 0.6), useless)
    assert result.degraded
    assert np.allclose(result.witness.matrix, [[0.6, 0.6], [0.4, 0.4]])

    assert not stochastically_degraded((0.9, 0.6), useless).degraded


def test_less_capable():
    assert less_capable((0.9, 0.6), (0.95, 0.65))
    assert not less_capable((0.99, 0.99), (0.95, 0.65))
    with pytest.raises(ValueError):
        less_capable((0.9, 0.6), (0.95, 0.65), grid_n=1)


def test_output_relabelling_is_equally_capable(rng):
    for _ in range(20):
        c = _upper_point(rng)
        assert less_capable(c.complement(), c)
        assert less_capable(c, c.complement())


def test_input_relabelling_keeps_capacity(rng):
    for _ in range(20):
        c = _upper_point(rng)
        assert optimal_prior(c.swapped()).i == pytest.approx(optimal_prior(c).i, abs=1e-12)
        assert optimal_prior(c.swapped()).p1 == pytest.approx(1 - optimal_prior(c).p1, abs=1e-9)


def test_implication_chain(rng):
    violations = 0
    dominated = 0
    for _ in range(1000):
        c, c_prime = _upper_point(rng), _upper_point(rng)
        if not dominates(c, c_prime):
            continue
        dominated += 1
        degradation = stochastically_degraded(c_prime, c)
        if not degradation.degraded:
            violations += 1
            continue
        if not less_capable(c_prime, c, grid_n=201):
            violations += 1
            continue
        if optimal_prior(c_prime).i > optimal_prior(c).i + 1e-9:
            violations += 1
        if pc_of_point(c_prime, 0.5) > pc_of_point(c, 0.5) + 1e-12:
            violations += 1
    assert dominated > 50
    assert violations == 0


def test_from_measurement():
    up, down = np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])
    projector_up = np.diag([1.0, 0.0])
    matrix = TransitionMatrix.from_measurement((down, up), np.eye(2) - projector_up)
    assert matrix.point == pytest.approx((1.0, 1.0))

    with pytest.raises(InvalidProbabilityError):
        TransitionMatrix.from_measurement((down, up), 2 * np.eye(2))
    with pytest.raises(InvalidProbabilityError):
        TransitionMatrix.from_measurement((down, up), [[0.5, 0.3], [0.0, 0.5]])


def test_povm_is_degraded_from_projective(rng):
    for index in range(100):
        channel = sample_cptp_channel(rng)
        outputs = _random_antipodal_outputs(rng, channel)
        basis = unitary_group.rvs(2, random_state=index)
        q_a, q_b = rng.uniform(0, 1, size=2)
        effect0 = basis @ np.diag([q_a, q_b]) @ basis.conj().T

        refinement = projective_refinement(outputs, effect0)
        assert np.linalg.norm(refinement.axis) == pytest.approx(1.0)
        assert np.allclose(refinement.witness.matrix @ refinement.projective.matrix,
                           refinement.povm.matrix, atol=1e-9)
        assert stochastically_degraded(refinement.povm, refinement.projective).degraded


def test_projective_beats_povm(rng):
    for index in range(100):
        channel = sample_cptp_channel(rng)
        outputs = _random_antipodal_outputs(rng, channel)
        basis = unitary_group.rvs(2, random_state=1000 + index)
        effect0 = basis @ np.diag(rng.uniform(0, 1, size=2)) @ basis.conj().T
        p0 = rng.uniform()

        refinement = projective_refinement(outputs, effect0)
        projective = refinement.projective.point
        candidates = (
            pc_of_point(projective, p0),
            pc_of_point(projective.complement(), p0),
            max(p0, 1 - p0),
        )
        assert max(candidates) >= pc_of_point(refinement.povm.point, p0) - 1e-12
