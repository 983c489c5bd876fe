import io

import numpy as np
import pytest

from qubitline import register_solver_parameter
from qubitline.bloch import TransitionPoint, transition_probabilities
from qubitline.channel import AffineChannel, diagonalize, sample_cptp_channel, support_point
from qubitline.errors import DegenerateReductionError, InfeasibleConstraintError, InvalidStateError, NotCPTPError
from qubitline.region import (
    REGION_CSV_HEADER,
    EllipseProblem,
    chebyshev_nodes,
    dump_border_csv,
    dump_region_csv,
    edge_problem,
    ellipse_reduction,
    farthest_on_ellipse,
    generate_region,
    region_contains,
)


def _circle(center, radius):
    cx, cy = center
    return EllipseProblem(
        k=0.0, radii=np.ones(3), xi=np.array([0.0, 0.0, 1.0]),
        A=1.0, B=0.0, C=1.0, D=-2.0 * cx, E=-2.0 * cy, F=cx * cx + cy * cy - radius * radius,
        center=np.array(center, dtype=float), conic_radii=np.array([radius, radius], dtype=float),
        H1=np.eye(3), H2=np.zeros((3, 2)), t2=np.zeros(3), H3=np.eye(2), H4=np.eye(2), t4=np.zeros(2),
        H5=np.eye(2), R=1.0, S=0.0, v=0.0, n1=1.0, n2=1.0)


def _circle_objectives(channel, k, count):
    """ |T^T axis| over the unit axes with axis . b == k """
    xi_norm = np.linalg.norm(channel.b)
    normal = channel.b / xi_norm
    helper = np.eye(3)[np.argmin(np.abs(normal))]
    e1 = np.cross(normal, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    theta = np.linspace(0, 2 * np.pi, count, endpoint=False)
    rho = np.sqrt(max(0.0, 1 - (k / xi_norm) ** 2))
    axes = (k / xi_norm) * normal + rho * (np.outer(np.cos(theta), e1) + np.outer(np.sin(theta), e2))
    return axes, np.linalg.norm(axes @ channel.T, axis=1)


def test_chebyshev_nodes():
    nodes = chebyshev_nodes(0.4, 9)
    assert nodes[0] == 0.0
    assert nodes[-1] == 0.4
    assert np.all(np.diff(nodes) > 0)
    assert nodes[4] == pytest.approx(0.2)
    assert nodes[1] - nodes[0] < nodes[5] - nodes[4]

    with pytest.raises(ValueError):
        chebyshev_nodes(1.0, 1)


def test_ellipse_reduction_round_trip(region_channel):
    frame = diagonalize(region_channel)
    problem = ellipse_reduction(frame, 0.1)
    assert problem.A > 0 and problem.C > 0
    assert problem.B == 0.0

    point = farthest_on_ellipse(problem)
    assert problem.conic(point) == pytest.approx(0.0, abs=1e-10)
    axis = problem.axis_from_conic(point)
    assert np.linalg.norm(axis) == pytest.approx(1.0, abs=1e-8)
    assert axis @ frame.xi == pytest.approx(0.1, abs=1e-8)

    theta = np.linspace(0, 2 * np.pi, 7, endpoint=False)
    for angle in theta:
        on_conic = problem.center + problem.conic_radii * np.array([np.cos(angle), np.sin(angle)])
        assert problem.conic(on_conic) == pytest.approx(0.0, abs=1e-10)
        axis = problem.axis_from_conic(on_conic)
        assert np.linalg.norm(axis) == pytest.approx(1.0, abs=1e-8)
        assert axis @ frame.xi == pytest.approx(0.1, abs=1e-8)


def test_ellipse_reduction_centered_when_shift_on_divisor_axis():
    frame = diagonalize(AffineChannel.diagonal([0.5, 0.4, 0.3], [0, 0, 0.2]))
    problem = ellipse_reduction(frame, 0.0)
    assert problem.D == pytest.approx(0.0, abs=1e-12)
    assert problem.E == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(problem.center, 0.0, atol=1e-12)


def test_ellipse_reduction_degenerate():
    frame = diagonalize(AffineChannel.diagonal([0.5, 0.4, 0.3], [0.2, 0, 0]))
    with pytest.raises(DegenerateReductionError):
        ellipse_reduction(frame, 0.1)

    frame = diagonalize(AffineChannel.diagonal([0.5, 0.4, 0.0], [0.1, 0.1, 0.2]))
    with pytest.raises(DegenerateReductionError):
        ellipse_reduction(frame, 0.1)

    with pytest.raises(InfeasibleConstraintError):
        ellipse_reduction(diagonalize(AffineChannel.diagonal([0.5, 0.4, 0.3], [0, 0, 0.2])), 0.3)


def test_farthest_on_ellipse_circles():
    assert np.allclose(farthest_on_ellipse(_circle((0.0, 0.0), 2.0)), [2.0, 0.0])

    point = farthest_on_ellipse(_circle((3.0, 0.0), 1.0))
    assert np.allclose(point, [4.0, 0.0])
    assert point @ point == pytest.approx(16.0)


def test_farthest_on_ellipse_matches_angular_grid(rng):
    theta = np.linspace(0, 2 * np.pi, 1_000_000, endpoint=False)
    checked = 0
    while checked < 5:
        frame = diagonalize(sample_cptp_channel(rng))
        xi_norm = np.linalg.norm(frame.xi)
        if abs(frame.xi[2]) < 0.05 or frame.s[-1] < 0.05:
            continue
        problem = ellipse_reduction(frame, rng.uniform(-0.9, 0.9) * xi_norm)
        point = farthest_on_ellipse(problem)
        grid = problem.center + np.column_stack([problem.conic_radii[0] * np.cos(theta),
                                                 problem.conic_radii[1] * np.sin(theta)])
        oracle = np.max(np.einsum('ij,ij->i', grid, grid))
        assert point @ point == pytest.approx(oracle, abs=1e-6)
        assert point @ point >= oracle - 1e-12
        checked += 1


def test_edge_problem_unital():
    channel = AffineChannel.diagonal([0.3, 0.8, 0.2])
    sample = edge_problem(diagonalize(channel), 0.0)
    assert np.allclose(sample.axis, [0, 1, 0])
    assert sample.objective == pytest.approx(0.8)
    assert sample.point == pytest.approx((0.9, 0.9))


def test_edge_problem_at_largest_k(region_channel):
    frame = diagonalize(region_channel)
    xi_norm = np.linalg.norm(frame.xi)
    sample = edge_problem(frame, xi_norm)
    assert np.allclose(sample.axis, region_channel.b / np.linalg.norm(region_channel.b))

    sample = edge_problem(frame, -xi_norm)
    assert np.allclose(sample.axis, -region_channel.b / np.linalg.norm(region_channel.b))

    with pytest.raises(InfeasibleConstraintError):
        edge_problem(frame, xi_norm + 1e-6)
    with pytest.raises(ValueError):
        edge_problem(frame, 0.0, method='newton')


def test_edge_problem_matches_circle_grid(region_channel):
    frame = diagonalize(region_channel)
    _, objectives = _circle_objectives(region_channel, 0.2, 100_000)
    for method in ('auto', 'ellipse', 'direct'):
        sample = edge_problem(frame, 0.2, method=method)
        assert sample.objective == pytest.approx(objectives.max(), abs=1e-5)
        assert sample.objective >= objectives.max() - 1e-12


def test_edge_problem_sample_invariants(region_channel):
    frame = diagonalize(region_channel)
    for k in np.linspace(-0.39, 0.39, 13):
        sample = edge_problem(frame, k)
        assert np.linalg.norm(sample.axis) == pytest.approx(1.0, abs=1e-9)
        assert sample.axis @ region_channel.b == pytest.approx(k, abs=1e-9)
        w = support_point(frame, sample.axis).w
        expected = transition_probabilities(sample.axis, 2 * region_channel.b - w, w)
        assert sample.point == pytest.approx(expected, abs=1e-10)
        assert 0 <= sample.point.p11 <= 1 and 0 <= sample.point.p00 <= 1


def test_ellipse_and_direct_paths_agree(rng):
    for _ in range(1000):
        channel = sample_cptp_channel(rng)
        frame = diagonalize(channel)
        k = rng.uniform(-1, 1) * np.linalg.norm(frame.xi)
        ellipse = edge_problem(frame, k, method='auto')
        direct = edge_problem(frame, k, method='direct')
        assert ellipse.objective == pytest.approx(direct.objective, abs=1e-6)
        assert ellipse.axis @ channel.b == pytest.approx(k, abs=1e-8)


def test_edge_problem_mirror(region_channel):
    frame = diagonalize(region_channel)
    for k in (0.05, 0.17, 0.3):
        sample = edge_problem(frame, k)
        mirror = edge_problem(frame, -k, method='direct')
        assert mirror.point == pytest.approx(sample.point.swapped(), abs=1e-6)


def test_generate_region_identity():
    region = generate_region(AffineChannel.identity(), 16)
    assert [sample.point for sample in region.samples] == [(1.0, 1.0)]
    assert [sample.point for sample in region.maximal] == [(1.0, 1.0)]
    assert region.area() == pytest.approx(1.0)
    assert region_contains(region, (0.99, 0.99))
    assert region_contains(region, (0.01, 0.01))


def test_generate_region_fully_depolarizing():
    region = generate_region(AffineChannel.diagonal([0, 0, 0]), 16)
    assert [sample.point for sample in region.samples] == [(0.5, 0.5)]
    assert [sample.point for sample in region.maximal] == [(0.5, 0.5)]
    assert list(region.border) == [(0.0, 1.0), (1.0, 0.0)]
    assert region.area() == pytest.approx(0.0)
    assert region_contains(region, (0.5, 0.5))
    assert region_contains(region, (0.2, 0.8))
    assert not region_contains(region, (0.6, 0.6))


def test_generate_region_unital_area(half_depolarizing):
    region = generate_region(half_depolarizing, 16)
    assert np.allclose(np.array(region.border), [(0.0, 1.0), (0.75, 0.75), (1.0, 0.0)])
    assert region.area() == pytest.approx(0.5)


def test_generate_region_rejects_non_cp():
    with pytest.raises(NotCPTPError):
        generate_region(AffineChannel.diagonal([1, -1, 1]), 16)
    with pytest.raises(ValueError):
        generate_region(AffineChannel.identity(), 1)


def test_region_symmetries(region_channel, rng):
    region = generate_region(region_channel, 256)
    points = np.array([sample.point for sample in region.samples])
    assert len(region.samples) == 2 * 256 - 1
    assert np.allclose(points[::-1], points[:, ::-1], atol=1e-6)
    ks = [sample.k for sample in region.samples]
    assert ks == sorted(ks)

    for trivial in ((1.0, 0.0), (0.0, 1.0), (0.5, 0.5)):
        assert region_contains(region, trivial)
    for p in rng.uniform(0, 1, size=(300, 2)):
        point = TransitionPoint(*p)
        assert region_contains(region, point) == region_contains(region, point.complement())
        assert region_contains(region, point) == region_contains(region, point.swapped())


def test_region_samples_match_circle_grid(region_channel):
    region = generate_region(region_channel, 256)
    for sample in region.samples[::32]:
        _, objectives = _circle_objectives(region_channel, sample.k, 100_000)
        assert sample.objective == pytest.approx(objectives.max(), abs=1e-5)


def test_region_samples_are_not_dominated(region_channel):
    region = generate_region(region_channel, 64)
    for sample in region.samples[::8]:
        axes, objectives = _circle_objectives(region_channel, sample.k, 20_000)
        # on the circle p11 and p00 both grow with |T^T axis|
        p11 = (1 + objectives + sample.k) / 2
        p00 = (1 + objectives - sample.k) / 2
        better = (p11 > sample.point.p11 + 1e-6) & (p00 > sample.point.p00 + 1e-6)
        assert not np.any(better)


def test_region_border_and_maximal(region_channel):
    region = generate_region(region_channel, 256)
    assert region.border[0] == (0.0, 1.0)
    assert region.border[-1] == (1.0, 0.0)
    for point in region.border:
        assert point.p11 + point.p00 >= 1.0 - 1e-12
        assert region_contains(region, point)

    samples = [sample.point for sample in region.samples]
    assert region.maximal
    for sample in region.maximal:
        assert sample.point in samples
        assert sample.point.p11 + sample.point.p00 >= 1.0
    assert not region_contains(region, (region.maximal[0].point.p11 + 1e-3, region.maximal[0].point.p00 + 1e-3))

    frontier = region.frontier()
    assert frontier[0] == (0.0, 1.0)
    assert frontier[-1] == pytest.approx((0.0, 1.0))
    assert 0.0 < region.area() < 1.0


def test_region_is_independent_of_worker_count(region_channel, reset_configuration_cache):
    register_solver_parameter(threads=1)
    serial = generate_region(region_channel, 64)
    register_solver_parameter(threads=4)
    parallel = generate_region(region_channel, 64)
    assert [sample.point for sample in serial.samples] == [sample.point for sample in parallel.samples]
    assert list(serial.border) == list(parallel.border)


def test_region_csv(region_channel):
    region = generate_region(region_channel, 16)
    stream = io.StringIO()
    dump_region_csv(region, stream)
    lines = stream.getvalue().splitlines()
    assert lines[0] == ','.join(REGION_CSV_HEADER)
    assert len(lines) == 1 + len(region.samples)
    assert all(len(line.split(',')) == 7 for line in lines[1:])

    stream = io.StringIO()
    dump_border_csv(region, stream)
    lines = stream.getvalue().splitlines()
    assert lines[0] == 'p11,p00'
    assert lines[1] == '0,1'
    assert lines[-1] == '1,0'


def test_ellipse_reduction_keeps_radicand(region_channel):
    problem = ellipse_reduction(diagonalize(region_channel), 0.1)
    a, b, c = problem.radii
    bx, by, bz = problem.xi
    radicand = ((b * b - c * c) * bx * bx + (a * a - c * c) * by * by + (a * a - b * b) * bz * bz
                - 4 * bx * bx * bz * bz * (a * a - b * b) * (b * b - c * c))
    assert problem.S == pytest.approx(radicand, rel=1e-12)


def test_region_of_channel_accepted_at_tolerance():
    channel = AffineChannel(np.eye(3), [0, 0, 2e-10])
    region = generate_region(channel, 16)
    assert region.cp_tol == pytest.approx(1e-9)
    for sample in region.samples:
        assert sample.point == pytest.approx((1.0, 1.0), abs=1e-9)
    assert region.area() == pytest.approx(1.0, abs=1e-9)

    frame = diagonalize(channel)
    with pytest.raises(InvalidStateError):
        edge_problem(frame, 2e-10, cp_tol=0.0)
    assert edge_problem(frame, 2e-10).point == pytest.approx((1.0, 1.0))
