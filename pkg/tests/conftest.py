import boto3
import numpy as np
import pytest
from moto import mock_aws
from scipy.stats import special_ortho_group

from qubitline import accessor, configuration, register_artifact_location
from qubitline.channel import EXAMPLE_CHANNELS, AffineChannel


def _cleanup():
    accessor.configuration_map.get_configuration.cache_clear()
    accessor.configuration_map.is_setup = False
    configuration.configuration_map.get_configuration.cache_clear()
    configuration.configuration_map.is_setup = False


@pytest.fixture()
def reset_configuration_cache():
    try:
        _cleanup()
        yield
    finally:
        _cleanup()


@pytest.fixture()
def s3_mock(reset_configuration_cache):
    with mock_aws():
        register_artifact_location('s3://', client=boto3.client('s3', region_name='us-east-1'))
        yield


@pytest.fixture()
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture()
def region_channel():
    return EXAMPLE_CHANNELS['region']


@pytest.fixture(params=['separation-1', 'separation-2', 'separation-3'])
def separation_channel(request):
    return EXAMPLE_CHANNELS[request.param]


@pytest.fixture()
def sphere_channel():
    """ Image is a small sphere off the origin, every optimal axis ties """
    return EXAMPLE_CHANNELS['shape-5']


@pytest.fixture()
def half_depolarizing():
    return AffineChannel.diagonal([0.5, 0.5, 0.5])


@pytest.fixture()
def random_unital(rng):
    """ Rotated Pauli channels R1 diag(l) R2, b = 0 """

    def make():
        q = rng.dirichlet(np.ones(4))
        diagonal = [q[0] + q[1] - q[2] - q[3], q[0] - q[1] + q[2] - q[3], q[0] - q[1] - q[2] + q[3]]
        left, right = special_ortho_group.rvs(3, size=2, random_state=rng)
        return AffineChannel(left @ np.diag(diagonal) @ right, np.zeros(3))

    return make
