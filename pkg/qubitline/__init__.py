"""
qubitline computes what a qubit channel can do as a binary classical channel: the region of
achievable transition probabilities, the optimal probability of correct decision and the binary capacity
"""
from . import accessor
from .accessor import register_artifact_location
from .bloch import TransitionPoint, coherence_to_state, state_to_coherence, transition_probabilities
from .capacity import CapacityReport, binary_entropy, mutual_information, optimal_prior, optimize_capacity
from .channel import (
    EXAMPLE_CHANNELS,
    AffineChannel,
    DiagonalFrame,
    apply,
    choi_cptp_check,
    diagonalize,
    farthest_point,
    support_point,
)
from .configuration import SolverSettings, configuration_map, register_solver_parameter
from .detection import DetectionReport, optimize_pc, pc_of_point
from .ordering import TransitionMatrix, dominates, less_capable, stochastically_degraded
from .region import Region, RegionSample, edge_problem, generate_region, region_contains

__version__ = '0.1.0'
__all__ = (
    'accessor',
    'register_artifact_location',
    'register_solver_parameter',
    'configuration_map',
    'SolverSettings',
    'TransitionPoint',
    'coherence_to_state',
    'state_to_coherence',
    'transition_probabilities',
    'EXAMPLE_CHANNELS',
    'AffineChannel',
    'DiagonalFrame',
    'apply',
    'choi_cptp_check',
    'diagonalize',
    'support_point',
    'farthest_point',
    'Region',
    'RegionSample',
    'edge_problem',
    'generate_region',
    'region_contains',
    'DetectionReport',
    'optimize_pc',
    'pc_of_point',
    'CapacityReport',
    'binary_entropy',
    'mutual_information',
    'optimal_prior',
    'optimize_capacity',
    'TransitionMatrix',
    'dominates',
    'less_capable',
    'stochastically_degraded',
)
