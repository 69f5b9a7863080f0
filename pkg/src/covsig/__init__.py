"""Sparse covert-signaling states over lossy thermal bosonic channels."""
from .comm import CommScenario, capability_fock, capability_gaussian, comm_crossover
from .errors import (
    ConfigurationError,
    CovsigError,
    DegenerateBackgroundError,
    DivergenceError,
    DomainError,
    NumericalError,
)
from .kernel import ChannelPort, FockDiagonalInput, PhotonDistribution, output_distribution
from .optimizer import MeanConstraint, optimal_two_point
from .qre import CoefficientParams, SparseInput, cp_direct, cp_meixner, sparse_kl
from .sensing import SensingScenario, capability_fock_sensing, capability_tmsv, sensing_crossover

__version__ = "0.1.0"
