"""Covert target detection: Fock-diagonal probe vs sparse TMSV probe.

Hypothesis h = 0 is target absent (everything goes to Willie, nothing
returns to Alice) and h = 1 is target present with Willie-side
transmittance gamma1 < 1.
"""
import math
from dataclasses import dataclass

import numpy as np

from .chernoff import classical_chernoff
from .errors import DomainError
from .gaussian import CovarianceMatrix, gaussian_qcb
from .kernel import EPS_TAIL, ChannelPort, FockDiagonalInput, output_distribution
from .optimizer import optimal_two_point
from .qre import c_thermal_active, c_two_point, cp_direct
from .sweep import capability_or_zero, crossover_grid, first_crossover


@dataclass(frozen=True)
class SensingScenario:
    tau_A: float
    tau_W: float
    gamma1: float
    n_bar_A: float
    n_bar_W: float
    delta: float = 0.05
    eps_tail: float = EPS_TAIL

    def __post_init__(self):
        if not (0.0 < self.eps_tail < 1e-3):
            raise DomainError(f"eps_tail must lie in (0, 1e-3), got {self.eps_tail}")
        for name in ("tau_A", "tau_W", "gamma1"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise DomainError(f"{name} must lie in (0, 1), got {v}")
        if not self.n_bar_A >= 0:
            raise DomainError(f"n_bar_A must be >= 0, got {self.n_bar_A}")
        if not self.n_bar_W > 0:
            raise DomainError(f"n_bar_W must be positive, got {self.n_bar_W}")
        if not self.delta > 0:
            raise DomainError(f"delta must be positive, got {self.delta}")

    def gamma(self, h):
        if h not in (0, 1):
            raise DomainError(f"hypothesis must be 0 or 1, got {h}")
        return 1.0 if h == 0 else self.gamma1

    def alice_port(self, h):
        return ChannelPort((1.0 - self.gamma(h)) * self.tau_A, (1.0 - self.tau_A) * self.n_bar_A)

    def willie_port(self, h):
        return ChannelPort(self.gamma(h) * self.tau_W, (1.0 - self.tau_W) * self.n_bar_W)


def _check_n(n_S):
    if not (0.0 <= n_S <= 1.0):
        raise DomainError(f"n_S must lie in [0, 1], got {n_S}")


def alice_return_distribution(sc, h, n_S, ell_max=None):
    """Photon counts Alice sees under hypothesis h for the vacuum/one-photon probe."""
    _check_n(n_S)
    return output_distribution(sc.alice_port(h), optimal_two_point(n_S), ell_max, sc.eps_tail)


def return_pair(sc, n_S):
    """(h=0, h=1) return distributions on a common truncation."""
    p1 = alice_return_distribution(sc, 1, n_S)
    p0 = alice_return_distribution(sc, 0, n_S, p1.ell_max)
    return p0, p1


def fock_exponent(sc, n_S):
    p0, p1 = return_pair(sc, n_S)
    return classical_chernoff(p0, p1)


def tmsv_covariance(sc, h, n_S):
    """Idler/return covariance (idler first) of a TMSV probe with signal mean n_S."""
    if n_S < 0:
        raise DomainError("n_S must be nonnegative")
    port = sc.alice_port(h)
    k = port.kappa
    idler = 2 * n_S + 1
    ret = 2 * (k * n_S + port.nu) + 1
    c = 2 * math.sqrt(k * n_S * (n_S + 1))
    z = np.diag([1.0, -1.0])
    v = np.block([[idler * np.eye(2), c * z], [c * z, ret * np.eye(2)]])
    return CovarianceMatrix(v)


def tmsv_exponent(sc, n_S):
    return gaussian_qcb(tmsv_covariance(sc, 0, n_S), tmsv_covariance(sc, 1, n_S))


def willie_cp_se(sc, n_S):
    """(tau_W n_S)^2 / ((1-tau_W) n_W (1 + (1-tau_W) n_W)) at the target-absent port."""
    return c_two_point(sc.willie_port(0), n_S)


def willie_c_tmsv(sc, n_S):
    return c_thermal_active(sc.willie_port(0), n_S)


def willie_sensing_coefficient(sc, active):
    """Willie's QRE coefficient maximized over the hypothesis.

    ``active`` is either a Fock-diagonal input or a float n_S standing for a
    thermal signal marginal of that mean (the TMSV case).
    """
    values = []
    for h in (0, 1):
        port = sc.willie_port(h)
        if isinstance(active, FockDiagonalInput):
            values.append(cp_direct(port, active))
        else:
            values.append(c_thermal_active(port, float(active)))
    return max(values)


def capability_fock_sensing(sc, n_S):
    """sqrt(2 delta / C_P,se) * Phi_cov,opt."""
    if not (0.0 < n_S <= 1.0):
        raise DomainError(f"n_S must lie in (0, 1], got {n_S}")
    return math.sqrt(2 * sc.delta / willie_cp_se(sc, n_S)) * fock_exponent(sc, n_S).exponent


def capability_tmsv(sc, n_S):
    """sqrt(2 delta / C_TMSV) * Phi_TMSV; zero at n_S = 0."""
    if n_S == 0:
        return 0.0
    c = willie_c_tmsv(sc, n_S)
    return math.sqrt(2 * sc.delta / c) * tmsv_exponent(sc, n_S).exponent


def capability_difference(sc, n_S):
    return capability_fock_sensing(sc, n_S) - capability_or_zero(capability_tmsv, sc, n_S)


def sensing_crossover(sc, sweep=None):
    """First n_S where the Fock-diagonal probe matches or beats sparse TMSV."""
    return first_crossover(lambda n: capability_difference(sc, n), crossover_grid(sweep))
