"""Covert communication capability: Fock-diagonal sparse scheme vs Gaussian coherent states."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import kl_div, xlogy

from .errors import DegenerateBackgroundError, DomainError, ShapeError
from .kernel import EPS_TAIL, ChannelPort, PhotonDistribution, output_distribution, thermal_pmf
from .optimizer import optimal_two_point
from .qre import c_thermal_active, cp_direct
from .sweep import capability_or_zero, crossover_grid, first_crossover


@dataclass(frozen=True)
class CommScenario:
    eta: float
    n_bar_B: float
    delta: float = 0.05
    eps_tail: float = EPS_TAIL

    def __post_init__(self):
        if not (0.0 < self.eps_tail < 1e-3):
            raise DomainError(f"eps_tail must lie in (0, 1e-3), got {self.eps_tail}")
        if not (0.0 < self.eta < 1.0):
            raise DomainError(f"eta must lie in (0, 1), got {self.eta}")
        if not self.n_bar_B > 0:
            raise DomainError(f"n_bar_B must be positive, got {self.n_bar_B}")
        if not self.delta > 0:
            raise DomainError(f"delta must be positive, got {self.delta}")

    @property
    def willie_port(self):
        return ChannelPort(1.0 - self.eta, self.eta * self.n_bar_B)

    @property
    def bob_port(self):
        return ChannelPort(self.eta, (1.0 - self.eta) * self.n_bar_B)


@dataclass(frozen=True)
class BinaryChannel:
    """Bob's photon-count distributions for the OFF (p0) and ON (p1) symbols."""

    p0: PhotonDistribution
    p1: PhotonDistribution

    def __post_init__(self):
        if len(self.p0) != len(self.p1):
            raise ShapeError("OFF and ON distributions must share a truncation")


def _check_low_brightness(n_S):
    if not (0.0 <= n_S <= 1.0):
        raise DomainError(f"n_S must lie in [0, 1], got {n_S}")


def bob_channel(s, n_S):
    _check_low_brightness(n_S)
    p1 = output_distribution(s.bob_port, optimal_two_point(n_S), eps_tail=s.eps_tail)
    p0 = thermal_pmf(s.bob_port.nu, p1.ell_max)
    return BinaryChannel(p0, p1)


def kl(p, q):
    """KL divergence in nats.

    Summed as sum (p log(p/q) - p + q), whose terms are all nonnegative,
    then corrected by the difference of the truncated tails.
    """
    if len(p) != len(q):
        raise ShapeError(f"distributions have lengths {len(p)} and {len(q)}")
    if np.any((p.probs > 0) & (q.probs == 0)):
        raise DomainError("p is not absolutely continuous with respect to q")
    return max(math.fsum(kl_div(p.probs, q.probs)) - p.tail_mass + q.tail_mass, 0.0)


def mutual_information(ch, alpha):
    """I(X;Y) in nats for P(X=1) = alpha over the binary asymmetric channel."""
    if not (0.0 <= alpha <= 1.0):
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    if alpha in (0.0, 1.0):
        return 0.0
    mix = PhotonDistribution(
        (1 - alpha) * ch.p0.probs + alpha * ch.p1.probs,
        (1 - alpha) * ch.p0.tail_mass + alpha * ch.p1.tail_mass,
    )
    return (1 - alpha) * kl(ch.p0, mix) + alpha * kl(ch.p1, mix)


def willie_cp(s, n_S):
    """C_P of the vacuum/one-photon active state at Willie's port."""
    return cp_direct(s.willie_port, optimal_two_point(n_S))


def capability_fock(s, n_S):
    """sqrt(2 delta / C_P) * D(p1 || p0), nats per sqrt(n)."""
    if not (0.0 < n_S <= 1.0):
        raise DomainError(f"n_S must lie in (0, 1], got {n_S}")
    cp = willie_cp(s, n_S)
    if cp <= 0:
        raise DegenerateBackgroundError("C_P vanishes: nothing reaches Willie")
    ch = bob_channel(s, n_S)
    return math.sqrt(2 * s.delta / cp) * kl(ch.p1, ch.p0)


def _g(x):
    return xlogy(x + 1.0, x + 1.0) - xlogy(x, x)


def holevo_chi(s, n_S):
    """g((1-eta) n_B + eta n_S) - g((1-eta) n_B), g(x) = (x+1) log(x+1) - x log x."""
    if n_S < 0:
        raise DomainError("n_S must be nonnegative")
    nu = (1.0 - s.eta) * s.n_bar_B
    return float(_g(nu + s.eta * n_S) - _g(nu))


def willie_cg(s, n_S):
    return c_thermal_active(s.willie_port, n_S)


def capability_gaussian(s, n_S):
    """sqrt(2 delta / C_G) * chi_Hol for sparse Gaussian coherent-state modulation."""
    if not n_S > 0:
        raise DomainError(f"n_S must be positive, got {n_S}")
    return math.sqrt(2 * s.delta / willie_cg(s, n_S)) * holevo_chi(s, n_S)


def capability_difference(s, n_S):
    return capability_fock(s, n_S) - capability_or_zero(capability_gaussian, s, n_S)


def comm_crossover(s, sweep=None):
    """First n_S where the Fock-diagonal scheme matches or beats the Gaussian one."""
    return first_crossover(lambda n: capability_difference(s, n), crossover_grid(sweep))
