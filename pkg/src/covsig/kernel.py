"""Photon-number transition kernel of a lossy thermal-noise bosonic port.

A port is described by two numbers: the transmissivity ``kappa`` seen from
Alice's input and the thermal mean photon number ``nu`` present at the port
when Alice sends vacuum.  A Fock state |i> leaving such a port has mean
photon number ``kappa * i + nu``.  All four ports used in the package
(Willie and Bob for communication, Alice's return and Willie for sensing)
are instances of this one object.

Production values are computed by splitting the port into a pure-loss
stage with transmissivity ``kappa / (1 + nu)`` followed by a
quantum-limited amplifier of gain ``1 + nu``.  Both stages have
nonnegative Fock transition probabilities (binomial and negative binomial),
so the composition is free of the cancellation that plagues the
alternating finite-sum form.  The alternating form is kept in exact
rational arithmetic (:func:`fock_transition_exact`) and the Laguerre
integral form as a quadrature oracle (:func:`fock_transition_quadrature`).
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial.laguerre import laggauss
from scipy.stats import binom, nbinom

from .errors import DomainError, NumericalInstabilityError, QuadratureError
from .orthopoly import check_degree, laguerre_table

EPS_TAIL = 1e-14
CLAMP_TOL = 1e-14
NORM_TOL = 1e-12


@dataclass(frozen=True)
class ChannelPort:
    kappa: float
    nu: float

    def __post_init__(self):
        if not (0.0 <= self.kappa <= 1.0) or not math.isfinite(self.kappa):
            raise DomainError(f"port transmissivity must lie in [0, 1], got {self.kappa}")
        if not (self.nu >= 0.0) or not math.isfinite(self.nu):
            raise DomainError(f"port thermal mean must be >= 0, got {self.nu}")

    @property
    def q(self):
        """Geometric ratio nu / (1 + nu) of the innocent output."""
        return self.nu / (1.0 + self.nu)

    @property
    def theta(self):
        """kappa / (1 + nu): loss-stage transmissivity of the decomposition."""
        return self.kappa / (1.0 + self.nu)


def _clean_probs(probs):
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or probs.size == 0:
        raise DomainError("a photon distribution needs a nonempty 1-d vector")
    if np.any(probs < -CLAMP_TOL):
        raise NumericalInstabilityError(f"negative probability {probs.min():.3e}")
    return np.clip(probs, 0.0, None)


@dataclass(frozen=True, eq=False)
class PhotonDistribution:
    """Photon-number probabilities on 0..ell_max plus the mass beyond."""

    probs: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        probs = _clean_probs(self.probs)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        if self.tail_mass < 0:
            raise DomainError("tail mass must be nonnegative")
        total = math.fsum(probs) + self.tail_mass
        if abs(total - 1.0) > NORM_TOL:
            raise DomainError(f"distribution sums to {total!r}, not 1")

    @property
    def ell_max(self):
        return self.probs.size - 1

    def __len__(self):
        return self.probs.size

    def mean(self):
        return math.fsum(np.arange(self.probs.size) * self.probs)


@dataclass(frozen=True, eq=False)
class FockDiagonalInput:
    """Normalized photon-number distribution with finite support 0..j."""

    rho: np.ndarray

    def __post_init__(self):
        rho = _clean_probs(self.rho)
        if abs(math.fsum(rho) - 1.0) > NORM_TOL:
            raise DomainError(f"input distribution sums to {math.fsum(rho)!r}, not 1")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def fock(cls, i):
        rho = np.zeros(i + 1)
        rho[i] = 1.0
        return cls(rho)

    @classmethod
    def vacuum(cls):
        return cls(np.ones(1))

    @property
    def support(self):
        """Largest photon number j carried by the vector."""
        return self.rho.size - 1

    def mean(self):
        return math.fsum(np.arange(self.rho.size) * self.rho)


def truncation_level(nu, eps_tail=EPS_TAIL, margin=0):
    """Smallest ell_max with thermal tail (nu/(1+nu))**(ell_max+1) < eps_tail, plus margin."""
    if nu < 0:
        raise DomainError(f"thermal mean must be >= 0, got {nu}")
    if not (0.0 < eps_tail < 1.0):
        raise DomainError("eps_tail must lie in (0, 1)")
    if nu == 0:
        return margin
    r = nu / (1.0 + nu)
    level = max(0, int(math.floor(math.log(eps_tail) / math.log(r))) - 1)
    while r ** (level + 1) >= eps_tail:
        level += 1
    while level > 0 and r**level < eps_tail:
        level -= 1
    return level + margin


def thermal_pmf(nu, ell_max):
    """Thermal photon-number distribution nu**l / (1+nu)**(l+1), l = 0..ell_max."""
    if nu < 0:
        raise DomainError(f"thermal mean must be >= 0, got {nu}")
    ell = np.arange(ell_max + 1)
    if nu == 0:
        probs = (ell == 0).astype(float)
        return PhotonDistribution(probs, 0.0)
    r = nu / (1.0 + nu)
    probs = np.power(r, ell) / (1.0 + nu)
    return PhotonDistribution(probs, r ** (ell_max + 1))


def transition_matrix(port, i_max, ell_max):
    """Matrix P[i, l] = p(l | i) for i <= i_max, l <= ell_max."""
    check_degree(i_max)
    theta = port.theta
    g = 1.0 / (1.0 + port.nu)
    ell = np.arange(ell_max + 1)
    out = np.zeros((i_max + 1, ell_max + 1))
    for k in range(min(i_max, ell_max) + 1):
        # amplifier stage: k photons in, l out
        amp = nbinom.pmf(ell - k, k + 1, g)
        loss = binom.pmf(k, np.arange(i_max + 1), theta)
        out += np.outer(loss, amp)
    if np.any(out < -CLAMP_TOL) or np.any(out > 1 + 1e-10):
        raise NumericalInstabilityError("transition probability outside [0, 1]")
    return np.clip(out, 0.0, 1.0)


def fock_transition(port, i, ell):
    """p(ell | i): probability that Fock state |i> leaves the port with ell photons."""
    check_degree(i)
    check_degree(ell)
    return float(transition_matrix(port, i, ell)[i, ell])


def fock_transition_exact(port, i, ell):
    """Alternating double-sum form of p(ell | i), evaluated in exact rationals.

    sum_t sum_u (-1)^(t+u) C(i,t) C(ell,u) kappa^t (t+u)!/(t! u!) (1+nu)^-(t+u+1)
    """
    return float(_exact_table(Fraction(port.kappa), Fraction(port.nu), i, ell)[i][ell])


def transition_matrix_exact(port, i_max, ell_max):
    table = _exact_table(Fraction(port.kappa), Fraction(port.nu), i_max, ell_max)
    return np.array([[float(v) for v in row] for row in table])


def _exact_table(kappa, nu, i_max, ell_max):
    check_degree(i_max)
    check_degree(ell_max)
    inv_a = 1 / (1 + nu)
    # inner[t][l] = sum_u (-1)^u C(l,u) C(t+u,u) a^-u
    inner = [
        [
            sum(
                (-1) ** u * math.comb(ell, u) * math.comb(t + u, u) * inv_a**u
                for u in range(ell + 1)
            )
            for ell in range(ell_max + 1)
        ]
        for t in range(i_max + 1)
    ]
    outer = [(-kappa) ** t * inv_a ** (t + 1) for t in range(i_max + 1)]
    return [
        [
            sum(math.comb(i, t) * outer[t] * inner[t][ell] for t in range(i + 1))
            for ell in range(ell_max + 1)
        ]
        for i in range(i_max + 1)
    ]


@lru_cache(maxsize=16)
def _gauss_laguerre(n):
    return laggauss(n)


def _quadrature_table(port, i_max, ell_max, n):
    y, w = _gauss_laguerre(n)
    a = 1.0 + port.nu
    out_l = laguerre_table(ell_max, y / a)
    in_l = laguerre_table(i_max, port.kappa * y / a)
    return (in_l * w) @ out_l.T / a


def quadrature_matrix(port, i_max, ell_max, tol=1e-10, max_nodes=512):
    """Laguerre-integral form of p(l | i), by Gauss-Laguerre node doubling.

    Integral of exp(-(1+nu) x) L_l(x) L_i(kappa x) over x >= 0.
    """
    n = max(16, i_max + ell_max + 2)
    prev = _quadrature_table(port, i_max, ell_max, n)
    while n < max_nodes:
        n *= 2
        cur = _quadrature_table(port, i_max, ell_max, n)
        if np.max(np.abs(cur - prev)) <= tol:
            return cur
        prev = cur
    raise QuadratureError(f"Gauss-Laguerre quadrature did not settle below {tol}")


def fock_transition_quadrature(port, i, ell):
    check_degree(i)
    check_degree(ell)
    return float(quadrature_matrix(port, i, ell)[i, ell])


def output_distribution(port, inp, ell_max=None, eps_tail=EPS_TAIL):
    """Photon-number distribution after sending a Fock-diagonal input through a port.

    With ``ell_max=None`` the truncation grows until the neglected mass
    drops below ``eps_tail``.
    """
    j = inp.support
    if ell_max is None:
        ell_max = truncation_level(port.nu, eps_tail, margin=j)
        while True:
            probs = inp.rho @ transition_matrix(port, j, ell_max)
            tail = 1.0 - math.fsum(probs)
            if tail < eps_tail:
                break
            ell_max = int(ell_max * 1.25) + 8
    else:
        probs = inp.rho @ transition_matrix(port, j, ell_max)
        tail = 1.0 - math.fsum(probs)
    return PhotonDistribution(probs, max(tail, 0.0))
