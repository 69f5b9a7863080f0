"""Willie-side QRE of sparse signaling and its quadratic coefficient.

With activity probability alpha, Willie's per-mode state is the mixture
(1 - alpha) lambda + alpha p of the innocent thermal distribution lambda and
the active output p.  Both are diagonal in the Fock basis, so the QRE is a
classical KL divergence whose second-order coefficient is the chi-square
divergence C_P = sum (p - lambda)^2 / lambda.  Two independent routes to
C_P are provided: direct summation over output photon numbers
(:func:`cp_direct`) and the Meixner-diagonalized form in terms of input
factorial moments (:func:`cp_meixner`).
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBackgroundError, DivergenceError, DomainError, NumericalError
from .kernel import ChannelPort, FockDiagonalInput, thermal_pmf, transition_matrix, truncation_level
from .orthopoly import binomial_moments, check_q

TAIL_TOL = 1e-13
_MAX_ELL = 20000


@dataclass(frozen=True)
class SparseInput:
    """Active input sent with probability alpha, vacuum otherwise."""

    active: FockDiagonalInput
    alpha: float

    def __post_init__(self):
        # alpha = 1 is allowed so the unexpanded KL can be checked on a pure active state
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")

    @property
    def n_bar_S(self):
        return self.active.mean()


@dataclass(frozen=True)
class CoefficientParams:
    q: float
    theta: float

    def __post_init__(self):
        check_q(self.q)
        if self.theta < 0:
            raise DomainError("theta must be nonnegative")

    @classmethod
    def from_port(cls, port):
        if port.nu <= 0:
            raise DegenerateBackgroundError("Willie's port has no thermal background")
        return cls(port.q, port.theta)


def _require_background(port):
    if port.nu <= 0:
        raise DegenerateBackgroundError(
            "nu = 0 at Willie's port: the innocent state is vacuum and C_P is infinite"
        )


def _matched_outputs(port, active):
    """Innocent and active output vectors on a common truncation.

    The truncation grows until the envelope sum_{l > L} (p^2/lambda + lambda),
    bounded by a geometric series with the observed term ratio, is below
    TAIL_TOL.  Beyond the last sign change of p/lambda - 1 that envelope is
    a polynomial times q**l, so its term ratio decreases monotonically.
    """
    j = active.support
    ell_max = truncation_level(port.nu, 1e-16, margin=2 * j + 8)
    while ell_max <= _MAX_ELL:
        lam = thermal_pmf(port.nu, ell_max).probs
        p = active.rho @ transition_matrix(port, j, ell_max)
        env = p * p / lam + lam
        ratios = env[-6:][1:] / env[-6:][:-1]
        rho = ratios[-1]
        if np.all(np.diff(ratios) <= 1e-12) and rho < 1.0:
            if env[-1] * rho / (1.0 - rho) < TAIL_TOL:
                return lam, p
        ell_max = int(ell_max * 1.5) + 10
    raise NumericalError("chi-square series did not reach its tail tolerance")


def cp_direct(port, active):
    """C_P by direct summation of (p_l - lambda_l)^2 / lambda_l."""
    _require_background(port)
    if port.kappa == 0 or not np.any(active.rho[1:]):
        return 0.0
    lam, p = _matched_outputs(port, active)
    return math.fsum((p - lam) ** 2 / lam)


def meixner_weights(params, y_max):
    """Weights q^-y theta^(2y), y = 1..y_max."""
    y = np.arange(1, y_max + 1)
    return (params.theta**2 / params.q) ** y


def cp_from_moments(params, mu):
    """C_P = sum_y q^-y theta^(2y) mu_y^2 for factorial moments mu (last axis y = 1..)."""
    mu = np.asarray(mu, dtype=float)
    return (mu * mu) @ meixner_weights(params, mu.shape[-1])


def cp_meixner(params, active):
    """C_P through the orthogonal (Meixner) representation."""
    j = active.support
    if j == 0:
        return 0.0
    mu = binomial_moments(active.rho, j)
    return math.fsum(mu * mu * meixner_weights(params, j))


def _entropy_term(x):
    """(1+x) log(1+x) - x, with the power series sum_k (-x)^k / (k (k-1)) near zero."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 0.1
    xs = x[small]
    series = np.zeros_like(xs)
    for k in range(24, 1, -1):
        series = series * -xs + 1.0 / (k * (k - 1))
    out[small] = series * xs * xs
    big = x[~small]
    one_plus = 1.0 + big
    safe = np.where(one_plus > 0, big, 0.0)
    out[~small] = np.where(one_plus > 0, one_plus * np.log1p(safe), 0.0) - big
    return out


def sparse_kl(port, sparse):
    """Unexpanded KL divergence between Willie's sparse mixture and the innocent state.

    Summed as sum lambda [(1+x) log(1+x) - x] with x = alpha (p/lambda - 1);
    the -x terms add up to zero and keep the small-alpha regime free of
    cancellation.
    """
    _require_background(port)
    if port.kappa == 0 or not np.any(sparse.active.rho[1:]):
        return 0.0
    lam, p = _matched_outputs(port, sparse.active)
    x = sparse.alpha * (p - lam) / lam
    return max(math.fsum(lam * _entropy_term(x)), 0.0)


def qre_third_order(port, active):
    """sum_l lambda_l r_l^3 with r = p/lambda - 1; the alpha^3 coefficient is minus this over 6."""
    _require_background(port)
    lam, p = _matched_outputs(port, active)
    r = (p - lam) / lam
    return math.fsum(lam * r**3)


def c_thermal_active(port, n_S):
    """Chi-square coefficient for an active output that is thermal with mean kappa n_S + nu.

    (kappa n_S)^2 / (nu (1 + nu) - (kappa n_S)^2)
    """
    if n_S < 0:
        raise DomainError("n_S must be nonnegative")
    d2 = (port.kappa * n_S) ** 2
    if d2 == 0:
        return 0.0
    _require_background(port)
    denom = port.nu * (1.0 + port.nu) - d2
    if denom <= 0:
        raise DivergenceError(
            f"(kappa n_S)^2 = {d2:.6g} >= nu (1 + nu) = {port.nu * (1 + port.nu):.6g}: "
            "the chi-square series diverges"
        )
    return d2 / denom


def c_two_point(port, n_S):
    """(kappa n_S)^2 / (nu (1 + nu)), the coefficient of the vacuum/one-photon mixture."""
    _require_background(port)
    return (port.kappa * n_S) ** 2 / (port.nu * (1.0 + port.nu))


def c_diffuse_sensing(tau_W, n_W):
    """Diffuse TMSV coefficient tau_W^2 / ((1-tau_W) n_W (1 + (1-tau_W) n_W))."""
    if not (0.0 < tau_W < 1.0):
        raise DomainError(f"tau_W must lie in (0, 1), got {tau_W}")
    if not n_W > 0:
        raise DomainError(f"n_W must be positive, got {n_W}")
    nu = (1.0 - tau_W) * n_W
    return tau_W**2 / (nu * (1.0 + nu))


def pinsker_budget(delta):
    """QRE budget 8 delta^2 that guarantees Willie's error probability >= 1/2 - delta."""
    if not (0.0 <= delta < 0.5):
        raise DomainError(f"delta must lie in [0, 1/2), got {delta}")
    return 8.0 * delta**2


def willie_comm_port(eta, n_bar_B):
    """Willie's port for communication: transmissivity 1 - eta, background eta n_B."""
    return ChannelPort(1.0 - eta, eta * n_bar_B)
