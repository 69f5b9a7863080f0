"""Detectability-minimizing active input and its brute-force check.

C_P is a positive combination of squared factorial moments mu_y.  The mean
constraint fixes mu_1, and every C(i, y) with y >= 2 is discrete convex in
i, so the mixture of the two Fock states bracketing the mean minimizes all
higher moments at once.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kernel import FockDiagonalInput
from .orthopoly import binomial, binomial_moments
from .qre import cp_from_moments, cp_meixner

JENSEN_RTOL = 1e-12


@dataclass(frozen=True)
class MeanConstraint:
    n_bar_S: float

    def __post_init__(self):
        if not (self.n_bar_S >= 0.0) or not math.isfinite(self.n_bar_S):
            raise DomainError(f"mean photon number must be >= 0, got {self.n_bar_S}")

    @property
    def kappa_floor(self):
        return int(math.floor(self.n_bar_S))

    @property
    def beta(self):
        return self.n_bar_S - self.kappa_floor


def optimal_two_point(c):
    """(1 - beta)|k><k| + beta|k+1><k+1| with k = floor(n_S); rho_{k+1} kept even when beta = 0."""
    if not isinstance(c, MeanConstraint):
        c = MeanConstraint(c)
    k, beta = c.kappa_floor, c.beta
    rho = np.zeros(k + 2)
    rho[k] = 1.0 - beta
    rho[k + 1] = beta
    return FockDiagonalInput(rho)


def factorial_moments(inp, y_max=None):
    """mu_1 .. mu_{y_max} with mu_y = E[C(I, y)]."""
    if y_max is None:
        y_max = inp.support
    if y_max == 0:
        return np.zeros(0)
    return binomial_moments(inp.rho, y_max)


def _simplex_points(c, support_max, step):
    """Grid points with rho_2..rho_J on multiples of step; rho_0, rho_1 solved from the constraints."""
    n = c.n_bar_S
    J = support_max
    units = int(round(1.0 / step))
    free = list(range(2, J + 1))
    if not free:
        # only rho_0, rho_1: the constraint set is a single point
        yield np.array([[1.0 - n, n]])
        return
    # outer coordinates enumerated in Python, the last two vectorized
    outer, inner = free[2:], free[:2]

    def rec(idx, used_mass, used_mean, fixed):
        if idx < 0:
            i2 = inner[0]
            room = n - used_mean + 1e-12
            a_vals = np.arange(min(units, int(room / (i2 * step))) + 1)
            if len(inner) > 1:
                b_vals = np.arange(min(units, int(room / (inner[1] * step))) + 1)
            else:
                b_vals = np.array([0])
            a2, b = np.meshgrid(a_vals, b_vals, indexing="ij")
            r2 = a2 * step
            rb = b * step
            mean = used_mean + i2 * r2 + (inner[1] * rb if len(inner) > 1 else 0.0)
            mass = used_mass + r2 + rb
            rho1 = n - mean
            rho0 = 1.0 - mass - rho1
            ok = (rho1 >= -1e-12) & (rho0 >= -1e-12)
            if not ok.any():
                return
            cnt = int(ok.sum())
            pts = np.zeros((cnt, J + 1))
            pts[:, 0] = np.clip(rho0[ok], 0.0, None)
            pts[:, 1] = np.clip(rho1[ok], 0.0, None)
            pts[:, i2] = r2[ok]
            if len(inner) > 1:
                pts[:, inner[1]] = rb[ok]
            for i, v in fixed.items():
                pts[:, i] = v
            yield pts
            return
        i = outer[idx]
        for a in range(units + 1):
            r = a * step
            if used_mean + i * r > n + 1e-12 or used_mass + r > 1.0 + 1e-12:
                break
            yield from rec(idx - 1, used_mass + r, used_mean + i * r, {**fixed, i: r})

    yield from rec(len(outer) - 1, 0.0, 0.0, {})


def brute_force_min(c, support_max, grid_step, params):
    """Exhaustive grid scan of the mean-constrained simplex over photon numbers 0..support_max.

    Returns the minimizing input and its C_P.  The coefficient is a convex
    quadratic in rho, so the scan certifies the global minimum up to the
    grid resolution.
    """
    if not isinstance(c, MeanConstraint):
        c = MeanConstraint(c)
    if support_max > 6:
        raise DomainError("support_max is limited to 6")
    if grid_step < 1e-3:
        raise DomainError("grid_step must be at least 1e-3")
    if c.n_bar_S > support_max:
        raise DomainError(f"mean {c.n_bar_S} is infeasible with support {support_max}")
    if support_max == 0:
        return FockDiagonalInput.vacuum(), 0.0
    best_val, best_rho = math.inf, None
    for pts in _simplex_points(c, support_max, grid_step):
        vals = cp_from_moments(params, binomial_moments(pts, support_max))
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_rho = float(vals[k]), pts[k]
    if best_rho is None:
        raise DomainError("no grid point satisfies the mean constraint")
    best = FockDiagonalInput(best_rho / best_rho.sum())
    return best, cp_meixner(params, best)


def jensen_gap(phi_degree, distribution):
    """E[C(I, y)] minus the two-point bound (1 - beta) C(k, y) + beta C(k+1, y)."""
    if phi_degree < 2:
        raise DomainError("discrete Jensen check needs degree >= 2")
    c = MeanConstraint(distribution.mean())
    k, beta = c.kappa_floor, c.beta
    lhs = math.fsum(
        distribution.rho[i] * binomial(i, phi_degree) for i in range(distribution.rho.size)
    )
    rhs = (1.0 - beta) * binomial(k, phi_degree) + beta * binomial(k + 1, phi_degree)
    return lhs - rhs, rhs


def discrete_jensen_check(phi_degree, distribution):
    """True when E[C(I, y)] >= (1 - beta) C(k, y) + beta C(k+1, y) up to round-off."""
    gap, rhs = jensen_gap(phi_degree, distribution)
    return gap >= -JENSEN_RTOL * max(1.0, abs(rhs))
