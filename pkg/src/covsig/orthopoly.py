"""Laguerre and Meixner polynomials, binomial coefficients.

Everything here is a pure function of its arguments.
"""
import math

import numpy as np

from .errors import ConfigurationError, DomainError

DEGREE_CAP = 512

# math.comb is exact; above this size we switch to log-gamma floats
_EXACT_BINOMIAL_LIMIT = 1000


def check_degree(n, cap=DEGREE_CAP):
    if n < 0:
        raise DomainError(f"polynomial degree must be nonnegative, got {n}")
    if n > cap:
        raise ConfigurationError(f"degree {n} exceeds the configured cap {cap}")


def laguerre(n, x):
    """Laguerre polynomial L_n evaluated at ``x`` (scalar or array).

    Uses the three-term recurrence
    (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}.
    """
    check_degree(n)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("laguerre argument must be finite")
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def binomial(n, k):
    """C(n, k) as a float, zero when k > n."""
    if n < 0 or k < 0:
        raise DomainError("binomial arguments must be nonnegative")
    if k > n:
        return 0.0
    if n <= _EXACT_BINOMIAL_LIMIT:
        return float(math.comb(n, k))
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


def check_q(q):
    if not (0.0 < q < 1.0):
        raise DomainError(f"geometric weight q must lie in (0, 1), got {q}")


def meixner(y, ell, q):
    """Meixner polynomial M_y(ell; q) with beta = 1.

    Evaluated as the terminating hypergeometric sum
    sum_k C(y, k) C(ell, k) (1 - 1/q)^k, which is 2F1(-y, -ell; 1; 1 - 1/q).
    """
    check_degree(y)
    if ell < 0:
        raise DomainError("Meixner argument ell must be nonnegative")
    check_q(q)
    z = 1.0 - 1.0 / q
    terms = [binomial(y, k) * binomial(ell, k) * z**k for k in range(min(y, ell) + 1)]
    return math.fsum(terms)


def laguerre_table(n_max, x):
    """Rows L_0(x) .. L_{n_max}(x) for an array ``x``, shape (n_max+1, len(x))."""
    check_degree(n_max)
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 - x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 - x) * out[k] - k * out[k - 1]) / (k + 1)
    return out


def binomial_moments(rho, y_max):
    """mu_y = sum_i rho_i C(i, y) for y = 1..y_max.

    ``rho`` may carry leading batch axes; the photon number is the last axis.
    """
    rho = np.asarray(rho, dtype=float)
    i = np.arange(rho.shape[-1])
    mat = np.array([[binomial(int(k), y) for y in range(1, y_max + 1)] for k in i])
    if mat.size == 0:
        return np.zeros(rho.shape[:-1] + (y_max,))
    return rho @ mat
