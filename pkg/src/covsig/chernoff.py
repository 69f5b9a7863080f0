"""Chernoff exponents: the s-search shared by the classical and Gaussian routes."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
S_TOL = 1e-6
# Q(s) is only evaluated on the open interval; both endpoints give Q = 1 for full-rank states
S_EDGE = 1e-9


@dataclass(frozen=True)
class ChernoffResult:
    exponent: float
    s_star: float
    disjoint: bool = False


def golden_min(f, lo=S_EDGE, hi=1.0 - S_EDGE, tol=S_TOL, grid=32):
    """Minimize ``f`` on [lo, hi] by golden-section search.

    ``f`` is expected to be convex (log Q(s) is).  A coarse grid scan runs
    alongside; if it beats the golden-section point, convexity was broken by
    round-off and the search restarts on the grid cell around the best node.
    """
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    s_best, f_best = (c, fc) if fc <= fd else (d, fd)

    nodes = np.linspace(lo, hi, grid + 1)
    vals = np.array([f(s) for s in nodes])
    k = int(np.argmin(vals))
    if vals[k] < f_best - 1e-15 * max(1.0, abs(f_best)):
        left, right = nodes[max(k - 1, 0)], nodes[min(k + 1, grid)]
        if right - left > tol:
            s2, f2 = golden_min(f, left, right, tol, grid=8)
        else:
            s2, f2 = nodes[k], vals[k]
        if f2 < vals[k]:
            return s2, f2
        return nodes[k], vals[k]
    return s_best, f_best


def classical_q(p, r, s):
    """Q(s) - 1 for truncated distributions, computed as sum r expm1(s log(p/r)) - tail_r."""
    both = (p.probs > 0) & (r.probs > 0)
    pp, rr = p.probs[both], r.probs[both]
    only_r = math.fsum(r.probs[~both])
    return math.fsum(rr * np.expm1(s * np.log(pp / rr))) - only_r - r.tail_mass


def classical_chernoff(p, r):
    """Chernoff exponent -log min_s sum_l p_l^s r_l^(1-s) of two photon-count distributions."""
    if len(p) != len(r):
        raise ShapeError(f"distributions have lengths {len(p)} and {len(r)}")
    if not np.any((p.probs > 0) & (r.probs > 0)):
        return ChernoffResult(math.inf, 0.5, disjoint=True)

    def log_q(s):
        qm1 = classical_q(p, r, s)
        if qm1 <= -1.0:
            raise DomainError("Q(s) vanished on the interior")
        return math.log1p(qm1)

    s_star, val = golden_min(log_q)
    return ChernoffResult(max(-val, 0.0), s_star)
