"""Sweep grids over the active mean photon number and crossover location."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import ConfigurationError

MAX_POINTS = 100_000
COARSE_POINTS = 200
CROSSOVER_XTOL = 1e-4


@dataclass(frozen=True)
class SweepSpec:
    n_S_min: float = 0.005
    n_S_max: float = 1.0
    points: int = COARSE_POINTS
    scale: str = "linear"

    def __post_init__(self):
        if not (0.0 < self.n_S_min < self.n_S_max <= 1.0):
            raise ConfigurationError(
                f"need 0 < n_S_min < n_S_max <= 1, got {self.n_S_min}, {self.n_S_max}"
            )
        if not (2 <= self.points <= MAX_POINTS):
            raise ConfigurationError(f"points must lie in [2, {MAX_POINTS}], got {self.points}")
        if self.scale not in ("linear", "log"):
            raise ConfigurationError(f"scale must be 'linear' or 'log', got {self.scale!r}")

    def grid(self):
        if self.scale == "log":
            return np.geomspace(self.n_S_min, self.n_S_max, self.points)
        return np.linspace(self.n_S_min, self.n_S_max, self.points)


def first_crossover(diff, grid):
    """Smallest n_S where ``diff(n_S) >= 0``, refined by bisection.

    The grid is scanned in order; the first sign change from negative to
    nonnegative is bisected to CROSSOVER_XTOL.  If ``diff`` is already
    nonnegative at the first node, that node is returned.  Returns None when
    ``diff`` stays negative on the whole grid.
    """
    grid = np.asarray(grid, dtype=float)
    prev_x, prev_v = None, None
    for x in grid:
        v = diff(x)
        if v >= 0:
            if prev_x is None or v == 0:
                return float(x)
            return float(bisect(diff, prev_x, x, xtol=CROSSOVER_XTOL))
        prev_x, prev_v = x, v
    return None


def capability_or_zero(fn, *args):
    """``fn(*args)`` with a diverging chi-square coefficient read as zero capability."""
    from .errors import DivergenceError

    try:
        return fn(*args)
    except DivergenceError:
        return 0.0


def crossover_grid(sweep=None):
    return (sweep or SweepSpec()).grid()


def nats_to_bits(x):
    return x / math.log(2.0)
