import math

import numpy as np
import pytest

from covsig.errors import ConfigurationError
from covsig.sweep import MAX_POINTS, SweepSpec, first_crossover, nats_to_bits


def test_linear_and_log_grids():
    g = SweepSpec(0.1, 1.0, 10).grid()
    assert g[0] == 0.1 and g[-1] == 1.0 and len(g) == 10
    lg = SweepSpec(0.001, 1.0, 4, "log").grid()
    assert np.allclose(lg, [0.001, 0.01, 0.1, 1.0])


@pytest.mark.parametrize("args", [(0.5, 0.5, 10), (0.0, 1.0, 10), (0.1, 1.5, 10), (0.1, 1.0, 1),
                                  (0.1, 1.0, MAX_POINTS + 1), (0.1, 1.0, 10, "cubic")])
def test_sweep_validation(args):
    with pytest.raises(ConfigurationError):
        SweepSpec(*args)


def test_first_crossover_bisects_sign_change():
    x = first_crossover(lambda n: n - 0.3137, np.linspace(0.01, 1, 20))
    assert x == pytest.approx(0.3137, abs=1e-4)


def test_first_crossover_boundary_cases():
    grid = np.linspace(0.1, 1, 10)
    assert first_crossover(lambda n: 1.0, grid) == pytest.approx(0.1)
    assert first_crossover(lambda n: -1.0, grid) is None


def test_first_crossover_takes_earliest():
    f = lambda n: math.sin(20 * n)  # sign changes near pi/20 multiples; starts positive
    grid = np.linspace(0.2, 1.0, 50)
    x = first_crossover(f, grid)
    assert x == pytest.approx(2 * math.pi / 20, abs=1e-4)


def test_bits_conversion():
    assert nats_to_bits(math.log(2)) == pytest.approx(1.0, rel=1e-15)
