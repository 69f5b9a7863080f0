import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from covsig.errors import ConfigurationError, DomainError, NumericalInstabilityError
from covsig.kernel import (
    ChannelPort,
    FockDiagonalInput,
    PhotonDistribution,
    fock_transition,
    fock_transition_exact,
    fock_transition_quadrature,
    output_distribution,
    quadrature_matrix,
    thermal_pmf,
    transition_matrix,
    transition_matrix_exact,
    truncation_level,
)
from covsig.optimizer import optimal_two_point

# p(l | 1) for kappa = 0.4, nu = 0.6, l = 0..5; 50-digit mpmath evaluation of
# the loss-then-amplifier sum (script kept with the decision notes)
FOCK1_OUT = [0.46875, 0.2734375, 0.13916015625, 0.06591796875, 0.029869079589843750, 0.013132095336914062]


def test_thermal_pmf_vacuum():
    d = thermal_pmf(0.0, 5)
    assert np.array_equal(d.probs, [1, 0, 0, 0, 0, 0])
    assert d.tail_mass == 0


def test_thermal_pmf_unit_mean():
    d = thermal_pmf(1.0, 10)
    assert np.allclose(d.probs, 2.0 ** -(np.arange(11) + 1.0), rtol=1e-15)


def test_thermal_pmf_half():
    d = thermal_pmf(0.5, 3)
    assert np.allclose(d.probs, [2 / 3, 2 / 9, 2 / 27, 2 / 81])
    assert math.isclose(math.fsum(d.probs) + d.tail_mass, 1.0, rel_tol=1e-15)


def test_vacuum_row_is_thermal():
    port = ChannelPort(0.7, 1.2)
    ell = np.arange(9)
    assert np.allclose(transition_matrix(port, 0, 8)[0], 1.2**ell / 2.2 ** (ell + 1), rtol=1e-13)


def test_identity_port_keeps_fock_state():
    port = ChannelPort(1.0, 0.0)
    assert fock_transition(port, 1, 1) == 1.0
    assert fock_transition(port, 1, 0) == 0.0
    assert fock_transition_quadrature(port, 1, 1) == pytest.approx(1.0, abs=1e-12)


def test_two_photons_to_vacuum_matches_quadrature():
    port = ChannelPort(0.4, 0.6)
    # rational value 45/128
    assert fock_transition(port, 2, 0) == pytest.approx(45 / 128, abs=1e-14)
    assert fock_transition_quadrature(port, 2, 0) == pytest.approx(45 / 128, abs=1e-12)
    assert fock_transition_exact(port, 2, 0) == pytest.approx(45 / 128, abs=1e-15)


def test_quadrature_vacuum_entry():
    for nu in (0.3, 1.0, 2.5):
        assert fock_transition_quadrature(ChannelPort(0.5, nu), 0, 0) == pytest.approx(1 / (1 + nu), abs=1e-13)


def test_quadrature_vs_production_single_entry():
    port = ChannelPort(0.3, 2.0)
    assert abs(fock_transition_quadrature(port, 3, 4) - fock_transition(port, 3, 4)) < 1e-10
    assert fock_transition(port, 3, 4) == pytest.approx(0.082699588477366254625, abs=1e-15)


def test_exact_rational_table_small_grid():
    # rational arithmetic is exact, so production must agree to round-off
    for port in (ChannelPort(0.25, 0.5), ChannelPort(0.75, 2.0), ChannelPort(0.5, 1.0)):
        exact = transition_matrix_exact(port, 12, 12)
        assert np.max(np.abs(transition_matrix(port, 12, 12) - exact)) < 1e-14


def test_vacuum_input_gives_thermal_output():
    port = ChannelPort(0.4, 0.6)
    out = output_distribution(port, FockDiagonalInput.vacuum())
    ref = thermal_pmf(0.6, out.ell_max)
    assert np.allclose(out.probs, ref.probs, atol=1e-16)


def test_two_point_mean_map():
    out = output_distribution(ChannelPort(0.4, 0.6), optimal_two_point(0.5))
    assert out.mean() == pytest.approx(0.8, abs=1e-12)
    assert out.tail_mass < 1e-14


def test_single_photon_output_vector():
    out = output_distribution(ChannelPort(0.4, 0.6), FockDiagonalInput.fock(1))
    assert np.allclose(out.probs[:6], FOCK1_OUT, rtol=1e-14)


def test_truncation_levels():
    assert truncation_level(0.0, 1e-14) == 0
    assert truncation_level(0.0, 1e-14, margin=3) == 3
    assert truncation_level(1.0, 1e-14) == 46
    assert truncation_level(1.0, 1e-14, margin=5) == 51


def test_truncation_level_by_tail_summation():
    nu = 2.5
    level = truncation_level(nu, 1e-14)
    ell = np.arange(4000)
    pmf = (nu / (1 + nu)) ** ell / (1 + nu)
    tails = pmf[::-1].cumsum()[::-1]  # tails[k] = sum_{l >= k}
    assert tails[level + 1] < 1e-14
    assert tails[level] >= 1e-14


def test_photon_distribution_validation():
    with pytest.raises(DomainError):
        PhotonDistribution(np.array([0.5, 0.4]))
    with pytest.raises(NumericalInstabilityError):
        PhotonDistribution(np.array([1.1, -0.1]))
    d = PhotonDistribution(np.array([1.0 + 5e-15, -5e-15]))
    assert d.probs[1] == 0.0


def test_port_validation():
    with pytest.raises(DomainError):
        ChannelPort(1.2, 0.5)
    with pytest.raises(DomainError):
        ChannelPort(0.5, -0.1)
    with pytest.raises(DomainError):
        ChannelPort(float("nan"), 0.5)


def test_degree_cap():
    with pytest.raises(ConfigurationError):
        fock_transition(ChannelPort(0.5, 0.5), 600, 0)


ports = st.builds(
    ChannelPort,
    st.floats(0.0, 1.0),
    st.floats(0.01, 3.0),
)


@settings(max_examples=40, deadline=None)
@given(ports, st.integers(0, 15))
def test_rows_are_stochastic_with_linear_mean(port, i):
    ell_max = truncation_level(port.nu, 1e-17, margin=4 * i + 40)
    row = transition_matrix(port, i, ell_max)[i]
    assert abs(math.fsum(row) - 1) < 1e-10
    assert abs(math.fsum(np.arange(ell_max + 1) * row) - (port.kappa * i + port.nu)) < 1e-9


@settings(max_examples=25, deadline=None)
@given(ports, st.integers(0, 10), st.integers(0, 10))
def test_three_representations_agree(port, i, ell):
    fast = fock_transition(port, i, ell)
    assert abs(fast - fock_transition_quadrature(port, i, ell)) < 1e-10
    assert abs(fast - fock_transition_exact(port, i, ell)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.1, 2.0))
def test_ports_compose_as_expected(k1, k2, nu):
    # two lossy stages in series: the second port sees the first's output
    first = ChannelPort(k1, 0.0)
    second = ChannelPort(k2, nu)
    composed = ChannelPort(k1 * k2, nu)
    m = truncation_level(nu, 1e-16, margin=30)
    lhs = transition_matrix(first, 6, m) @ transition_matrix(second, m, m)
    assert np.allclose(lhs, transition_matrix(composed, 6, m), atol=1e-13)
