import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import eigh

from covsig.chernoff import classical_chernoff
from covsig.errors import DomainError, InvalidStateError
from covsig.gaussian import (
    CovarianceMatrix,
    gaussian_q,
    gaussian_qcb,
    symplectic_eigenvalues,
    williamson_apply,
)
from covsig.kernel import thermal_pmf, truncation_level


def tmsv(n, kappa=1.0, nu=0.0):
    """Idler/signal covariance after the signal crosses a (kappa, nu) port."""
    c = 2 * math.sqrt(kappa * n * (n + 1))
    z = np.diag([1.0, -1.0])
    a = (2 * n + 1) * np.eye(2)
    b = (2 * (kappa * n + nu) + 1) * np.eye(2)
    return CovarianceMatrix(np.block([[a, c * z], [c * z, b]]))


def test_symplectic_spectra():
    assert np.allclose(symplectic_eigenvalues(CovarianceMatrix(np.eye(2))), [1.0])
    assert np.allclose(symplectic_eigenvalues(CovarianceMatrix(np.eye(4))), [1.0, 1.0])
    assert np.allclose(symplectic_eigenvalues(CovarianceMatrix.thermal(0.5, 2.0)), [2.0, 5.0])
    assert np.allclose(symplectic_eigenvalues(tmsv(0.7)), [1.0, 1.0], atol=1e-9)


def test_general_spectrum_path_matches_two_mode_formula():
    v = tmsv(0.4, 0.3, 0.2)
    three = v.direct_sum(CovarianceMatrix.thermal(1.5))
    assert np.allclose(symplectic_eigenvalues(three), np.sort(np.r_[symplectic_eigenvalues(v), 4.0]))


def test_williamson_identity_function():
    v = tmsv(0.4, 0.3, 0.2)
    out, spec = williamson_apply(v, lambda x: x)
    assert np.allclose(out, v.entries, atol=1e-12)


def test_unphysical_covariance_rejected():
    with pytest.raises(InvalidStateError):
        CovarianceMatrix(0.5 * np.eye(2))
    with pytest.raises(InvalidStateError):
        CovarianceMatrix(np.array([[1.0, 0.3], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        CovarianceMatrix(np.eye(3))


def test_equal_states_have_zero_exponent():
    v = tmsv(0.3, 0.4, 0.5)
    assert gaussian_qcb(v, v).exponent == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n,m", [(1.0, 2.0), (0.5, 2.0), (0.1, 0.3)])
def test_commuting_thermal_states(n, m):
    ell = truncation_level(max(n, m), 1e-18)
    classical = classical_chernoff(thermal_pmf(n, ell), thermal_pmf(m, ell)).exponent
    assert gaussian_qcb(CovarianceMatrix.thermal(n), CovarianceMatrix.thermal(m)).exponent == pytest.approx(classical, abs=1e-8)


def test_pure_idler_factorizes():
    single = gaussian_qcb(CovarianceMatrix.thermal(1.0), CovarianceMatrix.thermal(2.0)).exponent
    two = gaussian_qcb(CovarianceMatrix.thermal(0.0, 1.0), CovarianceMatrix.thermal(0.0, 2.0)).exponent
    assert two == pytest.approx(single, abs=1e-10)


def test_q_domain():
    v = CovarianceMatrix.thermal(1.0)
    with pytest.raises(DomainError):
        gaussian_q(v, v, 0.0)
    with pytest.raises(DomainError):
        gaussian_q(v, CovarianceMatrix.thermal(1.0, 1.0), 0.5)


# ---- dense Fock-space cross-check -------------------------------------------

def _loss_kraus(theta, dim):
    ops = []
    for k in range(dim):
        a = np.zeros((dim, dim))
        for n in range(k, dim):
            a[n - k, n] = math.sqrt(math.comb(n, k) * theta ** (n - k) * (1 - theta) ** k)
        ops.append(a)
    return ops


def _amp_kraus(gain, dim):
    ops = []
    for k in range(dim):
        b = np.zeros((dim, dim))
        for n in range(dim - k):
            b[n + k, n] = math.sqrt(math.comb(n + k, n) * gain ** -(n + 1) * (1 - 1 / gain) ** k)
        ops.append(b)
    return ops


def _fock_return_state(n_S, kappa, nu, dim):
    """Idler (x) return density matrix of a TMSV whose signal crosses a (kappa, nu) port."""
    c = np.sqrt((n_S / (1 + n_S)) ** np.arange(dim) / (1 + n_S))
    psi = np.zeros((dim, dim))
    psi[np.arange(dim), np.arange(dim)] = c
    rho = np.einsum("ab,cd->abcd", psi, psi)  # rho[i, s, i', s']
    for kraus in (_loss_kraus(kappa / (1 + nu), dim), _amp_kraus(1 + nu, dim)):
        rho = sum(np.einsum("xs,isjt,yt->ixjy", k, rho, k) for k in kraus)
    return rho.reshape(dim * dim, dim * dim)


def _matrix_power(rho, s):
    w, u = eigh(rho)
    w = np.clip(w, 0.0, None)
    return (u * w**s) @ u.T


def test_tmsv_exponent_matches_dense_fock_computation():
    n_S, nu, kappa1 = 0.1, 0.05, 0.4
    dim = 14
    rho0 = _fock_return_state(n_S, 0.0, nu, dim)
    rho1 = _fock_return_state(n_S, kappa1, nu, dim)
    s_grid = np.linspace(0.05, 0.95, 91)
    q = [np.trace(_matrix_power(rho0, s) @ _matrix_power(rho1, 1 - s)) for s in s_grid]
    k = int(np.argmin(q))
    # refine around the grid minimum with a parabola through three nodes
    a, b, c = q[k - 1], q[k], q[k + 1]
    h = s_grid[1] - s_grid[0]
    s_ref = s_grid[k] + 0.5 * h * (a - c) / (a - 2 * b + c)
    dense = -math.log(np.trace(_matrix_power(rho0, s_ref) @ _matrix_power(rho1, 1 - s_ref)))
    res = gaussian_qcb(tmsv(n_S, 0.0, nu), tmsv(n_S, kappa1, nu))
    assert res.exponent == pytest.approx(dense, rel=1e-6)
    for s in (0.3, 0.5, 0.7):
        fock_q = np.trace(_matrix_power(rho0, s) @ _matrix_power(rho1, 1 - s))
        assert gaussian_q(tmsv(n_S, 0.0, nu), tmsv(n_S, kappa1, nu), s) == pytest.approx(fock_q, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0.05, 0.95), st.floats(0.01, 1.0))
def test_tmsv_spectra_and_bounds(n, kappa, nu):
    v0, v1 = tmsv(n, 0.0, nu), tmsv(n, kappa, nu)
    assert np.all(symplectic_eigenvalues(v1) >= 1.0)
    res = gaussian_qcb(v0, v1)
    assert 0.0 <= res.exponent
    assert 0.0 < res.s_star < 1.0
    # a larger return transmissivity makes the hypotheses easier to tell apart
    assert gaussian_qcb(v0, tmsv(n, min(1.0, kappa * 1.05), nu)).exponent >= res.exponent - 1e-10
