"""Zero-mean Gaussian states: covariance matrices, symplectic spectra, quantum Chernoff bound.

Convention: quadratures ordered (x1, p1, x2, p2, ...), vacuum covariance is
the identity, and a thermal mode with mean photon number n has covariance
(2n + 1) I.
"""
import math
from dataclasses import dataclass

import numpy as np

from .chernoff import ChernoffResult, golden_min
from .errors import DomainError, InvalidStateError, NumericalError

BONA_FIDE_TOL = 1e-10
SYMPLECTIC_TOL = 1e-8


def symplectic_form(m):
    return np.kron(np.eye(m), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    entries: np.ndarray

    def __post_init__(self):
        v = np.array(self.entries, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2:
            raise DomainError(f"covariance must be 2m x 2m, got shape {v.shape}")
        if not np.allclose(v, v.T, atol=1e-12, rtol=0):
            raise InvalidStateError("covariance matrix is not symmetric")
        v = (v + v.T) / 2
        m = v.shape[0] // 2
        lowest = np.linalg.eigvalsh(v + 1j * symplectic_form(m)).min()
        if lowest < -BONA_FIDE_TOL:
            raise InvalidStateError(f"V + i Omega has eigenvalue {lowest:.3e} < 0")
        v.setflags(write=False)
        object.__setattr__(self, "entries", v)

    @property
    def modes(self):
        return self.entries.shape[0] // 2

    @classmethod
    def thermal(cls, *means):
        return cls(np.kron(np.diag([2 * n + 1 for n in means]), np.eye(2)))

    def direct_sum(self, other):
        a, b = self.entries, other.entries
        out = np.zeros((a.shape[0] + b.shape[0],) * 2)
        out[: a.shape[0], : a.shape[0]] = a
        out[a.shape[0]:, a.shape[0]:] = b
        return CovarianceMatrix(out)


def _check_spectrum(nu):
    if np.any(nu < 1.0 - SYMPLECTIC_TOL):
        raise InvalidStateError(f"symplectic eigenvalue {nu.min():.12g} < 1")
    return np.maximum(nu, 1.0)


def symplectic_eigenvalues(V):
    """Symplectic eigenvalues, ascending, one per mode."""
    v = V.entries
    if V.modes == 2:
        a, b, c = v[:2, :2], v[2:, 2:], v[:2, 2:]
        delta = np.linalg.det(a) + np.linalg.det(b) + 2 * np.linalg.det(c)
        det = np.linalg.det(v)
        disc = math.sqrt(max(delta * delta - 4 * det, 0.0))
        nu = np.sqrt(np.maximum([(delta - disc) / 2, (delta + disc) / 2], 0.0))
    else:
        ev = np.abs(np.linalg.eigvals(1j * symplectic_form(V.modes) @ v))
        nu = np.sort(ev)[::2]
    return _check_spectrum(np.asarray(nu, dtype=float))


def _sqrtm_psd(v):
    w, u = np.linalg.eigh(v)
    return (u * np.sqrt(np.clip(w, 0.0, None))) @ u.T


@dataclass(frozen=True, eq=False)
class _Williamson:
    """Data for S f(D) S^T without constructing the symplectic S.

    With R = V^(1/2), the symmetric matrix Y = R Omega^T V Omega R has
    eigenvalues nu_k^2 (each twice) and S f(D) S^T = R k(Y) R with
    k(z) = f(sqrt z) / sqrt z.  Working with the symmetric Y keeps
    degenerate spectra (pure or identical modes) well conditioned.
    """

    ru: np.ndarray
    nu2: np.ndarray

    @classmethod
    def of(cls, V):
        v = V.entries
        om = symplectic_form(V.modes)
        r = _sqrtm_psd(v)
        y = r @ om.T @ v @ om @ r
        z, u = np.linalg.eigh((y + y.T) / 2)
        nu2 = _check_spectrum(np.sqrt(np.clip(z, 0.0, None)))
        return cls(r @ u, nu2)

    @property
    def spectrum(self):
        return np.sort(self.nu2)[::2]

    def apply(self, f):
        out = (self.ru * (f(self.nu2) / self.nu2)) @ self.ru.T
        return (out + out.T) / 2


def williamson_apply(V, f):
    """S f(D) S^T for the Williamson form V = S D S^T, plus the spectrum D."""
    w = _Williamson.of(V)
    return w.apply(f), w.spectrum


def _g(p, x):
    return 2.0**p / ((x + 1.0) ** p - (x - 1.0) ** p)


def _lam(p, x):
    return ((x + 1.0) ** p + (x - 1.0) ** p) / ((x + 1.0) ** p - (x - 1.0) ** p)


def _q_from(w0, w1, modes, s):
    a = w0.apply(lambda x: _lam(s, x))
    b = w1.apply(lambda x: _lam(1.0 - s, x))
    pi = np.prod(_g(s, w0.spectrum)) * np.prod(_g(1.0 - s, w1.spectrum))
    sign, logdet = np.linalg.slogdet(a + b)
    if sign <= 0:
        raise NumericalError("Sigma_s is not positive definite")
    return 2.0**modes * pi * math.exp(-0.5 * logdet)


def gaussian_q(V0, V1, s):
    """tr(rho0^s rho1^(1-s)) for zero-mean Gaussian states, 0 < s < 1."""
    if V0.modes != V1.modes:
        raise DomainError("states must have the same number of modes")
    if not (0.0 < s < 1.0):
        raise DomainError("s must lie strictly inside (0, 1)")
    return _q_from(_Williamson.of(V0), _Williamson.of(V1), V0.modes, s)


def gaussian_qcb(V0, V1):
    """Quantum Chernoff exponent -log min_s tr(rho0^s rho1^(1-s))."""
    if V0.modes != V1.modes:
        raise DomainError("states must have the same number of modes")
    w0, w1 = _Williamson.of(V0), _Williamson.of(V1)

    def log_q(s):
        q = _q_from(w0, w1, V0.modes, s)
        if q > 1.0 + 1e-8:
            raise NumericalError(f"Q(s={s:.6g}) = {q!r} exceeds 1")
        return math.log(min(q, 1.0))

    s_star, val = golden_min(log_q)
    return ChernoffResult(max(-val, 0.0), s_star)
