"""Cross-representation oracle suites behind ``covsig verify``.

Each check returns a :class:`Check` carrying the worst observed error and
the tolerance it was held to.
"""
import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from .chernoff import classical_chernoff
from .gaussian import CovarianceMatrix, gaussian_qcb
from .kernel import (
    ChannelPort,
    FockDiagonalInput,
    quadrature_matrix,
    thermal_pmf,
    transition_matrix,
    transition_matrix_exact,
    truncation_level,
)
from .optimizer import (
    MeanConstraint,
    brute_force_min,
    discrete_jensen_check,
    jensen_gap,
    optimal_two_point,
)
from .orthopoly import meixner
from .qre import CoefficientParams, SparseInput, cp_direct, cp_meixner, qre_third_order, sparse_kl

PORT_GRID = [ChannelPort(k, n) for k in (0.2, 0.4, 0.6, 0.8) for n in (0.5, 1.0, 2.0)]
SEED = 20240611


@dataclass
class Check:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    seconds: float = 0.0


def _timed(name, tol, fn):
    t0 = time.perf_counter()
    err = float(fn())
    return Check(name, bool(err <= tol), err, tol, round(time.perf_counter() - t0, 3))


def kernel_equivalence(ports, n_max):
    """Max |exact closed form - quadrature| and |production - quadrature| over i, l <= n_max."""
    worst = 0.0
    for port in ports:
        quad = quadrature_matrix(port, n_max, n_max)
        worst = max(
            worst,
            np.max(np.abs(transition_matrix_exact(port, n_max, n_max) - quad)),
            np.max(np.abs(transition_matrix(port, n_max, n_max) - quad)),
        )
    return worst


def row_sums_and_means(ports, i_max):
    """(worst |sum_l p(l|i) - 1|, worst |sum_l l p(l|i) - (kappa i + nu)|)."""
    worst_sum = worst_mean = 0.0
    for port in ports:
        ell_max = truncation_level(port.nu, 1e-17, margin=4 * i_max + 40)
        mat = transition_matrix(port, i_max, ell_max)
        ell = np.arange(ell_max + 1)
        for i in range(i_max + 1):
            worst_sum = max(worst_sum, abs(math.fsum(mat[i]) - 1.0))
            worst_mean = max(worst_mean, abs(math.fsum(ell * mat[i]) - (port.kappa * i + port.nu)))
    return worst_sum, worst_mean


def meixner_orthogonality(qs=(0.2, 0.5, 0.8), y_max=8):
    """Worst |sum_l (1-q) q^l M_y M_y' - q^-y delta| over y, y' <= y_max."""
    worst = 0.0
    for q in qs:
        # weight q^l times a degree-2*y_max polynomial; stop once the tail is negligible
        ell_max = int(math.log(1e-22) / math.log(q)) + 40 * y_max
        table = np.array([[meixner(y, ell, q) for ell in range(ell_max + 1)] for y in range(y_max + 1)])
        w = (1 - q) * q ** np.arange(ell_max + 1)
        gram = (table * w) @ table.T
        target = np.diag(q ** -np.arange(y_max + 1.0))
        worst = max(worst, np.max(np.abs(gram - target) / np.maximum(1.0, np.abs(target))))
    return worst


def random_inputs(rng, count, support=8):
    out = []
    for _ in range(count):
        j = int(rng.integers(1, support + 1))
        out.append(FockDiagonalInput(rng.dirichlet(np.ones(j + 1))))
    return out


def cp_equivalence(ports, inputs):
    worst = 0.0
    for port in ports:
        params = CoefficientParams.from_port(port)
        for inp in inputs:
            d, m = cp_direct(port, inp), cp_meixner(params, inp)
            worst = max(worst, abs(d - m) / max(abs(m), 1e-300))
    return worst


def richardson_cp(port, inp, base=1e-4):
    """Relative error of the Richardson-extrapolated sparse_kl/(alpha^2/2) against C_P.

    The step sizes shrink with the input's third-order ratio R so that the
    neglected alpha^2 term stays small for heavy-tailed inputs too.
    """
    cp = cp_direct(port, inp)
    r = abs(qre_third_order(port, inp)) / (3 * cp)
    a = base / (1.0 + r)
    v1, v2 = (sparse_kl(port, SparseInput(inp, x)) / (x * x / 2) for x in (a, a / 2))
    return abs(2 * v2 - v1 - cp) / cp


def brute_force_gap(means, support, step, port):
    """Largest amount by which the grid minimum undercuts the two-point value."""
    params = CoefficientParams.from_port(port)
    worst = -math.inf
    for n in means:
        _, val = brute_force_min(MeanConstraint(n), support, step, params)
        worst = max(worst, cp_meixner(params, optimal_two_point(n)) - val)
    return worst


def commuting_qcb(means=(0.5, 1.0, 2.0)):
    worst = 0.0
    for n in means:
        for m in means:
            ell_max = truncation_level(max(n, m), 1e-18)
            classical = classical_chernoff(thermal_pmf(n, ell_max), thermal_pmf(m, ell_max))
            quantum = gaussian_qcb(CovarianceMatrix.thermal(n), CovarianceMatrix.thermal(m))
            worst = max(worst, abs(classical.exponent - quantum.exponent))
    return worst


def idler_factorization(means=(0.5, 1.0, 2.0), idlers=(0.0, 0.7)):
    worst = 0.0
    for n in means:
        for m in means:
            single = gaussian_qcb(CovarianceMatrix.thermal(n), CovarianceMatrix.thermal(m)).exponent
            for k in idlers:
                two = gaussian_qcb(CovarianceMatrix.thermal(k, n), CovarianceMatrix.thermal(k, m)).exponent
                worst = max(worst, abs(two - single))
    return worst


def jensen_trials(rng, count, degrees=(2, 3, 4), support=10):
    """Number of random distributions violating the discrete Jensen bound."""
    failures = 0
    for _ in range(count):
        j = int(rng.integers(1, support + 1))
        inp = FockDiagonalInput(rng.dirichlet(np.full(j + 1, 0.5)))
        failures += sum(not discrete_jensen_check(y, inp) for y in degrees)
    return failures


def jensen_equality(means=(0.3, 0.5, 1.0, 1.7, 2.3, 3.9), degrees=(2, 3, 4)):
    worst = 0.0
    for n in means:
        inp = optimal_two_point(n)
        for y in degrees:
            gap, rhs = jensen_gap(y, inp)
            worst = max(worst, abs(gap) / max(1.0, abs(rhs)))
    return worst


def run(level="quick"):
    """Run the oracle suites; ``level`` is 'quick' or 'full'."""
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    full = level == "full"
    rng = np.random.default_rng(SEED)
    ports = PORT_GRID if full else PORT_GRID[::5]
    n_kernel = 20 if full else 10
    checks = [
        _timed("kernel closed form vs quadrature", 1e-10, lambda: kernel_equivalence(ports, n_kernel)),
    ]
    sums = {}
    checks.append(_timed("kernel row sums", 1e-10,
                         lambda: sums.setdefault("v", row_sums_and_means(ports, 12))[0]))
    checks.append(_timed("kernel mean map", 1e-9, lambda: sums["v"][1]))
    checks.append(_timed("Meixner orthogonality", 1e-8, meixner_orthogonality))
    inputs = random_inputs(rng, 1000 if full else 60)
    checks.append(_timed("C_P direct vs Meixner", 1e-8, lambda: cp_equivalence(ports, inputs)))
    checks.append(_timed(
        "QRE Richardson limit", 1e-6,
        lambda: max(richardson_cp(p, inp) for p in ports for inp in inputs[:10]),
    ))
    means = (0.3, 0.5, 0.8, 1.7, 2.3) if full else (0.5, 1.7)
    step = 0.005 if full else 0.01
    checks.append(_timed(
        "brute-force optimizer", 10 * step**2,
        lambda: brute_force_gap(means, 5, step, ChannelPort(0.4, 0.6)),
    ))
    checks.append(_timed("commuting-state QCB", 1e-8, commuting_qcb))
    checks.append(_timed("idler factorization", 1e-10, idler_factorization))
    checks.append(_timed("discrete Jensen trials", 0, lambda: jensen_trials(rng, 10_000 if full else 1000)))
    checks.append(_timed("discrete Jensen equality", 1e-14, jensen_equality))
    return {
        "level": level,
        "passed": all(c.passed for c in checks),
        "checks": [asdict(c) for c in checks],
    }
