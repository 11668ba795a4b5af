"""Independent brute-force oracles used by the tests.

Everything here is deliberately written against textbook formulas or raw
matrix exponentials, not against the package's own code paths, so that a
test comparing the two is a genuine cross-check.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate
from scipy.linalg import expm
from scipy.special import eval_hermite, gammaln


def ladder(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1)


def displacement_matrix(alpha: complex, cutoff: int) -> np.ndarray:
    """exp(alpha a^dag - alpha* a) by direct matrix exponential."""
    a = ladder(cutoff)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def squeeze_matrix(r: float, theta: float, cutoff: int) -> np.ndarray:
    """exp((z* a^2 - z a^dag^2)/2), z = r e^{i theta}."""
    a = ladder(cutoff)
    z = r * np.exp(1j * theta)
    return expm(0.5 * (np.conj(z) * a @ a - z * a.conj().T @ a.conj().T))


def thermal_matrix(nbar: float, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff)
    weights = nbar**n / (1.0 + nbar) ** (n + 1)
    return np.diag(weights.astype(complex))


def hermite_psi(n: int, x: float) -> float:
    """Oscillator eigenfunction <x|n> with vacuum variance 1/2."""
    log_norm = -0.5 * (n * math.log(2.0) + gammaln(n + 1)) - 0.25 * math.log(math.pi)
    return float(eval_hermite(n, x) * math.exp(log_norm - 0.5 * x * x))


def teleport_fidelity(r: float, alpha: complex, offset: float = 0.0) -> float:
    """Unit-gain CV teleportation fidelity for a coherent input.

    Output = input + isotropic noise e^{-2r} per quadrature; an offset
    rotates the input against the verification target.
    """
    noise = 1.0 + math.exp(-2.0 * r)
    gap = 2.0 * abs(alpha) ** 2 * (1.0 - math.cos(offset))
    return math.exp(-gap / noise) / noise


def teleport_fidelity_scrambled(r: float, alpha: complex) -> float:
    value, _ = integrate.quad(lambda d: teleport_fidelity(r, alpha, d), 0.0, 2.0 * math.pi,
                              limit=200)
    return value / (2.0 * math.pi)


def fine_grid_phase_posterior(outcomes, alpha0: float, grid_size: int = 16384):
    """Direct Bayes on a dense phase grid for heterodyne outcomes.

    Returns (grid, weights).  Likelihood per outcome m: exp(-|m - alpha0
    e^{i phi}|^2), the coherent-state POVM density.
    """
    grid = 2.0 * math.pi * np.arange(grid_size) / grid_size
    log_w = np.zeros(grid_size)
    for m in np.atleast_1d(outcomes):
        log_w += -np.abs(m - alpha0 * np.exp(1j * grid)) ** 2
    log_w -= log_w.max()
    w = np.exp(log_w)
    return grid, w / w.sum()


def circular_mean_std(grid, weights):
    z = np.sum(weights * np.exp(1j * grid))
    r = abs(z)
    return float(np.angle(z)), float(math.sqrt(-2.0 * math.log(r)))
