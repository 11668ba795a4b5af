"""Truncated number-basis engine (dense matrices, one or two modes).

This is the brute-force oracle for claims the Gaussian engine cannot
express: number-diagonality of phase-averaged states, PPT negativity of
non-Gaussian phase mixtures, and conditional states after phase
conditioning.  Truncation is never hidden: every state carries an explicit
`tail_mass` estimate, and claim-bearing computations refuse to run when the
tail exceeds 1%.
"""

from __future__ import annotations

import math

import numpy as np

TAIL_LIMIT = 0.01

_HERMITICITY_TOL = 1e-12
_PSD_TOL = 1e-10
_TRACE_SLACK = 1e-8


class TruncationError(ValueError):
    """Raised when a Fock-space cutoff leaves too much probability outside the basis."""


def suggested_cutoff(alpha_mag: float) -> int:
    """Poisson-tail heuristic: dimension comfortably covering |alpha|."""
    return math.ceil(alpha_mag**2 + 6.0 * alpha_mag + 10.0)


class FockDensityMatrix:
    """Density matrix on a truncated number basis, one or two modes.

    `cutoff` is the per-mode dimension d (photon numbers 0..d-1); a two-mode
    matrix is indexed by n1 * d + n2.  No silent renormalization is done
    after truncation: `tail_mass` carries the estimated probability lost to
    the cutoff and trace is allowed to fall short of one by that amount.
    """

    __slots__ = ("n_modes", "cutoff", "matrix", "tail_mass")

    def __init__(self, matrix, n_modes: int, cutoff: int, tail_mass: float = 0.0, check: bool = True):
        matrix = np.array(matrix, dtype=complex)
        if n_modes not in (1, 2):
            raise ValueError("only 1- or 2-mode Fock states are supported")
        if cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        dim = cutoff**n_modes
        if matrix.shape != (dim, dim):
            raise ValueError(f"matrix shape {matrix.shape} does not match cutoff {cutoff}^{n_modes}")
        self.n_modes = n_modes
        self.cutoff = cutoff
        self.matrix = matrix
        self.tail_mass = float(tail_mass)
        self.matrix.setflags(write=False)
        if check:
            self._validate()

    def _validate(self):
        m = self.matrix
        herm = np.max(np.abs(m - m.conj().T))
        if herm > _HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian (max asymmetry {herm:.3e})")
        tr = float(np.real(np.trace(m)))
        if tr > 1.0 + 1e-12 or tr < 1.0 - self.tail_mass - _TRACE_SLACK:
            raise ValueError(f"trace {tr} incompatible with tail mass {self.tail_mass}")
        min_eig = float(np.linalg.eigvalsh(m).min())
        if min_eig < -_PSD_TOL:
            raise ValueError(f"matrix is not positive semidefinite (min eig {min_eig:.3e})")

    def require_converged(self, context: str = "computation"):
        if self.tail_mass > TAIL_LIMIT:
            raise TruncationError(
                f"tail mass {self.tail_mass:.4f} exceeds {TAIL_LIMIT} for {context}; raise the cutoff")

    def __repr__(self):
        return (f"FockDensityMatrix(n_modes={self.n_modes}, cutoff={self.cutoff}, "
                f"tail_mass={self.tail_mass:.3e})")


def ladder(cutoff: int) -> np.ndarray:
    """Annihilation operator on a d-dimensional number basis."""
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1)


def _pure(vector: np.ndarray, n_modes: int, cutoff: int) -> FockDensityMatrix:
    tail = 1.0 - float(np.vdot(vector, vector).real)
    state = FockDensityMatrix(np.outer(vector, vector.conj()), n_modes, cutoff,
                              tail_mass=max(tail, 0.0), check=False)
    state.require_converged("state construction")
    return state


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """Number-basis amplitudes e^{-|a|^2/2} a^n / sqrt(n!)."""
    alpha = complex(alpha)
    c = np.empty(cutoff, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, cutoff):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def coherent_fock(alpha: complex, cutoff: int) -> FockDensityMatrix:
    """Pure coherent state |alpha><alpha| on a truncated basis."""
    return _pure(coherent_amplitudes(alpha, cutoff), 1, cutoff)


def poisson_mixture(abs_alpha: float, cutoff: int) -> FockDensityMatrix:
    """Number-diagonal mixture with Poisson(|alpha|^2) weights.

    This is the phase-averaged coherent state: identical photon statistics,
    no number coherences.
    """
    weights = np.abs(coherent_amplitudes(abs(abs_alpha), cutoff)) ** 2
    tail = max(1.0 - float(weights.sum()), 0.0)
    state = FockDensityMatrix(np.diag(weights.astype(complex)), 1, cutoff, tail_mass=tail, check=False)
    state.require_converged("state construction")
    return state


def squeezed_vacuum_fock(r: float, theta: float, cutoff: int) -> FockDensityMatrix:
    """Squeezed vacuum with squeezing axis at theta/2 (matches gaussian.squeezer)."""
    if not (math.isfinite(r) and math.isfinite(theta)):
        raise ValueError("non-finite squeezing parameters")
    c = np.zeros(cutoff, dtype=complex)
    c[0] = 1.0 / math.sqrt(math.cosh(r))
    q = -np.exp(1j * theta) * math.tanh(r)
    for m in range(1, (cutoff + 1) // 2):
        c[2 * m] = c[2 * m - 2] * q * math.sqrt((2 * m - 1) / (2 * m))
    return _pure(c, 1, cutoff)


def tmss_amplitudes(r: float, phi: float, cutoff: int) -> np.ndarray:
    """Schmidt coefficients (e^{2 i phi} tanh r)^n / cosh r of a two-mode squeezed state.

    The pump phase phi enters as e^{2 i n phi} on |n, n>: downconversion
    halves the pump frequency, so packets of pump light at phase phi produce
    pairs locked to 2 phi.  This is the single place fixing that bookkeeping.
    """
    lam = np.exp(2j * phi) * math.tanh(r)
    return lam ** np.arange(cutoff) / math.cosh(r)


def tmss_fock(r: float, phi: float, cutoff: int) -> FockDensityMatrix:
    """Two-mode squeezed state sum_n (e^{2 i phi} tanh r)^n |n,n> / cosh r."""
    if not (math.isfinite(r) and math.isfinite(phi)):
        raise ValueError("non-finite parameters")
    coeffs = tmss_amplitudes(r, phi, cutoff)
    vec = np.zeros(cutoff * cutoff, dtype=complex)
    vec[np.arange(cutoff) * cutoff + np.arange(cutoff)] = coeffs
    return _pure(vec, 2, cutoff)


def phase_average(state_builder, grid_size: int) -> FockDensityMatrix:
    """Average state_builder(phi) over a uniform grid on [0, 2pi).

    By discrete Fourier orthogonality the grid average is *exact* whenever
    the builder's phi-dependence lives on number coherences e^{i k phi} with
    |k| < grid_size, which is why the grid must comfortably exceed the
    cutoff.  grid_size == 1 is the trivial pass-through.
    """
    if grid_size < 1:
        raise ValueError("grid_size must be positive")
    if grid_size == 1:
        return state_builder(0.0)
    first = state_builder(0.0)
    if grid_size < 2 * first.cutoff:
        raise ValueError(
            f"phase grid {grid_size} too small for cutoff {first.cutoff}; need at least {2 * first.cutoff}")
    total = np.array(first.matrix, dtype=complex)
    tail = first.tail_mass
    for k in range(1, grid_size):
        state = state_builder(2.0 * math.pi * k / grid_size)
        total += state.matrix
        tail += state.tail_mass
    return FockDensityMatrix(total / grid_size, first.n_modes, first.cutoff,
                             tail_mass=tail / grid_size)


def mixture(states, weights) -> FockDensityMatrix:
    """Weighted mixture of same-shape Fock states (fixed summation order)."""
    weights = np.asarray(weights, dtype=float)
    if len(states) != weights.size or not states:
        raise ValueError("need one weight per state")
    total = np.zeros_like(states[0].matrix)
    tail = 0.0
    for state, w in zip(states, weights):
        if (state.n_modes, state.cutoff) != (states[0].n_modes, states[0].cutoff):
            raise ValueError("mixture components have mismatched shapes")
        total = total + w * state.matrix
        tail += w * state.tail_mass
    return FockDensityMatrix(total, states[0].n_modes, states[0].cutoff, tail_mass=tail)


def partial_transpose(state: FockDensityMatrix) -> np.ndarray:
    if state.n_modes != 2:
        raise ValueError("partial transpose needs a two-mode state")
    d = state.cutoff
    rho = state.matrix.reshape(d, d, d, d)
    return np.ascontiguousarray(rho.transpose(0, 3, 2, 1)).reshape(d * d, d * d)


def ppt_negativity(state: FockDensityMatrix) -> float:
    """Sum of |negative eigenvalues| of the partial transpose; 0 for separable states."""
    state.require_converged("PPT negativity")
    eigs = np.linalg.eigvalsh(partial_transpose(state))
    return float(-eigs[eigs < 0.0].sum())


def log_negativity_fock(state: FockDensityMatrix) -> float:
    """log2(2 N + 1) with N the PPT negativity."""
    return math.log2(2.0 * ppt_negativity(state) + 1.0)


def trace_distance(a: FockDensityMatrix, b: FockDensityMatrix) -> float:
    """Half the trace norm of (a - b); a metric with values in [0, 1]."""
    if (a.n_modes, a.cutoff) != (b.n_modes, b.cutoff):
        raise ValueError("states have mismatched shapes")
    eigs = np.linalg.eigvalsh(a.matrix - b.matrix)
    return 0.5 * float(np.abs(eigs).sum())


def overlap(a: FockDensityMatrix, b: FockDensityMatrix) -> float:
    """tr(rho_a rho_b)."""
    if (a.n_modes, a.cutoff) != (b.n_modes, b.cutoff):
        raise ValueError("states have mismatched shapes")
    return float(np.real(np.trace(a.matrix @ b.matrix)))


def overlap_with_coherent(state: FockDensityMatrix, alpha: complex) -> float:
    """<alpha| rho |alpha> for a single-mode state."""
    if state.n_modes != 1:
        raise ValueError("expects a single-mode state")
    c = coherent_amplitudes(alpha, state.cutoff)
    return float(np.real(c.conj() @ state.matrix @ c))


def mean_photons(state: FockDensityMatrix) -> float:
    """<n> summed over modes."""
    d = state.cutoff
    n = np.arange(d, dtype=float)
    if state.n_modes == 1:
        return float(np.real(np.diag(state.matrix) @ n))
    totals = (n[:, None] + n[None, :]).reshape(-1)
    return float(np.real(np.diag(state.matrix) @ totals))


def max_number_offdiagonal(state: FockDensityMatrix) -> float:
    """Largest |element| between different total photon numbers."""
    d = state.cutoff
    if state.n_modes == 1:
        totals = np.arange(d)
    else:
        n = np.arange(d)
        totals = (n[:, None] + n[None, :]).reshape(-1)
    mask = totals[:, None] != totals[None, :]
    return float(np.max(np.abs(state.matrix[mask]))) if mask.any() else 0.0


def _quad_ops(state: FockDensityMatrix):
    d = state.cutoff
    a = ladder(d)
    x = (a + a.conj().T) / math.sqrt(2.0)
    p = (a - a.conj().T) / (1j * math.sqrt(2.0))
    if state.n_modes == 1:
        return [x, p]
    eye = np.eye(d)
    return [np.kron(x, eye), np.kron(p, eye), np.kron(eye, x), np.kron(eye, p)]


def quadrature_moments(state: FockDensityMatrix):
    """Mean vector and covariance matrix in the Gaussian engine's conventions.

    Valid for any Fock state; for Gaussian states this must agree with
    `cwbeam.gaussian` to within truncation error (the engine cross-check).
    """
    ops = _quad_ops(state)
    rho = state.matrix
    mean = np.array([float(np.real(np.trace(rho @ op))) for op in ops])
    k = len(ops)
    cov = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            sym = 0.5 * (ops[i] @ ops[j] + ops[j] @ ops[i])
            cov[i, j] = cov[j, i] = float(np.real(np.trace(rho @ sym))) - mean[i] * mean[j]
    return mean, cov


def quadrature_variance(state: FockDensityMatrix, angle: float) -> float:
    """Variance of x cos(angle) + p sin(angle) for a single-mode state."""
    if state.n_modes != 1:
        raise ValueError("expects a single-mode state")
    mean, cov = quadrature_moments(state)
    direction = np.array([math.cos(angle), math.sin(angle)])
    return float(direction @ cov @ direction)
