"""Gaussian-state engine: states as (mean, covariance), symplectic maps, Gaussian measurements.

Conventions (fixed once, used everywhere):
  * quadratures x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)), so the
    vacuum has variance 1/2 per quadrature and cov(vacuum) = I/2;
  * interleaved mode ordering (x1, p1, x2, p2, ...);
  * a coherent state |alpha> has mean (sqrt(2) Re alpha, sqrt(2) Im alpha);
  * beamsplitters are real rotations parameterized by transmittance, phases
    are supplied separately through `phase_shift`.

All values are immutable after construction; operations are pure functions
returning new states, with randomness confined to an explicit `rng` handle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

VACUUM_VARIANCE = 0.5

_SYMPLECTIC_TOL = 1e-10
_UNCERTAINTY_TOL = 1e-10
_PURITY_SLACK = 1e-9


def symplectic_form(n_modes: int) -> np.ndarray:
    """Standard symplectic form Omega for interleaved (x, p) ordering."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


class GaussianState:
    """Gaussian state of `n_modes` modes held as a mean vector and covariance matrix.

    The covariance is symmetrized on construction and checked against the
    uncertainty relation cov + (i/2) Omega >= 0 (eigenvalues clamped at
    -1e-10 to absorb float drift from long operation chains).
    """

    __slots__ = ("n_modes", "mean", "cov")

    def __init__(self, mean, cov, check: bool = True):
        mean = np.array(mean, dtype=float).reshape(-1)
        cov = np.array(cov, dtype=float)
        if mean.size == 0 or mean.size % 2 != 0:
            raise ValueError(f"mean length must be a positive even number, got {mean.size}")
        n = mean.size // 2
        if cov.shape != (2 * n, 2 * n):
            raise ValueError(f"covariance shape {cov.shape} does not match {2 * n} quadratures")
        if np.max(np.abs(cov - cov.T)) > 1e-10:
            raise ValueError("covariance is not symmetric")
        cov = 0.5 * (cov + cov.T)
        self.n_modes = n
        self.mean = mean
        self.cov = cov
        self.mean.setflags(write=False)
        self.cov.setflags(write=False)
        if check:
            self._validate()

    def _validate(self):
        omega = symplectic_form(self.n_modes)
        uncertainty = self.cov + 0.5j * omega
        min_eig = float(np.linalg.eigvalsh(uncertainty).min())
        if min_eig < -_UNCERTAINTY_TOL:
            raise ValueError(f"covariance violates the uncertainty relation (min eig {min_eig:.3e})")
        p = self.purity
        if not (0.0 < p <= 1.0 + _PURITY_SLACK):
            raise ValueError(f"purity {p} outside (0, 1]")

    @property
    def purity(self) -> float:
        det = float(np.linalg.det(self.cov))
        return (0.5**self.n_modes) / math.sqrt(det)

    def mode_mean(self, mode: int) -> complex:
        """Coherent amplitude of one mode, alpha = (<x> + i<p>)/sqrt(2)."""
        return (self.mean[2 * mode] + 1j * self.mean[2 * mode + 1]) / math.sqrt(2.0)

    def mean_photons(self, mode: int) -> float:
        """<n> of one mode from first and second moments."""
        i = 2 * mode
        second = self.cov[i, i] + self.cov[i + 1, i + 1]
        return 0.5 * (second + self.mean[i] ** 2 + self.mean[i + 1] ** 2) - 0.5

    def __repr__(self):
        return f"GaussianState(n_modes={self.n_modes}, mean={self.mean!r})"


@dataclass(frozen=True)
class SymplecticOp:
    """Affine Gaussian map: quadratures -> matrix @ quadratures + displacement."""

    matrix: np.ndarray
    displacement: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2 != 0:
            raise ValueError(f"symplectic matrix must be square 2n x 2n, got {matrix.shape}")
        disp = self.displacement
        disp = np.zeros(matrix.shape[0]) if disp is None else np.array(disp, dtype=float).reshape(-1)
        if disp.size != matrix.shape[0]:
            raise ValueError("displacement length does not match matrix dimension")
        if not np.all(np.isfinite(matrix)) or not np.all(np.isfinite(disp)):
            raise ValueError("non-finite entries in symplectic op")
        omega = symplectic_form(matrix.shape[0] // 2)
        err = np.max(np.abs(matrix @ omega @ matrix.T - omega))
        if err > _SYMPLECTIC_TOL:
            raise ValueError(f"matrix is not symplectic (S Omega S^T error {err:.3e})")
        matrix.setflags(write=False)
        disp.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "displacement", disp)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2


@dataclass(frozen=True)
class HomodyneOutcome:
    """One quadrature measurement: value of x cos(angle) + p sin(angle) on one mode."""

    value: float
    angle: float
    mode_index: int
    log_density: float

    def __post_init__(self):
        if not math.isfinite(self.log_density):
            raise ValueError("homodyne outcome has non-finite log density")


# ----------------------------------------------------------------------
# State constructors
# ----------------------------------------------------------------------

def vacuum(n_modes: int = 1) -> GaussianState:
    return GaussianState(np.zeros(2 * n_modes), VACUUM_VARIANCE * np.eye(2 * n_modes), check=False)

def coherent(alpha: complex) -> GaussianState:
    """Single-mode coherent state |alpha>."""
    alpha = complex(alpha)
    mean = math.sqrt(2.0) * np.array([alpha.real, alpha.imag])
    return GaussianState(mean, VACUUM_VARIANCE * np.eye(2), check=False)

def tensor(*states: GaussianState) -> GaussianState:
    """Product state on the concatenated mode list."""
    mean = np.concatenate([s.mean for s in states])
    dims = [2 * s.n_modes for s in states]
    cov = np.zeros((sum(dims), sum(dims)))
    off = 0
    for s, d in zip(states, dims):
        cov[off:off + d, off:off + d] = s.cov
        off += d
    return GaussianState(mean, cov, check=False)

def marginal(state: GaussianState, modes) -> GaussianState:
    """Reduced state on the listed modes (partial trace over the rest)."""
    idx = _quad_indices(modes)
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)], check=False)


# ----------------------------------------------------------------------
# Symplectic constructors
# ----------------------------------------------------------------------

def identity_op(n_modes: int = 1) -> SymplecticOp:
    return SymplecticOp(np.eye(2 * n_modes))

def displacement(*alphas: complex) -> SymplecticOp:
    """Displace each listed mode by a coherent amplitude."""
    d = np.empty(2 * len(alphas))
    for k, a in enumerate(alphas):
        a = complex(a)
        d[2 * k] = math.sqrt(2.0) * a.real
        d[2 * k + 1] = math.sqrt(2.0) * a.imag
    return SymplecticOp(np.eye(2 * len(alphas)), d)

def phase_shift(phi: float) -> SymplecticOp:
    """Rotation mapping a coherent amplitude alpha to alpha * exp(i phi)."""
    if not math.isfinite(phi):
        raise ValueError("non-finite phase")
    c, s = math.cos(phi), math.sin(phi)
    return SymplecticOp(np.array([[c, -s], [s, c]]))

def squeezer(r: float, theta: float = 0.0) -> SymplecticOp:
    """Single-mode squeezer; the squeezed quadrature axis sits at angle theta/2.

    squeezer(r, 0) maps vacuum to cov diag(e^{-2r}, e^{2r})/2; a pump carrying
    phase phi squeezes along phi/2, i.e. corresponds to theta = 2*phi.
    """
    if not (math.isfinite(r) and math.isfinite(theta)):
        raise ValueError("non-finite squeezer parameters")
    core = np.array([[math.exp(-r), 0.0], [0.0, math.exp(r)]])
    half = 0.5 * theta
    rot = np.array([[math.cos(half), -math.sin(half)], [math.sin(half), math.cos(half)]])
    return SymplecticOp(rot @ core @ rot.T)

def two_mode_squeezer(r: float) -> SymplecticOp:
    """Two-mode squeezer producing x-correlated / p-anticorrelated pairs from vacuum.

    On vacuum this yields the Schmidt-form entangled state sum_n tanh(r)^n |n,n>
    (up to normalization), the same state obtained by interfering a p-squeezed
    and an x-squeezed vacuum on a balanced beamsplitter.
    """
    if not math.isfinite(r):
        raise ValueError("non-finite squeezing parameter")
    c, s = math.cosh(r), math.sinh(r)
    m = np.array([
        [c, 0.0, s, 0.0],
        [0.0, c, 0.0, -s],
        [s, 0.0, c, 0.0],
        [0.0, -s, 0.0, c],
    ])
    return SymplecticOp(m)

def beamsplitter(transmittance: float) -> SymplecticOp:
    """Real two-mode beamsplitter with t = sqrt(T), r = sqrt(1 - T).

    Acting on (mode1, mode2) = (|alpha>, |0>) the outputs are
    (|t alpha>, |r alpha>); phases are supplied separately via `phase_shift`.
    """
    if not 0.0 <= transmittance <= 1.0:
        raise ValueError(f"transmittance {transmittance} outside [0, 1]")
    t = math.sqrt(transmittance)
    r = math.sqrt(1.0 - transmittance)
    m = np.array([
        [t, 0.0, -r, 0.0],
        [0.0, t, 0.0, -r],
        [r, 0.0, t, 0.0],
        [0.0, r, 0.0, t],
    ])
    return SymplecticOp(m)

def compose(first: SymplecticOp, second: SymplecticOp) -> SymplecticOp:
    """Op applying `first` then `second`."""
    return SymplecticOp(second.matrix @ first.matrix,
                        second.matrix @ first.displacement + second.displacement)


# ----------------------------------------------------------------------
# Operations
# ----------------------------------------------------------------------

def _quad_indices(modes) -> list:
    idx = []
    for m in modes:
        idx.extend((2 * m, 2 * m + 1))
    return idx


def apply_symplectic(state: GaussianState, op: SymplecticOp, modes=None) -> GaussianState:
    """Apply an affine Gaussian map to the listed modes (all modes when omitted)."""
    if modes is None:
        modes = list(range(op.n_modes))
    modes = list(modes)
    if len(set(modes)) != len(modes):
        raise ValueError("mode indices must be distinct")
    if any(not 0 <= m < state.n_modes for m in modes):
        raise IndexError(f"mode indices {modes} out of range for {state.n_modes} modes")
    if op.n_modes != len(modes):
        raise ValueError(f"op acts on {op.n_modes} modes but {len(modes)} indices were given")
    idx = _quad_indices(modes)
    full = np.eye(2 * state.n_modes)
    full[np.ix_(idx, idx)] = op.matrix
    disp = np.zeros(2 * state.n_modes)
    disp[idx] = op.displacement
    return GaussianState(full @ state.mean + disp, full @ state.cov @ full.T)


def _partition_for_measurement(state: GaussianState, mode: int):
    i = 2 * mode
    keep = [k for k in range(2 * state.n_modes) if k not in (i, i + 1)]
    a = state.cov[np.ix_(keep, keep)]
    b = state.cov[np.ix_([i, i + 1], [i, i + 1])]
    c = state.cov[np.ix_(keep, [i, i + 1])]
    return keep, a, b, c


def homodyne(state: GaussianState, mode: int, angle: float, rng: np.random.Generator):
    """Measure x cos(angle) + p sin(angle) on one mode.

    Returns (HomodyneOutcome, conditional state). The outcome is sampled from
    the exact Gaussian marginal; the conditional update is the Schur
    complement for a sharp quadrature measurement, so the conditional
    covariance does not depend on the sampled value. The measured mode is
    removed from the returned state.
    """
    if not 0 <= mode < state.n_modes:
        raise IndexError(f"mode {mode} out of range")
    rotated = apply_symplectic(state, phase_shift(-angle), [mode]) if angle != 0.0 else state
    keep, a, b, c = _partition_for_measurement(rotated, mode)
    mu = rotated.mean[[2 * mode, 2 * mode + 1]]
    var = b[0, 0]
    value = float(mu[0] + math.sqrt(var) * rng.standard_normal())
    log_density = -0.5 * (value - mu[0]) ** 2 / var - 0.5 * math.log(2.0 * math.pi * var)
    # Pi (Pi B Pi)^+ Pi for the x-projector
    inv = np.zeros((2, 2))
    inv[0, 0] = 1.0 / var
    gain = c @ inv
    mean_cond = rotated.mean[keep] + gain @ np.array([value - mu[0], 0.0])
    cov_cond = a - gain @ c.T
    outcome = HomodyneOutcome(value=value, angle=float(angle), mode_index=mode,
                              log_density=float(log_density))
    if not keep:
        return outcome, None
    return outcome, GaussianState(mean_cond, cov_cond)


def heterodyne(state: GaussianState, mode: int, rng: np.random.Generator):
    """Coherent-state (Husimi Q) measurement of one mode.

    Returns (complex outcome, conditional state).  The outcome density is the
    Q function of the marginal: both quadratures measured at once with one
    extra vacuum unit of noise; each quadrature component of the outcome has
    variance (marginal variance + 1/2).
    """
    if not 0 <= mode < state.n_modes:
        raise IndexError(f"mode {mode} out of range")
    keep, a, b, c = _partition_for_measurement(state, mode)
    mu = state.mean[[2 * mode, 2 * mode + 1]]
    noisy = b + VACUUM_VARIANCE * np.eye(2)
    sample = rng.multivariate_normal(mu, noisy)
    outcome = complex(sample[0], sample[1]) / math.sqrt(2.0)
    inv = np.linalg.inv(noisy)
    gain = c @ inv
    mean_cond = state.mean[keep] + gain @ (sample - mu)
    cov_cond = a - gain @ c.T
    if not keep:
        return outcome, None
    return outcome, GaussianState(mean_cond, cov_cond)


def log_negativity(state: GaussianState, partition=((0,), (1,))) -> float:
    """Logarithmic negativity of a two-mode state across a 1|1 partition.

    E_N = max(0, -log2(2 nu)) with nu the smallest symplectic eigenvalue of
    the partially transposed covariance; zero for every separable Gaussian
    state and invariant under local phase shifts and displacements.
    """
    if state.n_modes != 2 or tuple(map(len, partition)) != (1, 1):
        raise ValueError("log_negativity supports only two-mode states across a 1|1 partition")
    flip = np.diag([1.0, 1.0, 1.0, -1.0])  # time reversal (p -> -p) on the second mode
    cov_pt = flip @ state.cov @ flip
    omega = symplectic_form(2)
    eigs = np.abs(np.linalg.eigvals(1j * omega @ cov_pt))
    nu_min = float(np.min(eigs))
    return max(0.0, -math.log2(2.0 * nu_min))


def state_overlap(a: GaussianState, b: GaussianState) -> float:
    """tr(rho_a rho_b) from the Wigner-function overlap of two Gaussian states."""
    if a.n_modes != b.n_modes:
        raise ValueError("states act on different numbers of modes")
    total = a.cov + b.cov
    delta = a.mean - b.mean
    quad = float(delta @ np.linalg.solve(total, delta))
    return math.exp(-0.5 * quad) / math.sqrt(float(np.linalg.det(total)))


def fidelity_to_coherent(state: GaussianState, alpha: complex) -> float:
    """<alpha| rho |alpha> for a single-mode state; 1 iff state == coherent(alpha)."""
    if state.n_modes != 1:
        raise ValueError("fidelity_to_coherent expects a single-mode state")
    return min(1.0, state_overlap(state, coherent(alpha)))
