"""Bayesian conditioning on the unknown packet phase (optionally amplitude).

Measurements on some packets update a discretized posterior over the shared
phase phi; the predictive state for unmeasured packets is the posterior-
weighted phase mixture of coherent packets.  As records accumulate the
posterior concentrates and the predictive state collapses onto a *coherent*
state, never a number state: exchangeable trains leave no other option.

Support is restricted to the coherent family {|alpha0 e^{i phi}>}, with an
optional coarse grid over the amplitude |alpha0|; weights live in log domain
so thousands of records cannot underflow.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .circular import circular_mean, circular_std, wrap_angle
from .fock import FockDensityMatrix, coherent_amplitudes
from .laser import LaserParams, ideal_packet_amplitude

DEFAULT_GRID = 1024
POSTERIOR_FORMAT = "cwbeam-posterior"
POSTERIOR_VERSION = 1

HOMODYNE = "homodyne"
HETERODYNE = "heterodyne"


@dataclass(frozen=True)
class RecordEntry:
    """One measurement on one packet."""

    packet: int
    kind: str
    value: complex
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in (HOMODYNE, HETERODYNE):
            raise ValueError(f"unknown measurement kind {self.kind!r}")
        if not (math.isfinite(self.value.real if isinstance(self.value, complex) else self.value)
                and math.isfinite(complex(self.value).imag) and math.isfinite(self.angle)):
            raise ValueError("non-finite measurement entry")
        if self.kind == HOMODYNE and complex(self.value).imag != 0.0:
            raise ValueError("homodyne outcomes are real")


@dataclass(frozen=True)
class MeasurementRecord:
    """Ordered measurement outcomes; each packet is consumed at most once."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        packets = [e.packet for e in entries]
        if len(set(packets)) != len(packets):
            raise ValueError("duplicate packet index in measurement record")
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)

    def __add__(self, other: "MeasurementRecord") -> "MeasurementRecord":
        return MeasurementRecord(self.entries + other.entries)


def homodyne_entry(packet: int, value: float, angle: float) -> RecordEntry:
    return RecordEntry(packet=packet, kind=HOMODYNE, value=float(value), angle=float(angle))

def heterodyne_entry(packet: int, value: complex) -> RecordEntry:
    return RecordEntry(packet=packet, kind=HETERODYNE, value=complex(value))


class Posterior:
    """Discrete distribution over the packet phase (times an optional amplitude grid).

    `log_weights` has shape (grid,) for a phase-only posterior and
    (amp_grid, grid) for a joint one; normalization happens in log domain.
    """

    __slots__ = ("grid", "log_weights", "amp_grid")

    def __init__(self, grid, log_weights, amp_grid=None):
        grid = np.asarray(grid, dtype=float)
        log_weights = np.asarray(log_weights, dtype=float)
        expected = (grid.size,) if amp_grid is None else (len(amp_grid), grid.size)
        if log_weights.shape != expected:
            raise ValueError(f"log_weights shape {log_weights.shape}, expected {expected}")
        norm = _logsumexp(log_weights.reshape(-1))
        if not math.isfinite(norm):
            raise ValueError("posterior weights are degenerate")
        self.grid = grid
        self.log_weights = log_weights - norm
        self.amp_grid = None if amp_grid is None else np.asarray(amp_grid, dtype=float)

    # -- distributions ----------------------------------------------------

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

    def phase_weights(self) -> np.ndarray:
        w = self.weights
        return w if self.amp_grid is None else w.sum(axis=0)

    def amplitude_weights(self) -> np.ndarray:
        if self.amp_grid is None:
            raise ValueError("posterior has no amplitude grid")
        return self.weights.sum(axis=1)

    # -- summaries ----------------------------------------------------------

    def circular_mean(self) -> float:
        return circular_mean(self.grid, self.phase_weights())

    def circular_std(self) -> float:
        return circular_std(self.grid, self.phase_weights())

    def entropy(self) -> float:
        """Shannon entropy (nats) of the discrete posterior."""
        w = self.weights.reshape(-1)
        nz = w[w > 0.0]
        return float(-np.sum(nz * np.log(nz)))

    def circular_moment(self, order: int) -> complex:
        return complex(np.sum(self.phase_weights() * np.exp(1j * order * self.grid)))

    # -- serialization ------------------------------------------------------

    def to_json(self, path, metadata=None):
        payload = {
            "format": POSTERIOR_FORMAT,
            "version": POSTERIOR_VERSION,
            "grid": self.grid.tolist(),
            "log_weights": self.log_weights.tolist(),
            "amp_grid": None if self.amp_grid is None else self.amp_grid.tolist(),
            "metadata": metadata or {},
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)

    @classmethod
    def from_json(cls, path) -> "Posterior":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("format") != POSTERIOR_FORMAT:
            raise ValueError(f"not a posterior file: {path}")
        return cls(payload["grid"], payload["log_weights"], payload.get("amp_grid"))


def _logsumexp(values: np.ndarray) -> float:
    top = float(np.max(values))
    if not math.isfinite(top):
        return top
    return top + math.log(float(np.sum(np.exp(values - top))))


def uniform_prior(grid_size: int = DEFAULT_GRID, amp_grid=None) -> Posterior:
    """Flat prior on [0, 2pi) (times a flat amplitude grid when given)."""
    if grid_size < 8:
        raise ValueError("phase grid needs at least 8 points")
    grid = 2.0 * math.pi * np.arange(grid_size) / grid_size
    if amp_grid is None:
        return Posterior(grid, np.zeros(grid_size))
    return Posterior(grid, np.zeros((len(amp_grid), grid_size)), amp_grid=amp_grid)


def _log_likelihood(entry: RecordEntry, amp, grid: np.ndarray) -> np.ndarray:
    """Log density of one outcome given packet amplitude amp * e^{i phi}.

    Homodyne at LO angle theta on a coherent packet: Gaussian with mean
    sqrt(2) amp cos(phi - theta), variance 1/2.  Heterodyne: complex Gaussian
    centered on the amplitude with one unit of quadrature noise (the Q
    function), i.e. log density -|m - amp e^{i phi}|^2 up to a constant.
    """
    amp = np.asarray(amp, dtype=float).reshape(-1, 1)
    if entry.kind == HOMODYNE:
        mean = math.sqrt(2.0) * amp * np.cos(grid[None, :] - entry.angle)
        return -((entry.value.real - mean) ** 2) - 0.5 * math.log(math.pi)
    delta = complex(entry.value) - amp * np.exp(1j * grid[None, :])
    return -np.abs(delta) ** 2 - math.log(math.pi)


def update(posterior: Posterior, record: MeasurementRecord, params: LaserParams) -> Posterior:
    """Condition the posterior on a measurement record.

    Likelihoods factorize over entries, so updates commute and batching a
    record equals chaining its pieces.
    """
    for entry in record.entries:
        if entry.packet >= params.n_packets:
            raise ValueError(f"record references packet {entry.packet} beyond {params.n_packets}")
    amps = (np.array([ideal_packet_amplitude(params)]) if posterior.amp_grid is None
            else posterior.amp_grid)
    extra = np.zeros((amps.size, posterior.grid.size))
    for entry in record.entries:
        extra += _log_likelihood(entry, amps, posterior.grid)
    if posterior.amp_grid is None:
        return Posterior(posterior.grid, posterior.log_weights + extra[0])
    return Posterior(posterior.grid, posterior.log_weights + extra, amp_grid=posterior.amp_grid)


@dataclass(frozen=True)
class PredictiveState:
    """Posterior-predictive assignment for unmeasured packets."""

    single_packet: FockDensityMatrix
    m_packets: int
    _grid: np.ndarray
    _weights: np.ndarray
    _amps: np.ndarray

    def sample_packets(self, rng: np.random.Generator) -> np.ndarray:
        """Draw one (phi, amp) from the posterior; all m packets share it."""
        j = rng.choice(self._weights.size, p=self._weights)
        amp = self._amps[j // self._grid.size] * np.exp(1j * self._grid[j % self._grid.size])
        return np.full(self.m_packets, amp)


def predictive_state(posterior: Posterior, m_packets: int, cutoff: int,
                     packet_amplitude: float | None = None) -> PredictiveState:
    """Posterior-weighted phase mixture of coherent packets.

    A flat posterior reproduces the Poisson mixture; a concentrated one
    approaches a pure coherent state at the circular mean.
    """
    if m_packets < 1:
        raise ValueError("need at least one predicted packet")
    if posterior.amp_grid is None:
        if packet_amplitude is None:
            raise ValueError("packet_amplitude is required for a phase-only posterior")
        amps = np.array([float(packet_amplitude)])
        weights = posterior.weights[None, :]
    else:
        amps = posterior.amp_grid
        weights = posterior.weights
    grid = posterior.grid
    rho = np.zeros((cutoff, cutoff), dtype=complex)
    tail = 0.0
    n = np.arange(cutoff)
    for i, amp in enumerate(amps):
        base = coherent_amplitudes(amp, cutoff)
        tail_i = 1.0 - float(np.vdot(base, base).real)
        vectors = base[None, :] * np.exp(1j * np.outer(grid, n))   # (G, cutoff)
        # sum_j w_j |v_j><v_j| with row vectors v_j
        rho += vectors.T @ (weights[i][:, None] * vectors.conj())
        tail += float(weights[i].sum()) * max(tail_i, 0.0)
    rho = 0.5 * (rho + rho.conj().T)
    single = FockDensityMatrix(rho, 1, cutoff, tail_mass=tail)
    return PredictiveState(single_packet=single, m_packets=m_packets, _grid=grid,
                           _weights=weights.reshape(-1) / weights.sum(), _amps=amps)


def concentration_metrics(posterior: Posterior) -> dict:
    """Circular mean/std plus entropy; the posterior's degree of collapse."""
    return {
        "circular_mean": posterior.circular_mean(),
        "circular_std": posterior.circular_std(),
        "entropy": posterior.entropy(),
    }


def central_interval(posterior: Posterior, mass: float = 0.9):
    """Central credible interval (lo, hi) as offsets from the circular mean."""
    if not 0.0 < mass < 1.0:
        raise ValueError("mass must be in (0, 1)")
    offsets = wrap_angle(posterior.grid - posterior.circular_mean())
    order = np.argsort(offsets)
    sorted_offsets = offsets[order]
    cdf = np.cumsum(posterior.phase_weights()[order])
    lo = float(sorted_offsets[np.searchsorted(cdf, 0.5 * (1.0 - mass))])
    hi = float(sorted_offsets[min(np.searchsorted(cdf, 0.5 * (1.0 + mass)), cdf.size - 1)])
    return lo, hi


def sharpened(posterior: Posterior, threshold: float = 0.05) -> Posterior:
    """Replace a concentrated posterior by a wrapped Gaussian at its circular mean.

    The idealization of a sharp phase measurement: once the circular std
    drops below `threshold` the posterior is treated as a clean peak.  Wider
    posteriors pass through unchanged.
    """
    std = posterior.circular_std()
    if not std < threshold:
        return posterior
    mean = posterior.circular_mean()
    offsets = posterior.grid[None, :] - mean + 2.0 * math.pi * np.arange(-3, 4)[:, None]
    log_w = _logsumexp_rows(-0.5 * (offsets / std) ** 2)
    return Posterior(posterior.grid, log_w)


def _logsumexp_rows(values: np.ndarray) -> np.ndarray:
    top = values.max(axis=0)
    return top + np.log(np.exp(values - top[None, :]).sum(axis=0))


def relative_phase_posterior(a: Posterior, b: Posterior) -> Posterior:
    """Posterior over the phase difference (phase_b - phase_a).

    Circular correlation of the two phase marginals, computed exactly on the
    shared grid with an FFT.
    """
    if a.grid.size != b.grid.size or np.max(np.abs(a.grid - b.grid)) > 1e-12:
        raise ValueError("posteriors must share one phase grid")
    wa = a.phase_weights()
    wb = b.phase_weights()
    corr = np.fft.ifft(np.fft.fft(wb) * np.conj(np.fft.fft(wa))).real
    corr = np.clip(corr, 1e-300, None)
    return Posterior(a.grid, np.log(corr))
