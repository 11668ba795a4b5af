"""The propagating beam as a train of coherent packets sharing a random phase.

A CW laser far above threshold emits light whose duration-T slices behave as
discrete modes, each in the same coherent state of amplitude
sqrt(kappa T) * alpha * e^{i phi} with phi unknown and uniform.  A diffusing
laser adds a slow phase random walk: packet n carries phase
phi + sum_{k<=n} eps_k with independent Gaussian increments eps_k of
variance 2 D T, and its amplitude magnitude shrinks by the modulus of the
intra-packet average of e^{i eta(t)}.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import gaussian
from .fock import FockDensityMatrix, coherent_fock, mixture
from .rng import substream

ENSEMBLE_FORMAT = "cwbeam-phase-ensemble"
ENSEMBLE_VERSION = 1

DEFAULT_SUBSTEPS = 32
_DIFFUSION_LIMIT = 0.1   # D*T below this keeps the per-packet picture valid


@dataclass(frozen=True)
class LaserParams:
    """Physical knobs of the packet-train model.

    alpha_mag is the dimensionless intracavity amplitude |alpha|, kappa the
    cavity decay rate, T the packet duration, D the phase diffusion constant
    (the linewidth), n_packets the number of slices kept.  omega0 and
    cavity_roundtrip only feed validity checks: T must exceed an optical
    period and a cavity round trip for the slicing to make sense.
    """

    alpha_mag: float
    kappa: float = 1.0
    T: float = 1.0
    D: float = 0.0
    n_packets: int = 1
    z0_over_c: float = 0.0
    omega0: float = 1e8
    cavity_roundtrip: float = 1e-6

    def __post_init__(self):
        if self.alpha_mag < 0:
            raise ValueError("alpha_mag must be nonnegative")
        if self.kappa <= 0 or self.T <= 0:
            raise ValueError("kappa and T must be positive")
        if self.D < 0:
            raise ValueError("D must be nonnegative")
        if self.n_packets < 1:
            raise ValueError("need at least one packet")
        if self.omega0 <= 0 or self.cavity_roundtrip <= 0:
            raise ValueError("omega0 and cavity_roundtrip must be positive")
        if self.D * self.T >= _DIFFUSION_LIMIT:
            raise ValueError(
                f"D*T = {self.D * self.T:.3g} >= {_DIFFUSION_LIMIT}: packets must be much "
                "shorter than the diffusion time for the packet-train state to hold")
        if self.T <= self.cavity_roundtrip or self.T <= 1.0 / self.omega0:
            warnings.warn("packet duration T should exceed both the cavity round trip "
                          "and 1/omega0", stacklevel=2)


def ideal_packet_amplitude(params: LaserParams) -> float:
    """Noiseless per-packet amplitude magnitude sqrt(kappa T) |alpha|."""
    return math.sqrt(params.kappa * params.T) * params.alpha_mag


@dataclass(frozen=True)
class PhaseSample:
    """One realization of the train: global phase, increments, packet amplitudes.

    epsilons[0] is 0 by convention (packet 0 carries the bare phase phi);
    epsilons[k] is the phase step from packet k-1 to packet k.  The vector is
    empty for a noiseless laser.
    """

    phi: float
    epsilons: np.ndarray
    packet_amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "epsilons", np.asarray(self.epsilons, dtype=float))
        object.__setattr__(self, "packet_amplitudes", np.asarray(self.packet_amplitudes, dtype=complex))
        self.epsilons.setflags(write=False)
        self.packet_amplitudes.setflags(write=False)

    @property
    def n_packets(self) -> int:
        return self.packet_amplitudes.size


@dataclass(frozen=True)
class PhaseEnsemble:
    """Equal-weight samples of the train; the sampled form of the beam's mixed state."""

    samples: tuple
    params: LaserParams
    rng_seed: int
    mode: str = "monte_carlo"

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    def phases(self) -> np.ndarray:
        return np.array([s.phi for s in self.samples])

    def packet_amplitudes(self, packet: int) -> np.ndarray:
        return np.array([s.packet_amplitudes[packet] for s in self.samples])

    # -- serialization (one sample per line, versioned header) ------------

    def to_jsonl(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            header = {
                "format": ENSEMBLE_FORMAT,
                "version": ENSEMBLE_VERSION,
                "mode": self.mode,
                "rng_seed": self.rng_seed,
                "params": {k: getattr(self.params, k) for k in (
                    "alpha_mag", "kappa", "T", "D", "n_packets",
                    "z0_over_c", "omega0", "cavity_roundtrip")},
            }
            fh.write(json.dumps(header) + "\n")
            for s in self.samples:
                amps = [[a.real, a.imag] for a in s.packet_amplitudes]
                fh.write(json.dumps({"phi": s.phi, "epsilons": list(s.epsilons),
                                     "amplitudes": amps}) + "\n")

    @classmethod
    def from_jsonl(cls, path) -> "PhaseEnsemble":
        with open(path, encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header.get("format") != ENSEMBLE_FORMAT:
                raise ValueError(f"not a phase-ensemble file: {path}")
            if header.get("version") != ENSEMBLE_VERSION:
                raise ValueError(f"unsupported ensemble version {header.get('version')}")
            params = LaserParams(**header["params"])
            samples = []
            for line in fh:
                row = json.loads(line)
                amps = np.array([complex(re, im) for re, im in row["amplitudes"]])
                samples.append(PhaseSample(phi=row["phi"],
                                           epsilons=np.array(row["epsilons"]),
                                           packet_amplitudes=amps))
        return cls(samples=tuple(samples), params=params,
                   rng_seed=header["rng_seed"], mode=header["mode"])


# ----------------------------------------------------------------------
# Sampling
# ----------------------------------------------------------------------

def _noiseless_sample(params: LaserParams, phi: float) -> PhaseSample:
    amp = ideal_packet_amplitude(params) * np.exp(1j * phi)
    return PhaseSample(phi=float(phi), epsilons=np.zeros(0),
                       packet_amplitudes=np.full(params.n_packets, amp))


def sample_phase_path(params: LaserParams, substeps: int = DEFAULT_SUBSTEPS,
                      rng: np.random.Generator | None = None, phi: float | None = None) -> PhaseSample:
    """Draw one train realization.

    The cavity phase eta(t) is a Wiener process with increment variance
    2 D dt, the unique Gaussian Markov process reproducing the field
    correlator <a^dag(t) a(0)> = alpha^2 exp(-D t).  Per-packet increments
    eps_k are eta differences between consecutive packet centers (variance
    exactly 2 D T); amplitude magnitudes come from the discretized
    intra-packet average of e^{i eta(t)}, which is what shaves light off
    into the neighbouring, almost-empty modes.
    """
    if substeps < 8:
        raise ValueError("need at least 8 substeps per packet")
    if rng is None and (phi is None or params.D > 0):
        raise ValueError("an rng is required unless D == 0 and phi is given")
    if phi is None:
        phi = rng.uniform(0.0, 2.0 * math.pi)
    if params.D == 0.0:
        return _noiseless_sample(params, phi)

    n = params.n_packets
    dt = params.T / substeps
    steps = rng.normal(0.0, math.sqrt(2.0 * params.D * dt), size=n * substeps)
    eta = np.empty(n * substeps + 1)
    eta[0] = 0.0
    np.cumsum(steps, out=eta[1:])

    centers = np.arange(n) * substeps + substeps // 2
    eps = np.zeros(n)
    eps[1:] = np.diff(eta[centers])
    if np.any(np.abs(eps) > math.pi):
        raise RuntimeError(
            "phase wound by more than pi within one packet; D*T is too large for "
            "the principal-branch increment extraction")

    grid = eta[:-1].reshape(n, substeps)
    packet_integrals = np.exp(1j * grid).mean(axis=1)
    magnitudes = ideal_packet_amplitude(params) * np.abs(packet_integrals)
    phases = phi + np.cumsum(eps)
    return PhaseSample(phi=float(phi), epsilons=eps,
                       packet_amplitudes=magnitudes * np.exp(1j * phases))


def build_ensemble(params: LaserParams, n_samples: int, mode: str = "monte_carlo",
                   seed: int = 0, substeps: int = DEFAULT_SUBSTEPS) -> PhaseEnsemble:
    """Sample the beam's state: n_samples independent train realizations.

    In "grid" mode (noiseless lasers only) the phases are the deterministic
    uniform grid 2 pi k / n_samples, which turns phase averages into exact
    discrete Fourier sums.  In "monte_carlo" mode each sample draws from an
    independent substream keyed by its index, so results do not depend on
    evaluation order.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    if mode not in ("monte_carlo", "grid"):
        raise ValueError(f"unknown ensemble mode {mode!r}")
    if mode == "grid":
        if params.D > 0:
            raise ValueError("grid mode requires a noiseless laser (D = 0)")
        samples = tuple(_noiseless_sample(params, 2.0 * math.pi * k / n_samples)
                        for k in range(n_samples))
        return PhaseEnsemble(samples=samples, params=params, rng_seed=int(seed), mode="grid")
    samples = tuple(sample_phase_path(params, substeps=substeps, rng=substream(seed, k))
                    for k in range(n_samples))
    return PhaseEnsemble(samples=samples, params=params, rng_seed=int(seed), mode="monte_carlo")


def marginal_packet_state_fock(ensemble: PhaseEnsemble, packet: int, cutoff: int) -> FockDensityMatrix:
    """Single-packet reduced state: the sample average of coherent projectors.

    For a noiseless grid ensemble this reproduces the Poisson mixture exactly;
    a single sample is a pure coherent state.
    """
    if not 0 <= packet < ensemble.params.n_packets:
        raise IndexError(f"packet {packet} out of range")
    states = [coherent_fock(a, cutoff) for a in ensemble.packet_amplitudes(packet)]
    return mixture(states, np.full(len(states), 1.0 / len(states)))


# ----------------------------------------------------------------------
# Spatial splitting
# ----------------------------------------------------------------------

def _split_tree(state, lo: int, n_ways: int):
    """Recursively split the carrier at mode `lo` into n_ways equal pieces."""
    if n_ways == 1:
        return state
    left = n_ways // 2
    # transmitted port keeps `left` shares, reflected port carries the rest
    op = gaussian.beamsplitter(left / n_ways)
    state = gaussian.apply_symplectic(state, op, [lo, lo + left])
    state = _split_tree(state, lo, left)
    return _split_tree(state, lo + left, n_ways - left)


def spatial_split_equivalence(params: LaserParams, n_ways: int, n_samples: int,
                              mode: str = "grid", seed: int = 0) -> PhaseEnsemble:
    """Divide one bright packet into n_ways equal spatial modes with beamsplitters.

    Feeding a packet of amplitude sqrt(n_ways) alpha_0 e^{i phi} through a
    balanced splitter tree (unbalanced transmittances make up the difference
    when n_ways is not a power of two) leaves every output mode in the
    coherent state alpha_0 e^{i phi}: the same per-mode ensemble as the
    temporal packet train with the same shared phase.
    """
    if params.D > 0:
        raise ValueError("spatial splitting is defined for the noiseless laser")
    if n_ways < 1:
        raise ValueError("n_ways must be positive")
    source = build_ensemble(replace(params, n_packets=1), n_samples, mode=mode, seed=seed)
    alpha0 = ideal_packet_amplitude(params)
    samples = []
    for s in source.samples:
        bright = gaussian.coherent(math.sqrt(n_ways) * alpha0 * np.exp(1j * s.phi))
        state = gaussian.tensor(bright, *(gaussian.vacuum() for _ in range(n_ways - 1)))
        state = _split_tree(state, 0, n_ways)
        amps = np.array([state.mode_mean(m) for m in range(n_ways)])
        samples.append(PhaseSample(phi=s.phi, epsilons=np.zeros(0), packet_amplitudes=amps))
    out_params = replace(params, n_packets=n_ways)
    return PhaseEnsemble(samples=tuple(samples), params=out_params,
                         rng_seed=int(seed), mode=mode)
