"""Exact state identities behind the packet-train picture.

Three deterministic checks, all via the number-basis engine:
  * a uniform phase mixture of coherent states is the Poisson number mixture;
  * a phase-averaged squeezed vacuum is number-diagonal with no quadrature
    below the vacuum level (phase-averaging destroys squeezing);
  * a phase-averaged two-mode squeezed state carries no entanglement.
"""

from __future__ import annotations

import math

import numpy as np

from .. import fock
from ..laser import LaserParams, ideal_packet_amplitude
from .base import Claim, ScenarioResult

DEFAULT_TOLERANCES = {
    "poisson_identity": 1e-10,
    "averaged_squeezed_diagonal": 1e-10,
    "averaged_squeezed_classical": 0.5 - 1e-9,
    "averaged_tmss_negativity": 1e-10,
}


def run(params: LaserParams, seed: int = 0, cutoff: int = 40, grid_size: int = 256,
        squeeze_r: float = 0.5, squeeze_cutoff: int = 20, squeeze_grid: int = 128,
        tmss_r: float = 0.3, tmss_cutoff: int = 12, tmss_grid: int = 64,
        n_lo_angles: int = 64, tolerances: dict | None = None,
        threads: int = 1) -> ScenarioResult:
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    alpha0 = ideal_packet_amplitude(params)

    # uniform phase mixture of coherent packets == Poisson number mixture
    averaged = fock.phase_average(lambda p: fock.coherent_fock(alpha0 * np.exp(1j * p), cutoff),
                                  grid_size)
    poisson = fock.poisson_mixture(alpha0, cutoff)
    distance = fock.trace_distance(averaged, poisson)

    # phase-averaged squeezed vacuum: number-diagonal, nothing below vacuum noise
    averaged_sq = fock.phase_average(
        lambda p: fock.squeezed_vacuum_fock(squeeze_r, 2.0 * p, squeeze_cutoff), squeeze_grid)
    off_diag = fock.max_number_offdiagonal(averaged_sq)
    angles = np.pi * np.arange(n_lo_angles) / n_lo_angles
    min_variance = min(fock.quadrature_variance(averaged_sq, a) for a in angles)

    # phase-averaged two-mode squeezed state: PPT, no entanglement
    averaged_tmss = fock.phase_average(
        lambda p: fock.tmss_fock(tmss_r, p, tmss_cutoff), tmss_grid)
    negativity = fock.ppt_negativity(averaged_tmss)

    records = [
        {"check": "poisson_identity", "observed": distance, "reference": 0.0},
        {"check": "averaged_squeezed_offdiagonal", "observed": off_diag, "reference": 0.0},
        {"check": "averaged_squeezed_min_variance", "observed": min_variance, "reference": 0.5},
        {"check": "averaged_tmss_negativity", "observed": negativity, "reference": 0.0},
    ]
    claims = [
        Claim.check("poisson_identity",
                    "uniform phase mixture of coherent packets equals the Poisson mixture "
                    f"(trace distance, |alpha0|={alpha0:g}, grid {grid_size}, cutoff {cutoff})",
                    distance, tol["poisson_identity"]),
        Claim.check("averaged_squeezed_diagonal",
                    "phase-averaged squeezed vacuum is number-diagonal (max off-diagonal)",
                    off_diag, tol["averaged_squeezed_diagonal"]),
        Claim.check("averaged_squeezed_classical",
                    "phase-averaged squeezed vacuum shows no squeezing "
                    f"(min variance over {n_lo_angles} angles)",
                    min_variance, tol["averaged_squeezed_classical"], comparator=">="),
        Claim.check("averaged_tmss_negativity",
                    "phase-averaged two-mode squeezed state has zero PPT negativity",
                    negativity, tol["averaged_tmss_negativity"]),
    ]
    summary = {
        "alpha0": alpha0,
        "trace_distance_to_poisson": distance,
        "averaged_squeezed_max_offdiagonal": off_diag,
        "averaged_squeezed_min_variance": min_variance,
        "averaged_squeezed_mean_photons": fock.mean_photons(averaged_sq),
        "expected_mean_photons": math.sinh(squeeze_r) ** 2,
        "averaged_tmss_negativity": negativity,
        "tolerances": tol,
    }
    config = {"cutoff": cutoff, "grid_size": grid_size, "squeeze_r": squeeze_r,
              "squeeze_cutoff": squeeze_cutoff, "squeeze_grid": squeeze_grid,
              "tmss_r": tmss_r, "tmss_cutoff": tmss_cutoff, "tmss_grid": tmss_grid,
              "n_lo_angles": n_lo_angles, "tolerances": tol}
    return ScenarioResult(scenario="identities", config=config, records=records,
                          summary=summary, claims=claims, seed=seed)
