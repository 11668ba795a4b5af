"""Executable experiments on the packet-train laser model.

Each scenario is a deterministic function of (laser parameters, scenario
config, seed) returning a ScenarioResult with per-sample records, summary
statistics and pass/fail claims.  Every scenario runs the claimed
configuration together with its stated control (independent lasers, a
product of mixed states, no reference light, an unlocked reference) so each
claim is tested against its negation.
"""

from __future__ import annotations

from . import atom_interference, entanglement, identities, phase_locking, squeezing, teleportation
from .base import Claim, ScenarioResult, read_csv, summarize

# name -> (module, one-line description of the claim it tests); stable order
REGISTRY = {
    "identities": (
        identities,
        "phase-averaging identities: coherent mixture = Poisson mixture; averaged "
        "squeezed states are number-diagonal, classical and unentangled",
    ),
    "phase_locking": (
        phase_locking,
        "two independent beams lock to a random but persistent phase difference; "
        "a product of mixed states does not, and diffusion unlocks it at rate D*T",
    ),
    "atom_interference": (
        atom_interference,
        "double pi/2 pulses from one beam excite an atom with certainty even though "
        "the mid-protocol atom is maximally mixed; independent beams give 1/2",
    ),
    "squeezing": (
        squeezing,
        "a phase-averaged squeezed vacuum shows no squeezing, but homodyning against "
        "the generating beam recovers the full e^(-2r)/2 variance",
    ),
    "tmss_entanglement": (
        entanglement,
        "phase-averaged two-mode squeezed light is separable, yet conditioning on "
        "bright reference light distills nearly the full entanglement locally",
    ),
    "teleportation": (
        teleportation,
        "teleportation fidelity 1/(1+e^(-2r)) independent of the beam phase with a "
        "shared reference; an unlocked verifier sees the phase-scrambled average",
    ),
}

__all__ = ["REGISTRY", "Claim", "ScenarioResult", "read_csv", "summarize",
           "atom_interference", "entanglement", "identities", "phase_locking",
           "squeezing", "teleportation"]
