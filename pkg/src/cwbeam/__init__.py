"""cwbeam: a continuous-wave laser beam as a train of phase-correlated coherent packets.

The beam model treats equal-duration temporal slices of a CW laser as discrete
modes sharing one unknown global phase (plus a slow phase random walk for a
diffusing laser).  Two engines back the simulations: an exact Gaussian engine
(`cwbeam.gaussian`) and a truncated number-basis engine (`cwbeam.fock`) used
as a brute-force oracle.  `cwbeam.laser` builds packet-train ensembles,
`cwbeam.inference` carries the Bayesian phase posterior, and
`cwbeam.scenarios` runs the executable experiments exposed by the CLI.
"""

__version__ = "0.1.0"

from .gaussian import GaussianState, SymplecticOp
from .fock import FockDensityMatrix
from .laser import LaserParams, PhaseEnsemble, PhaseSample
from .inference import MeasurementRecord, Posterior

__all__ = [
    "__version__",
    "GaussianState",
    "SymplecticOp",
    "FockDensityMatrix",
    "LaserParams",
    "PhaseEnsemble",
    "PhaseSample",
    "MeasurementRecord",
    "Posterior",
]
