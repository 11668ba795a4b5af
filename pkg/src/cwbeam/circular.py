"""Circular statistics for angle-valued data (phases in radians)."""

from __future__ import annotations

import math

import numpy as np

_UNIFORM_RESULTANT = 1e-12


def wrap_angle(angle):
    """Wrap to (-pi, pi]."""
    wrapped = np.mod(np.asarray(angle, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    wrapped = np.where(wrapped == -np.pi, np.pi, wrapped)
    return float(wrapped) if np.isscalar(angle) or np.ndim(angle) == 0 else wrapped


def resultant(angles, weights=None) -> complex:
    """Weighted mean of unit phasors e^{i angle}."""
    phasors = np.exp(1j * np.asarray(angles, dtype=float))
    if weights is None:
        return complex(phasors.mean())
    weights = np.asarray(weights, dtype=float)
    return complex(np.sum(weights * phasors) / np.sum(weights))


def circular_mean(angles, weights=None) -> float:
    return float(np.angle(resultant(angles, weights)))


def circular_std(angles, weights=None) -> float:
    """sqrt(-2 ln R); infinite for a uniform (zero-resultant) distribution."""
    r = abs(resultant(angles, weights))
    if r < _UNIFORM_RESULTANT:
        return math.inf
    if r >= 1.0:
        return 0.0
    return math.sqrt(-2.0 * math.log(r))


def circular_moment(angles, weights=None, order: int = 1) -> complex:
    """Weighted E[e^{i * order * angle}]."""
    return resultant(np.asarray(angles, dtype=float) * order, weights)
