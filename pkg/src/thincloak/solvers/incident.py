"""Plane-wave incident fields."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError

__all__ = ["plane_wave", "plane_wave_normal_derivative", "unit_directions"]


def unit_directions(d) -> np.ndarray:
    """Validate one direction (3,) or a stack (m, 3) of unit vectors."""
    d = np.asarray(d, float)
    dd = np.atleast_2d(d)
    if dd.shape[-1] != 3 or not np.allclose(np.linalg.norm(dd, axis=1), 1.0, atol=1e-12):
        raise DomainError("incident directions must be unit vectors in R^3")
    return d


def plane_wave(omega: float, d, x) -> np.ndarray:
    """exp(i w x.d); for a stack of directions the result is (n_points, m)."""
    d = unit_directions(d)
    return np.exp(1j * omega * (np.asarray(x, float) @ d.T))


def plane_wave_normal_derivative(omega: float, d, x, nu) -> np.ndarray:
    d = unit_directions(d)
    return 1j * omega * (np.asarray(nu, float) @ d.T) * plane_wave(omega, d, x)
