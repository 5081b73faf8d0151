"""Spherical-wave series for the sound-hard sphere (independent oracle)."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.special import eval_legendre, spherical_jn, spherical_yn

from ..errors import DomainError
from ..potentials.operators import FarField, _dirs
from .incident import unit_directions

__all__ = ["mie_sound_hard_sphere", "mie_coefficients"]


def mie_coefficients(radius: float, omega: float, n_max: int) -> np.ndarray:
    """a_n = -j_n'(w a) / h_n'(w a), n = 0..n_max."""
    n = np.arange(n_max + 1)
    x = omega * radius
    jp = spherical_jn(n, x, derivative=True)
    yp = spherical_yn(n, x, derivative=True)
    return -jp / (jp + 1j * yp)


def mie_sound_hard_sphere(radius: float, omega: float, d, directions, truncation: int | None = None,
                          center=(0.0, 0.0, 0.0)) -> FarField:
    """Far field u_inf(xhat) = (-i/w) sum_n (2n+1) a_n P_n(xhat.d) of a
    sound-hard sphere, for the convention u^s ~ u_inf exp(i w r)/r."""
    if radius <= 0 or omega <= 0:
        raise DomainError("radius and omega must be positive")
    d = unit_directions(d)
    grid = _dirs(directions)
    x = omega * radius
    n_min = int(np.ceil(x + 10))
    if truncation is None:
        # extend until the tail is negligible
        N = n_min
        while True:
            coef = mie_coefficients(radius, omega, N)
            if abs((2 * N + 1) * coef[-1]) / omega < 1e-16 or N > 10 * n_min + 200:
                break
            N += 5
    else:
        N = int(truncation)
        if N < 0:
            raise DomainError("truncation must be nonnegative")
        coef = mie_coefficients(radius, omega, N)
        if N < n_min:
            warnings.warn(f"truncation {N} below w a + 10; last term {abs((2 * N + 1) * coef[-1]) / omega:.2e}",
                          RuntimeWarning, stacklevel=2)
    n = np.arange(N + 1)
    dd = np.atleast_2d(d)
    c = np.asarray(center, float)
    cosg = np.clip(grid.directions @ dd.T, -1.0, 1.0)
    P = eval_legendre(n[:, None, None], cosg[None])
    u = (-1j / omega) * np.tensordot((2 * n + 1) * coef, P, axes=(0, 0))
    # translation phase for an off-origin sphere
    u = u * np.exp(1j * omega * (dd @ c)[None, :] - 1j * omega * (grid.directions @ c)[:, None])
    if np.ndim(d) == 1:
        u = u[:, 0]
    return FarField(grid, d, u)
