"""Reduced facade operators on theta-ring densities of the generating curve."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, QuadratureError
from .curve import CurveQuadrature

__all__ = ["ReducedOperators", "reduced_curve_operators"]


@dataclass(frozen=True, eq=False)
class ReducedOperators:
    """Matrices on densities indexed (t_i, theta_a), t-major."""

    kstar: np.ndarray
    S: np.ndarray
    exclusion: float

    def apply(self, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.kstar @ phi, self.S @ phi


def reduced_curve_operators(cq: CurveQuadrature, omega: float, exclusion: float | None = None) -> ReducedOperators:
    """(K_Sf)* and S_Sf with measure d(theta) dt.

    K kernel: (<z_x - z_y, nu_x>/r^3 - i w <z_x - z_y, nu_x>/r^2) exp(i w r)/(4 pi),  r = |z_x - z_y|
    S kernel: -exp(i w r)/(4 pi r).
    Pairs with |t_x - t_y| <= exclusion are dropped (symmetric exclusion about
    the diagonal). The S kernel is not integrable in t at the diagonal, so the
    result depends on the exclusion width; the default keeps only distinct
    curve nodes.
    """
    if omega < 0:
        raise DomainError("omega must be nonnegative")
    t = cq.t
    if np.any(np.diff(np.sort(t)) <= 0):
        raise QuadratureError("coincident curve nodes")
    h = 0.5 * float(np.min(np.diff(np.sort(t)))) if exclusion is None else float(exclusion)
    nt, nth = len(t), len(cq.theta)
    nu = cq.ring_normals().reshape(nt * nth, 3)
    dz = cq.points[:, None, :] - cq.points[None, :, :]  # (i, j, 3)
    r = np.linalg.norm(dz, axis=-1)
    keep = np.abs(t[:, None] - t[None, :]) > h
    with np.errstate(divide="ignore", invalid="ignore"):
        e = np.exp(1j * omega * r)
        g1 = np.where(keep, (1.0 - 1j * omega * r) * e / (4 * np.pi * r**3), 0.0)
        g0 = np.where(keep, -e / (4 * np.pi * r), 0.0)
    w = cq.weights
    thw = cq.theta_weights
    # <z_i - z_j, nu_(i,a)>
    proj = np.einsum("ijk,iak->iaj", dz, nu.reshape(nt, nth, 3))
    K = (g1[:, None, :] * proj)[:, :, :, None] * (w[None, None, :, None] * thw[None, None, None, :])
    S = np.broadcast_to((g0 * w[None, :])[:, None, :, None] * thw[None, None, None, :], (nt, nth, nt, nth))
    return ReducedOperators(K.reshape(nt * nth, nt * nth), np.ascontiguousarray(S).reshape(nt * nth, nt * nth), h)
