"""Curve quadrature and the thin sound-hard tube far field."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DomainError
from ..geometry.curves import GeneratingCurve
from ..numerics import gauss_legendre, periodic_trapezoid
from ..solvers.incident import unit_directions

__all__ = ["CurveQuadrature", "curve_quadrature", "thin_soundhard_farfield", "THIN_VARIANTS"]

THIN_VARIANTS = ("corrected", "literal")


@dataclass(frozen=True, eq=False)
class CurveQuadrature:
    """Gauss-Legendre panels in arc length with frames and theta rings."""

    curve: GeneratingCurve
    t: np.ndarray
    weights: np.ndarray
    points: np.ndarray
    T: np.ndarray
    N1: np.ndarray
    N2: np.ndarray
    theta: np.ndarray
    theta_weights: np.ndarray

    @property
    def length(self) -> float:
        return float(self.weights.sum())

    def ring_normals(self) -> np.ndarray:
        """nu(t_i, theta_k) = cos N1 + sin N2, shape (n_t, n_theta, 3)."""
        c, s = np.cos(self.theta), np.sin(self.theta)
        return c[None, :, None] * self.N1[:, None, :] + s[None, :, None] * self.N2[:, None, :]


def curve_quadrature(curve: GeneratingCurve, n_panels: int = 8, order: int = 8, n_theta: int = 16) -> CurveQuadrature:
    if n_panels < 1 or order < 1 or n_theta < 3:
        raise ConfigError("degenerate curve quadrature")
    g, gw = gauss_legendre(order)
    br = np.linspace(0.0, curve.length, n_panels + 1)
    h = 0.5 * np.diff(br)
    t = (0.5 * (br[:-1] + br[1:])[:, None] + h[:, None] * g[None, :]).ravel()
    w = (h[:, None] * gw[None, :]).ravel()
    pts = np.array([curve.position(ti) for ti in t])
    frames = [curve.frame(ti) for ti in t]
    T = np.array([f[0] for f in frames])
    N1 = np.array([f[1] for f in frames])
    N2 = np.array([f[2] for f in frames])
    th, thw = periodic_trapezoid(n_theta)
    return CurveQuadrature(curve, t, w, pts, T, N1, N2, th, thw)


def thin_soundhard_farfield(cq: CurveQuadrature, delta: float, omega: float, d, xhat,
                            variant: str = "corrected", amplitude: complex = 1.0) -> np.ndarray:
    """delta^2 far field of a thin sound-hard tube with hemispherical caps.

    Per unit length of the generator (q = d - xhat, P the normal-plane projector):
      facade dipole   (delta w)^2/2 (P xhat).(P d) exp(i w q.z)
      normal Laplacian -(delta w)^2 c |P d|^2 exp(i w q.z),  c = 1/4 (corrected) or 1/2 (literal)
    and at the ends, with hemisphere flux pi T,
      (i w delta^2/4) [(d.T(L)) exp(i w q.Q0) - (d.T(0)) exp(i w q.P0)].
    Returns shape (n_xhat,) for one d or (n_xhat, n_d).
    """
    if variant not in THIN_VARIANTS:
        raise ConfigError(f"variant must be one of {THIN_VARIANTS}")
    if delta <= 0 or omega < 0:
        raise DomainError("delta must be positive and omega nonnegative")
    d = unit_directions(d)
    dd = np.atleast_2d(d)
    xh = np.atleast_2d(np.asarray(xhat, float))
    c = 0.25 if variant == "corrected" else 0.5
    z, T, w = cq.points, cq.T, cq.weights
    dT = dd @ T.T  # (n_d, n_t)
    xT = xh @ T.T  # (n_x, n_t)
    xd = xh @ dd.T  # (n_x, n_d)
    # (P xhat).(P d) = xhat.d - (xhat.T)(d.T);  |P d|^2 = 1 - (d.T)^2
    perp = xd[:, :, None] - xT[:, None, :] * dT[None, :, :]
    dperp2 = 1.0 - dT**2
    phase = np.exp(1j * omega * ((dd @ z.T)[None, :, :] - (xh @ z.T)[:, None, :]))
    integrand = 0.5 * perp - c * dperp2[None, :, :]
    u = (delta * omega) ** 2 * np.sum(integrand * phase * w, axis=-1)
    curve = cq.curve
    P0, Q0 = curve.P0, curve.Q0
    TP, TQ = curve.tangent(0.0), curve.tangent(curve.length)
    eP = np.exp(1j * omega * ((dd @ P0)[None, :] - (xh @ P0)[:, None]))
    eQ = np.exp(1j * omega * ((dd @ Q0)[None, :] - (xh @ Q0)[:, None]))
    u = u + 0.25j * omega * delta**2 * ((dd @ TQ)[None, :] * eQ - (dd @ TP)[None, :] * eP)
    u = amplitude * u
    if np.ndim(d) == 1:
        u = u[:, 0]
    if np.ndim(xhat) == 1:
        u = u[0]
    return u
