"""Generating curves with rotation-minimizing frames.

Every curve is parametrized by arc length t in [0, L]. The frame (T, N1, N2)
is transported without rotation about T, seeded at t = 0 by a reference
normal; along the curve N1' = -k1 T and N2' = -k2 T with k_i = T'.N_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import DomainError, GeometryError

__all__ = [
    "GeneratingCurve",
    "StraightSegment",
    "CircularArc",
    "ParametricCurve",
    "curve_eval",
    "estimate_r0",
]


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _seed_normal(T0: np.ndarray, ref: np.ndarray | None) -> np.ndarray:
    if ref is None:
        ref = np.eye(3)[int(np.argmin(np.abs(T0)))]
    ref = np.asarray(ref, float)
    n = ref - np.dot(ref, T0) * T0
    nn = np.linalg.norm(n)
    if nn < 1e-10:
        raise GeometryError("reference normal is parallel to the initial tangent")
    return n / nn


class GeneratingCurve:
    """Base class. Subclasses implement ``_position``, ``_tangent``,
    ``_tangent_derivative`` and ``_normal1`` on arrays of arc length."""

    length: float

    def _check(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        tol = 1e-12 * max(1.0, self.length)
        if np.any(t < -tol) or np.any(t > self.length + tol):
            raise DomainError(f"arc length outside [0, {self.length}]")
        return np.clip(t, 0.0, self.length)

    def position(self, t) -> np.ndarray:
        return self._position(self._check(t))

    def tangent(self, t) -> np.ndarray:
        return self._tangent(self._check(t))

    def tangent_derivative(self, t) -> np.ndarray:
        return self._tangent_derivative(self._check(t))

    def frame(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        t = self._check(t)
        T = self._tangent(t)
        N1 = self._normal1(t)
        N1 = _unit(N1 - np.sum(N1 * T, axis=-1, keepdims=True) * T)
        N2 = np.cross(T, N1)
        return T, N1, N2

    def curvature_components(self, t) -> tuple[np.ndarray, np.ndarray]:
        """(k1, k2) = (T'.N1, T'.N2)."""
        T, N1, N2 = self.frame(t)
        dT = self.tangent_derivative(t)
        return np.sum(dT * N1, axis=-1), np.sum(dT * N2, axis=-1)

    @property
    def P0(self) -> np.ndarray:
        return self.position(0.0)

    @property
    def Q0(self) -> np.ndarray:
        return self.position(self.length)

    @property
    def is_straight(self) -> bool:
        return False


def curve_eval(curve: GeneratingCurve, t: float):
    """Position and frame (T, N1, N2) at arc length t."""
    T, N1, N2 = curve.frame(t)
    return curve.position(t), (T, N1, N2)


@dataclass(eq=False)
class StraightSegment(GeneratingCurve):
    start: np.ndarray = field(default_factory=lambda: np.zeros(3))
    end: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    ref_normal: np.ndarray | None = None

    def __post_init__(self):
        self.start = np.asarray(self.start, float)
        self.end = np.asarray(self.end, float)
        d = self.end - self.start
        self.length = float(np.linalg.norm(d))
        if self.length <= 0:
            raise GeometryError("degenerate segment")
        self._T = d / self.length
        self._N1 = _seed_normal(self._T, self.ref_normal)

    @property
    def is_straight(self) -> bool:
        return True

    def _position(self, t):
        return self.start + t[..., None] * self._T

    def _tangent(self, t):
        return np.broadcast_to(self._T, t.shape + (3,)).copy()

    def _tangent_derivative(self, t):
        return np.zeros(t.shape + (3,))

    def _normal1(self, t):
        return np.broadcast_to(self._N1, t.shape + (3,)).copy()


@dataclass(eq=False)
class CircularArc(GeneratingCurve):
    """Arc of radius R in the plane spanned by (u, v) about ``center``,
    polar angle from phi0 to phi0 + angle."""

    radius: float = 2.0
    angle: float = 0.5
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    u: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    v: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    phi0: float = 0.0
    ref_normal: np.ndarray | None = None

    def __post_init__(self):
        if self.radius <= 0 or not (0 < self.angle < 2 * np.pi):
            raise GeometryError("arc needs radius > 0 and 0 < angle < 2 pi")
        self.center = np.asarray(self.center, float)
        self.u = _unit(np.asarray(self.u, float))
        v = np.asarray(self.v, float)
        self.v = _unit(v - np.dot(v, self.u) * self.u)
        self.w = np.cross(self.u, self.v)
        self.length = float(self.radius * self.angle)
        T0 = self._tangent(np.array(0.0))
        if self.ref_normal is None:
            # default: the normal pointing at the centre
            n0 = -self._radial(np.array(0.0))
        else:
            n0 = _seed_normal(T0, self.ref_normal)
        r0 = -self._radial(np.array(0.0))
        self._a = float(np.dot(n0, r0))
        self._b = float(np.dot(n0, self.w))

    def _phi(self, t):
        return self.phi0 + t / self.radius

    def _radial(self, t):
        p = self._phi(t)[..., None]
        return np.cos(p) * self.u + np.sin(p) * self.v

    def _position(self, t):
        return self.center + self.radius * self._radial(t)

    def _tangent(self, t):
        p = self._phi(t)[..., None]
        return -np.sin(p) * self.u + np.cos(p) * self.v

    def _tangent_derivative(self, t):
        return -self._radial(t) / self.radius

    def _normal1(self, t):
        # in a planar curve the rotation-minimizing frame keeps the out-of-plane
        # component fixed and turns the in-plane normal with the tangent
        return self._a * (-self._radial(t)) + self._b * self.w


class ParametricCurve(GeneratingCurve):
    """Arc-length parametrized curve from callables; frame by integrating the
    rotation-minimizing transport ODE."""

    def __init__(self, position, d1, d2, length: float, ref_normal=None, rtol: float = 1e-12):
        self._pos, self._d1, self._d2 = position, d1, d2
        self.length = float(length)
        T0 = _unit(np.asarray(d1(np.array(0.0)), float))
        n0 = _seed_normal(T0, ref_normal)

        def rhs(t, n):
            T = _unit(np.asarray(self._d1(np.array(t)), float))
            dT = np.asarray(self._d2(np.array(t)), float)
            return -np.dot(dT, n) * T

        sol = solve_ivp(rhs, (0.0, self.length), n0, method="DOP853", rtol=rtol, atol=1e-14,
                        dense_output=True)
        if not sol.success:
            raise GeometryError(f"frame integration failed: {sol.message}")
        self._sol = sol.sol

    def _position(self, t):
        return np.asarray(self._pos(t), float)

    def _tangent(self, t):
        return _unit(np.asarray(self._d1(t), float))

    def _tangent_derivative(self, t):
        return np.asarray(self._d2(t), float)

    def _normal1(self, t):
        flat = np.atleast_1d(t).ravel()
        n = self._sol(flat).T
        return n.reshape(np.shape(t) + (3,))


def estimate_r0(curve: GeneratingCurve, samples: int = 400) -> float:
    """Conservative non-self-intersection radius: the smaller of the inverse
    maximal curvature and half the closest approach of arc-distant samples."""
    t = np.linspace(0.0, curve.length, samples)
    dT = curve.tangent_derivative(t)
    kmax = float(np.max(np.linalg.norm(dT, axis=-1)))
    r_curv = np.inf if kmax < 1e-14 else 1.0 / kmax
    sep = np.pi * r_curv
    if sep >= curve.length:
        return float(r_curv)
    p = curve.position(t)
    dist = np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)
    far = np.abs(t[:, None] - t[None, :]) > sep
    r_glob = 0.5 * dist[far].min() if far.any() else np.inf
    return float(min(r_curv, r_glob))
