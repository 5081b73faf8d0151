"""Smooth parametric patches carrying tensor quadrature and interpolation.

A patch is a chart (s, t) -> R^3 restricted to a parameter box. Each
direction carries either a Gauss-Legendre panel (Lagrange interpolation) or a
full period of equispaced nodes (trigonometric interpolation). Node ordering is
s-major: index = a * n_t + b.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import gauss_legendre, lagrange_matrix, trig_matrix

__all__ = [
    "Chart",
    "PlaneChart",
    "FacadeChart",
    "CylinderChart",
    "SphereQuadChart",
    "Rule",
    "Patch",
]


class Chart:
    """Vectorized map (s, t) -> (X, X_s, X_t)."""

    def eval(self, s: np.ndarray, t: np.ndarray):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class PlaneChart(Chart):
    origin: np.ndarray
    es: np.ndarray
    et: np.ndarray

    def eval(self, s, t):
        s = np.asarray(s, float)[..., None]
        t = np.asarray(t, float)[..., None]
        X = self.origin + s * self.es + t * self.et
        return X, np.broadcast_to(self.es, X.shape), np.broadcast_to(self.et, X.shape)


@dataclass(frozen=True, eq=False)
class FacadeChart(Chart):
    """Tube of radius r about a generating curve: s = arc length, t = angle."""

    curve: object
    radius: float

    def eval(self, s, t):
        s = np.asarray(s, float)
        t = np.asarray(t, float)
        s, t = np.broadcast_arrays(s, t)
        c = self.curve.position(s)
        T, N1, N2 = self.curve.frame(s)
        k1, k2 = self.curve.curvature_components(s)
        ct, st = np.cos(t)[..., None], np.sin(t)[..., None]
        r = self.radius
        X = c + r * (ct * N1 + st * N2)
        stretch = 1.0 - r * (ct[..., 0] * k1 + st[..., 0] * k2)
        Xs = T * stretch[..., None]
        Xt = r * (-st * N1 + ct * N2)
        return X, Xs, Xt


@dataclass(frozen=True, eq=False)
class CylinderChart(Chart):
    """Circular cylinder: s along ``axis`` from ``origin``, t = angle from e1."""

    origin: np.ndarray
    axis: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    radius: float

    def eval(self, s, t):
        s = np.asarray(s, float)[..., None]
        t = np.asarray(t, float)[..., None]
        ct, st = np.cos(t), np.sin(t)
        X = self.origin + s * self.axis + self.radius * (ct * self.e1 + st * self.e2)
        Xs = np.broadcast_to(self.axis, X.shape)
        Xt = self.radius * (-st * self.e1 + ct * self.e2)
        return X, Xs, Xt


@dataclass(frozen=True, eq=False)
class SphereQuadChart(Chart):
    """Central projection of a bilinear quad onto a sphere.

    Corners c00, c10, c01, c11 are unit vectors; (s, t) in [0, 1]^2. Edges map
    to great-circle arcs.
    """

    center: np.ndarray
    radius: float
    corners: np.ndarray  # (4, 3): c00, c10, c01, c11

    def eval(self, s, t):
        s = np.asarray(s, float)[..., None]
        t = np.asarray(t, float)[..., None]
        c00, c10, c01, c11 = self.corners
        P = (1 - s) * (1 - t) * c00 + s * (1 - t) * c10 + (1 - s) * t * c01 + s * t * c11
        Ps = (1 - t) * (c10 - c00) + t * (c11 - c01)
        Pt = (1 - s) * (c01 - c00) + s * (c11 - c10)
        n = np.linalg.norm(P, axis=-1, keepdims=True)
        u = P / n
        X = self.center + self.radius * u
        Xs = self.radius * (Ps - u * np.sum(u * Ps, axis=-1, keepdims=True)) / n
        Xt = self.radius * (Pt - u * np.sum(u * Pt, axis=-1, keepdims=True)) / n
        return X, Xs, Xt


@dataclass(frozen=True)
class Rule:
    """One-dimensional node rule on [lo, hi]: ``gl`` panel or ``trap`` period."""

    kind: str
    n: int
    lo: float
    hi: float

    @property
    def periodic(self) -> bool:
        return self.kind == "trap"

    @property
    def span(self) -> float:
        return self.hi - self.lo

    def nodes_weights(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "gl":
            x, w = gauss_legendre(self.n)
            h = 0.5 * self.span
            return self.lo + h * (x + 1.0), h * w
        x = self.lo + self.span * np.arange(self.n) / self.n
        return x, np.full(self.n, self.span / self.n)

    def interp(self, x: np.ndarray) -> np.ndarray:
        """Cardinal-function values at x, shape x.shape + (n,)."""
        if self.kind == "gl":
            ref = 2.0 * (np.asarray(x, float) - self.lo) / self.span - 1.0
            return lagrange_matrix(self.n, ref)
        ang = 2.0 * np.pi * (np.asarray(x, float) - self.lo) / self.span
        return trig_matrix(self.n, ang)


@dataclass(eq=False)
class Patch:
    chart: Chart
    rs: Rule
    rt: Rule
    tag: str
    orient: float = 1.0
    offset: int = 0  # first global node index

    @property
    def n_nodes(self) -> int:
        return self.rs.n * self.rt.n

    @property
    def box(self) -> tuple[float, float, float, float]:
        return self.rs.lo, self.rs.hi, self.rt.lo, self.rt.hi

    @property
    def node_slice(self) -> slice:
        return slice(self.offset, self.offset + self.n_nodes)

    def geometry(self, s, t):
        """Points, oriented unit normals and area element at parameters."""
        X, Xs, Xt = self.chart.eval(s, t)
        c = np.cross(Xs, Xt)
        J = np.linalg.norm(c, axis=-1)
        nu = self.orient * c / J[..., None]
        return X, nu, J

    def params(self) -> tuple[np.ndarray, np.ndarray]:
        s, _ = self.rs.nodes_weights()
        t, _ = self.rt.nodes_weights()
        ss, tt = np.meshgrid(s, t, indexing="ij")
        return ss.ravel(), tt.ravel()

    def nodes(self):
        """(points, normals, weights, params) at the tensor nodes."""
        s, ws = self.rs.nodes_weights()
        t, wt = self.rt.nodes_weights()
        ss, tt = np.meshgrid(s, t, indexing="ij")
        X, nu, J = self.geometry(ss.ravel(), tt.ravel())
        w = np.outer(ws, wt).ravel() * J
        return X, nu, w, np.stack([ss.ravel(), tt.ravel()], axis=1)

    def metric_scales(self, s, t) -> tuple[np.ndarray, np.ndarray]:
        _, Xs, Xt = self.chart.eval(s, t)
        return np.linalg.norm(Xs, axis=-1), np.linalg.norm(Xt, axis=-1)
