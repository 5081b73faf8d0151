"""Thin bodies: tubes about curves and rounded slabs about a square, their
generator projections and the blow-up map.

The blow-up is A(y) = (y - z_y)/delta + z_y for every region, with z_y the
projection onto the generating set. Its Jacobian is
B = I/delta - (1/delta - 1) grad(z_y), where grad(z_y) is T T^T/(1 - (y-c).T')
on a tube facade, zero on caps and corners, the in-plane projector on the
slab faces and the edge projector on the slab sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import ConfigError, DomainError, GeometryError
from .curves import GeneratingCurve, StraightSegment, estimate_r0
from .patches import CylinderChart, FacadeChart, Patch, PlaneChart, Rule, SphereQuadChart
from .surface import SurfaceQuadrature, assemble_surface

__all__ = [
    "TubeGeometry",
    "ScreenGeometry",
    "tube_body",
    "screen_body",
    "build_tube_surface",
    "build_screen_surface",
    "build_inner_surface",
    "graded_breaks",
    "project_to_generator",
    "blowup",
    "blowdown",
]


def graded_breaks(lo: float, hi: float, h_min: float, h_max: float, ratio: float = 2.0) -> np.ndarray:
    """Panel breakpoints on [lo, hi], geometric from both ends, capped at h_max."""
    L = hi - lo
    if h_min >= h_max or h_min >= L / 2:
        n = max(1, int(np.ceil(L / h_max)))
        return np.linspace(lo, hi, n + 1)
    left = [0.0]
    h = h_min
    while left[-1] + h < L / 2 - 1e-12 and h < h_max:
        left.append(left[-1] + h)
        h *= ratio
    rest = L - 2 * left[-1]
    n_mid = max(1, int(np.ceil(rest / h_max - 1e-9)))
    mid = left[-1] + rest * np.arange(1, n_mid) / n_mid
    right = [L - x for x in reversed(left)]
    pts = np.concatenate([left, mid, right])
    return lo + pts


# ------------------------------------------------------------------- tubes


@dataclass
class TubeGeometry:
    """Tube of radius ``delta`` about ``curve`` with hemispherical caps.

    Facade: ``n_panels`` Gauss-Legendre panels of ``order`` nodes in arc
    length (graded towards the caps when ``n_panels`` is None) times
    ``n_theta`` equispaced angles. Caps: 12 projected quads per hemisphere,
    each split 4**cap_level times, ``cap_order`` nodes per direction.
    """

    curve: GeneratingCurve = field(default_factory=StraightSegment)
    delta: float = 0.1
    n_theta: int = 16
    order: int = 8
    n_panels: int | None = None
    h_max: float = 0.25
    cap_level: int = 0
    cap_order: int = 8
    cap_shape: str = "hemisphere"

    def __post_init__(self):
        if self.delta <= 0:
            raise ConfigError("delta must be positive")
        if self.n_theta < 8:
            raise ConfigError("n_theta must be >= 8")
        if self.order < 2 or self.cap_order < 2:
            raise ConfigError("panel orders must be >= 2")
        if self.n_panels is not None and self.n_panels < 1:
            raise ConfigError("n_panels must be >= 1")
        if self.cap_shape != "hemisphere":
            raise ConfigError("only hemispherical caps are implemented")
        self.r0 = estimate_r0(self.curve)
        if self.delta > self.r0:
            raise GeometryError(f"delta={self.delta} exceeds the non-self-intersection radius {self.r0:.4g}")

    def breaks(self) -> np.ndarray:
        L = self.curve.length
        if self.n_panels is not None:
            return np.linspace(0.0, L, self.n_panels + 1)
        return graded_breaks(0.0, L, min(self.delta, self.h_max), self.h_max)

    @property
    def n_t(self) -> int:
        return (len(self.breaks()) - 1) * self.order


def _hemisphere_quads(axis, e1, e2):
    """12 quads (corner quadruples) covering the hemisphere about ``axis``."""
    quads = []
    eq = [np.cos(k * np.pi / 2) * e1 + np.sin(k * np.pi / 2) * e2 for k in range(5)]
    for k in range(4):
        quads.extend(_triangle_quads(axis, eq[k], eq[k + 1]))
    return quads


def _triangle_quads(a, b, c):
    nz = lambda v: v / np.linalg.norm(v)
    m = nz(a + b + c)
    mab, mbc, mca = nz(a + b), nz(b + c), nz(c + a)
    return [
        np.array([a, mab, mca, m]),
        np.array([b, mbc, mab, m]),
        np.array([c, mca, mbc, m]),
    ]


def _sphere_patches(center, radius, quads, level, order, tag):
    patches = []
    cuts = np.linspace(0.0, 1.0, 2**level + 1)
    for q in quads:
        chart = SphereQuadChart(np.asarray(center, float), radius, q)
        for i in range(len(cuts) - 1):
            for j in range(len(cuts) - 1):
                patches.append(Patch(chart, Rule("gl", order, cuts[i], cuts[i + 1]),
                                     Rule("gl", order, cuts[j], cuts[j + 1]), tag))
    return patches


def tube_body(curve: GeneratingCurve, radius: float, breaks, n_theta: int, order: int,
              cap_level: int, cap_order: int, body: str = "outer") -> SurfaceQuadrature:
    """Boundary of the tube of given radius; node layout depends only on the
    resolution arguments, so bodies of different radii match node for node."""
    L = curve.length
    patches = []
    chart = FacadeChart(curve, radius)
    for a, b in zip(breaks[:-1], breaks[1:]):
        patches.append(Patch(chart, Rule("gl", order, a, b), Rule("trap", n_theta, 0.0, 2 * np.pi), "facade"))
    for t_end, tag, sgn in ((0.0, "capA", -1.0), (L, "capB", 1.0)):
        T, N1, N2 = curve.frame(t_end)
        P = curve.position(t_end)
        patches += _sphere_patches(P, radius, _hemisphere_quads(sgn * T, N1, N2), cap_level, cap_order, tag)

    P0, Q0 = curve.position(0.0), curve.position(L)

    def proj(p, X, uv):
        if p.tag == "facade":
            return curve.position(uv[:, 0])
        return np.broadcast_to(P0 if p.tag == "capA" else Q0, X.shape).copy()

    surf = assemble_surface(patches, proj, body=body, scale=radius)
    surf.meta.update(kind="tube", curve=curve, radius=radius)
    return surf


def _tube_jacobians(surf: SurfaceQuadrature, curve: GeneratingCurve, delta: float) -> np.ndarray:
    n = surf.n
    B = np.broadcast_to(np.eye(3) / delta, (n, 3, 3)).copy()
    m = surf.tags == "facade"
    if m.any():
        t = surf.params[m, 0]
        T = curve.tangent(t)
        dT = curve.tangent_derivative(t)
        y_c = surf.points[m] - curve.position(t)
        denom = 1.0 - np.sum(y_c * dT, axis=-1)
        B[m] -= (1.0 / delta - 1.0) * T[:, :, None] * T[:, None, :] / denom[:, None, None]
    return B


def build_tube_surface(geom: TubeGeometry) -> SurfaceQuadrature:
    """Physical boundary of D_delta with its rescaled twin (radius 1)."""
    br = geom.breaks()
    args = (br, geom.n_theta, geom.order, geom.cap_level, geom.cap_order)
    phys = tube_body(geom.curve, geom.delta, *args, body="outer")
    if geom.r0 < 1.0 and geom.delta < 1.0:
        # the unit-radius reference tube would self-intersect; twin omitted
        return phys
    twin = tube_body(geom.curve, 1.0, *args, body="rescaled")
    phys.twin = twin
    phys.jacobians = _tube_jacobians(phys, geom.curve, geom.delta)
    phys.meta["geometry"] = geom
    return phys


# ----------------------------------------------------------------- screens


@dataclass
class ScreenGeometry:
    """Rounded slab of half-thickness ``delta`` about the square of side
    ``side`` in the x3 = 0 plane, centred at the origin.

    The faces carry ``n_face`` uniform panels plus, when ``edge_width`` > 0,
    one strip of that width along each edge, where the fields of a thin slab
    vary on the scale delta."""

    side: float = 1.0
    delta: float = 0.05
    order: int = 8
    n_face: int | None = 1
    edge_width: float = 0.05
    h_max: float = 0.25
    side_panels: int = 1
    side_order: int = 8
    corner_level: int = 0
    corner_order: int = 6

    def __post_init__(self):
        if self.side <= 0 or self.delta <= 0:
            raise ConfigError("side and delta must be positive")
        if min(self.order, self.side_order, self.corner_order) < 2 or self.side_panels < 1:
            raise ConfigError("degenerate resolution")
        if self.n_face is not None and self.n_face < 1:
            raise ConfigError("n_face must be >= 1")
        if not 0.0 <= self.edge_width < self.side / 4:
            raise ConfigError("edge_width must lie in [0, side/4)")

    def breaks(self) -> np.ndarray:
        a = self.side / 2
        if self.n_face is not None:
            e = self.edge_width
            mid = np.linspace(-a + e, a - e, self.n_face + 1)
            return np.concatenate([[-a], mid, [a]]) if e > 0 else mid
        return graded_breaks(-a, a, min(self.delta, self.h_max), self.h_max)


def screen_body(side: float, radius: float, breaks, order: int, side_panels: int, side_order: int,
                corner_level: int, corner_order: int, body: str = "outer") -> SurfaceQuadrature:
    a = side / 2
    e1, e2, e3 = np.eye(3)
    patches = []
    for sgn in (1.0, -1.0):
        chart = PlaneChart(np.array([0.0, 0.0, sgn * radius]), e1, e2)
        for x0, x1 in zip(breaks[:-1], breaks[1:]):
            for y0, y1 in zip(breaks[:-1], breaks[1:]):
                patches.append(Patch(chart, Rule("gl", order, x0, x1), Rule("gl", order, y0, y1), "S0"))
    phi = np.linspace(-np.pi / 2, np.pi / 2, side_panels + 1)
    edges = [(np.array([a, 0, 0]), e2, e1), (np.array([-a, 0, 0]), e2, -e1),
             (np.array([0, a, 0]), e1, e2), (np.array([0, -a, 0]), e1, -e2)]
    for origin, axis, out in edges:
        chart = CylinderChart(origin, axis, out, e3, radius)
        for s0, s1 in zip(breaks[:-1], breaks[1:]):
            for p0, p1 in zip(phi[:-1], phi[1:]):
                patches.append(Patch(chart, Rule("gl", order, s0, s1), Rule("gl", side_order, p0, p1), "S1"))
    for sx in (1.0, -1.0):
        for sy in (1.0, -1.0):
            c = np.array([sx * a, sy * a, 0.0])
            quads = _triangle_quads(e3, sx * e1, sy * e2) + _triangle_quads(-e3, sx * e1, sy * e2)
            patches += _sphere_patches(c, radius, quads, corner_level, corner_order, "S2")

    def proj(p, X, uv):
        return np.stack([np.clip(X[:, 0], -a, a), np.clip(X[:, 1], -a, a), np.zeros(len(X))], axis=1)

    surf = assemble_surface(patches, proj, body=body, scale=radius)
    surf.meta.update(kind="screen", side=side, radius=radius)
    return surf


def _screen_jacobians(surf: SurfaceQuadrature, side: float, delta: float) -> np.ndarray:
    a = side / 2
    n = surf.n
    B = np.broadcast_to(np.eye(3) / delta, (n, 3, 3)).copy()
    P = _screen_projector(surf.points, a)
    return B - (1.0 / delta - 1.0) * P


def _screen_projector(y: np.ndarray, a: float) -> np.ndarray:
    """grad(z_y) for the clamped vertical projection."""
    y = np.atleast_2d(y)
    P = np.zeros((len(y), 3, 3))
    P[:, 0, 0] = (np.abs(y[:, 0]) <= a).astype(float)
    P[:, 1, 1] = (np.abs(y[:, 1]) <= a).astype(float)
    return P


def build_screen_surface(geom: ScreenGeometry) -> SurfaceQuadrature:
    br = geom.breaks()
    args = (br, geom.order, geom.side_panels, geom.side_order, geom.corner_level, geom.corner_order)
    phys = screen_body(geom.side, geom.delta, *args, body="outer")
    twin = screen_body(geom.side, 1.0, *args, body="rescaled")
    phys.twin = twin
    phys.jacobians = _screen_jacobians(phys, geom.side, geom.delta)
    phys.meta["geometry"] = geom
    return phys


INNER_SCREEN_PANELS = 2


def build_inner_surface(geom, rescaled: bool = True, order: int | None = None, h_max: float | None = None,
                        n_theta: int | None = None) -> SurfaceQuadrature:
    """Inner body: radius (half-thickness) 1/2 in rescaled coordinates, or
    delta/2 physically. Resolution is independent of the outer body."""
    r = 0.5 if rescaled else geom.delta / 2
    body = "inner"
    if isinstance(geom, TubeGeometry):
        hm = h_max if h_max is not None else max(geom.h_max, 0.25)
        L = geom.curve.length
        br = graded_breaks(0.0, L, min(r, hm), hm)
        return tube_body(geom.curve, r, br, n_theta or geom.n_theta, order or geom.order, geom.cap_level,
                         order or geom.cap_order, body=body)
    if isinstance(geom, ScreenGeometry):
        a = geom.side / 2
        if h_max is None:
            br = np.linspace(-a, a, INNER_SCREEN_PANELS + 1)
        else:
            hm = h_max if h_max is not None else max(geom.h_max, 0.25)
            br = graded_breaks(-a, a, min(r, hm), hm)
        return screen_body(geom.side, r, br, order or geom.order, geom.side_panels, geom.side_order,
                           geom.corner_level, geom.corner_order, body=body)
    raise ConfigError("unknown geometry type")


# ------------------------------------------------- projection and blow-up


def _tube_project(geom: TubeGeometry, y: np.ndarray):
    curve = geom.curve
    L = curve.length
    ts = np.linspace(0.0, L, 257)
    d2 = np.sum((curve.position(ts) - y) ** 2, axis=-1)
    k = int(np.argmin(d2))
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, len(ts) - 1)]
    if lo == hi:
        t = lo
    else:
        res = minimize_scalar(lambda t: float(np.sum((curve.position(t) - y) ** 2)), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-14 * max(1.0, L)})
        t = float(res.x)
    # the bounded search only resolves t to ~sqrt(eps); polish with Newton
    for _ in range(3):
        r = curve.position(t) - y
        T = curve.tangent(t)
        den = 1.0 + float(np.dot(r, curve.tangent_derivative(t)))
        t = float(np.clip(t - np.dot(r, T) / den, 0.0, L))
    c = curve.position(t)
    T = curve.tangent(t)
    tol = 1e-10 * max(1.0, L)
    if t <= tol and np.dot(y - c, T) <= 0:
        return curve.position(0.0), "capA", 0.0
    if t >= L - tol and np.dot(y - c, T) >= 0:
        return curve.position(L), "capB", L
    return c, "facade", t


def project_to_generator(geom, y) -> np.ndarray:
    """Projection z_y onto the generating curve or square."""
    z, _, _ = _project(geom, y)
    return z


def _project(geom, y):
    y = np.asarray(y, float)
    if isinstance(geom, TubeGeometry):
        if geom.delta > geom.r0:
            raise GeometryError("projection ambiguous: delta exceeds r0")
        z, region, t = _tube_project(geom, y)
        if np.linalg.norm(y - z) > geom.delta * (1 + 1e-9):
            raise DomainError("point lies outside the tube")
        return z, region, t
    if isinstance(geom, ScreenGeometry):
        a = geom.side / 2
        z = np.array([np.clip(y[0], -a, a), np.clip(y[1], -a, a), 0.0])
        if np.linalg.norm(y - z) > geom.delta * (1 + 1e-9):
            raise DomainError("point lies outside the slab")
        inx, iny = abs(y[0]) <= a, abs(y[1]) <= a
        region = "S0" if inx and iny else ("S1" if inx or iny else "S2")
        return z, region, None
    raise ConfigError("unknown geometry type")


def _grad_z(geom, y, region, t):
    if isinstance(geom, TubeGeometry):
        if region != "facade":
            return np.zeros((3, 3))
        T = geom.curve.tangent(t)
        dT = geom.curve.tangent_derivative(t)
        c = geom.curve.position(t)
        return np.outer(T, T) / (1.0 - np.dot(y - c, dT))
    return _screen_projector(y, geom.side / 2)[0]


def blowup(geom, y) -> tuple[np.ndarray, np.ndarray]:
    """(A(y), B(y)) for y in the closure of the thin body."""
    y = np.asarray(y, float)
    z, region, t = _project(geom, y)
    d = geom.delta
    yt = (y - z) / d + z
    B = np.eye(3) / d - (1.0 / d - 1.0) * _grad_z(geom, y, region, t)
    return yt, B


def blowdown(geom, yt) -> np.ndarray:
    """Inverse blow-up A^{-1}: the projection of A(y) equals that of y."""
    yt = np.asarray(yt, float)
    if isinstance(geom, TubeGeometry):
        z, _, _ = _tube_project(geom, yt)
        if np.linalg.norm(yt - z) > 1 + 1e-9:
            raise DomainError("point lies outside the rescaled tube")
    else:
        a = geom.side / 2
        z = np.array([np.clip(yt[0], -a, a), np.clip(yt[1], -a, a), 0.0])
        if np.linalg.norm(yt - z) > 1 + 1e-9:
            raise DomainError("point lies outside the rescaled slab")
    return geom.delta * (yt - z) + z
