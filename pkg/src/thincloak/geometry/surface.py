"""Discrete surfaces: nodes, normals, weights, tags, projections and twins."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DomainError
from .patches import Patch, SphereQuadChart, Rule

__all__ = [
    "SurfaceQuadrature",
    "SurfaceNodes",
    "assemble_surface",
    "sphere_surface",
    "dump_surface",
    "load_surface",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(eq=False)
class SurfaceQuadrature:
    """Nyström surface built from patches.

    ``twin`` is the node-for-node rescaled body (for physical thin bodies),
    ``jacobians`` holds B_j = grad A at each node.
    """

    patches: list[Patch]
    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    params: np.ndarray
    patch_index: np.ndarray
    tags: np.ndarray
    projections: np.ndarray
    body: str = "outer"
    scale: float = 1.0
    twin: SurfaceQuadrature | None = None
    jacobians: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("points", "normals", "weights", "params", "patch_index", "tags", "projections"):
            setattr(self, name, _frozen(np.asarray(getattr(self, name))))
        if self.jacobians is not None:
            self.jacobians = _frozen(np.asarray(self.jacobians, float))

    @property
    def n(self) -> int:
        return len(self.weights)

    def __len__(self) -> int:
        return self.n

    @property
    def area(self) -> float:
        return float(self.weights.sum())

    def tag_mask(self, *tags: str) -> np.ndarray:
        return np.isin(self.tags, tags)

    @property
    def twin_points(self) -> np.ndarray:
        if self.twin is None:
            raise DomainError("surface has no rescaled twin")
        return self.twin.points

    @property
    def measure_ratio(self) -> np.ndarray:
        """Physical over rescaled area element at each node."""
        if self.twin is None:
            raise DomainError("surface has no rescaled twin")
        return self.weights / self.twin.weights

    def nodes(self) -> SurfaceNodes:
        return SurfaceNodes(self.points, self.normals, self.weights, self.tags, self.projections)

    def diameter(self) -> float:
        lo, hi = self.points.min(axis=0), self.points.max(axis=0)
        return float(np.linalg.norm(hi - lo))


def assemble_surface(patches: list[Patch], projection_fn, body: str = "outer", scale: float = 1.0,
                     orient_fn=None) -> SurfaceQuadrature:
    """Concatenate patch nodes. ``projection_fn(patch, X, params)`` returns the
    generator projection of each node; patches are oriented so normals point
    away from it unless ``orient_fn`` is given."""
    pts, nus, ws, prm, pid, tags, proj = [], [], [], [], [], [], []
    offset = 0
    for k, p in enumerate(patches):
        p.offset = offset
        X, nu, w, uv = p.nodes()
        z = projection_fn(p, X, uv)
        if orient_fn is not None:
            sign = orient_fn(p, X, nu)
        else:
            d = X - z
            sign = 1.0 if np.sum(d * nu) >= 0 else -1.0
        if sign < 0:
            p.orient = -p.orient
            nu = -nu
        pts.append(X)
        nus.append(nu)
        ws.append(w)
        prm.append(uv)
        pid.append(np.full(len(w), k))
        tags.append(np.full(len(w), p.tag, dtype="<U8"))
        proj.append(z)
        offset += p.n_nodes
    return SurfaceQuadrature(
        patches=patches,
        points=np.concatenate(pts),
        normals=np.concatenate(nus),
        weights=np.concatenate(ws),
        params=np.concatenate(prm),
        patch_index=np.concatenate(pid),
        tags=np.concatenate(tags),
        projections=np.concatenate(proj),
        body=body,
        scale=scale,
    )


def _cube_face_corners():
    faces = []
    for axis in range(3):
        for sign in (1.0, -1.0):
            e = np.zeros(3)
            e[axis] = sign
            a = np.zeros(3)
            a[(axis + 1) % 3] = 1.0
            b = np.cross(e, a)
            faces.append((e, a, b))
    return faces


def sphere_surface(radius: float = 1.0, center=(0.0, 0.0, 0.0), m: int = 2, order: int = 9,
                   tag: str = "sphere") -> SurfaceQuadrature:
    """Cube-sphere: six projected cube faces, each split into m x m patches."""
    center = np.asarray(center, float)
    patches = []
    for e, a, b in _cube_face_corners():
        corners = np.array([e - a - b, e + a - b, e - a + b, e + a + b])
        chart = SphereQuadChart(center, radius, corners)
        cuts = np.linspace(0.0, 1.0, m + 1)
        for i in range(m):
            for j in range(m):
                patches.append(Patch(chart, Rule("gl", order, cuts[i], cuts[i + 1]),
                                     Rule("gl", order, cuts[j], cuts[j + 1]), tag))
    surf = assemble_surface(patches, lambda p, X, uv: np.broadcast_to(center, X.shape), body="sphere",
                            scale=radius)
    return surf


# ----------------------------------------------------------------- dump I/O


@dataclass(frozen=True, eq=False)
class SurfaceNodes:
    """Node table as written by :func:`dump_surface`."""

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    tags: np.ndarray
    projections: np.ndarray

    def equals(self, other: SurfaceNodes) -> bool:
        return (
            np.array_equal(self.points, other.points)
            and np.array_equal(self.normals, other.normals)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.tags.astype(str), other.tags.astype(str))
            and np.array_equal(self.projections, other.projections)
        )


DUMP_COLUMNS = "x y z nx ny nz w patch_tag zx zy zz"


def dump_surface(surface, path) -> None:
    """One node per line, columns ``x y z nx ny nz w patch_tag zx zy zz``.

    Floats are written with 17 significant digits so reading back is exact.
    """
    path = Path(path)
    nodes = surface.nodes() if isinstance(surface, SurfaceQuadrature) else surface
    with path.open("w") as fh:
        fh.write("# " + DUMP_COLUMNS + "\n")
        for x, nu, w, tag, z in zip(nodes.points, nodes.normals, nodes.weights, nodes.tags,
                                    nodes.projections):
            vals = [*x, *nu, w]
            fh.write(" ".join(f"{v:.17g}" for v in vals))
            fh.write(f" {tag} ")
            fh.write(" ".join(f"{v:.17g}" for v in z))
            fh.write("\n")


def load_surface(path) -> SurfaceNodes:
    rows = []
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 11:
                raise DomainError(f"surface dump line has {len(parts)} columns, expected 11")
            rows.append(parts)
    if not rows:
        raise DomainError("empty surface dump")
    num = np.array([[float(v) for v in r[:7] + r[8:]] for r in rows])
    tags = np.array([r[7] for r in rows], dtype="<U8")
    return SurfaceNodes(num[:, 0:3], num[:, 3:6], num[:, 6], tags, num[:, 7:10])
