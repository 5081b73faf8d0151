"""Layer operators, potentials and far fields on Nyström surfaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DomainError, GridMismatchError
from ..numerics import DirectionGrid
from .kernels import KINDS, Wavenumber
from .quadrature import QuadOptions, TargetSet, assemble_kernels

__all__ = [
    "Density",
    "FarField",
    "assemble_operator",
    "assemble_operators",
    "evaluate_potential",
    "far_field",
    "far_field_cauchy",
    "far_field_first_order",
    "dump_matrix",
]

DEFAULT_QUAD = QuadOptions()


@dataclass(frozen=True, eq=False)
class Density:
    """Nodal values on a surface."""

    surface: object
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, complex)
        if v.shape[0] != self.surface.n:
            raise DomainError(f"density has {v.shape[0]} values for {self.surface.n} nodes")
        object.__setattr__(self, "values", v)

    def l2_norm(self) -> float:
        w = self.surface.weights
        return float(np.sqrt(np.sum(w * np.abs(self.values) ** 2)))

    def smoothed_norm(self) -> float:
        """Weak-norm surrogate: L2 norm of the Laplace single layer of the
        density, diagnostic only."""
        from .operators import assemble_operator  # noqa: PLC0415

        S = assemble_operator("S", self.surface, self.surface, 0.0)
        return float(np.sqrt(np.sum(self.surface.weights * np.abs(S @ self.values) ** 2)))


@dataclass(frozen=True, eq=False)
class FarField:
    """Far-field samples u_inf(xhat_k, d_m): shape (n_dirs,) or (n_dirs, n_inc)."""

    grid: DirectionGrid
    incident: np.ndarray
    samples: np.ndarray

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.samples))) if self.samples.size else 0.0

    @property
    def directions(self) -> np.ndarray:
        return self.grid.directions

    def column(self, m: int) -> FarField:
        s = self.samples if self.samples.ndim == 1 else self.samples[:, m]
        inc = self.incident if np.ndim(self.incident) == 1 else self.incident[m]
        return FarField(self.grid, inc, s)


def _targets_for(target, source) -> TargetSet:
    if target is source:
        return TargetSet(source.points, source.normals, source.patch_index, source.params)
    pts = getattr(target, "points", target)
    nrm = getattr(target, "normals", None)
    return TargetSet(np.asarray(pts, float), None if nrm is None else np.asarray(nrm, float))


def assemble_operators(kinds, target, source, kappa, opts: QuadOptions = DEFAULT_QUAD) -> dict:
    """Several kernels in one pass (shared distances and refinement)."""
    for k in kinds:
        if k not in KINDS:
            raise ConfigError(f"unsupported operator kind {k!r}")
    if "Kstar" in kinds and getattr(target, "normals", None) is None:
        raise ConfigError("Kstar needs target normals")
    kap = Wavenumber(kappa).value
    return assemble_kernels(tuple(kinds), kap, source, _targets_for(target, source), opts)


def assemble_operator(kind, target, source, kappa, opts: QuadOptions = DEFAULT_QUAD) -> np.ndarray:
    """Dense matrix of S, K (d/dnu_y), Kstar (d/dnu_x) or D from ``source`` to
    ``target``. When target is source, singular quadrature is used and K is the
    principal value."""
    return assemble_operators((kind,), target, source, kappa, opts)[kind]


def evaluate_potential(kind, source, density, targets, kappa, opts: QuadOptions = DEFAULT_QUAD):
    """S[phi] or D[phi] at off-surface points."""
    if kind not in ("S", "D"):
        raise ConfigError("potential kind must be S or D")
    pts = np.atleast_2d(np.asarray(targets, float))
    dens = density.values if isinstance(density, Density) else np.asarray(density, complex)
    M = assemble_operators((kind,), pts, source, kappa, opts)[kind]
    return M @ dens


def _dirs(directions) -> DirectionGrid:
    if isinstance(directions, DirectionGrid):
        return directions
    d = np.atleast_2d(np.asarray(directions, float))
    return DirectionGrid(d, np.zeros(len(d)))


def far_field(source, density, omega: float, directions, incident=None) -> FarField:
    """Single-layer far field: -(1/4 pi) sum_j exp(-i w xhat.y_j) phi_j w_j."""
    if omega <= 0:
        raise DomainError("omega must be positive")
    grid = _dirs(directions)
    dens = density.values if isinstance(density, Density) else np.asarray(density, complex)
    ph = np.exp(-1j * omega * grid.directions @ source.points.T) * source.weights
    samples = -(ph @ dens) / (4.0 * np.pi)
    return FarField(grid, np.asarray(incident if incident is not None else np.zeros(3)), samples)


def far_field_cauchy(source, trace, flux, omega: float, directions, incident=None) -> FarField:
    """Far field of -D[trace] + S[flux] (exterior Green representation)."""
    grid = _dirs(directions)
    xh = grid.directions
    ph = np.exp(-1j * omega * xh @ source.points.T) * source.weights
    dn = (xh @ source.normals.T) * ph
    samples = -(1j * omega / (4.0 * np.pi)) * (dn @ trace) - (ph @ flux) / (4.0 * np.pi)
    return FarField(grid, np.asarray(incident if incident is not None else np.zeros(3)), samples)


def far_field_first_order(source, density, omega: float, directions, incident=None) -> FarField:
    """Far field with the phase replaced by its degree-1 harmonic expansion,
    -i w (4 pi/3) sum_m Y1m(xhat) conj(Y1m(yhat)) |y|; the exponential is kept."""
    from ..numerics import addition_degree1  # noqa: PLC0415

    grid = _dirs(directions)
    y = source.points
    ry = np.linalg.norm(y, axis=1)
    safe = ry > 0
    yhat = np.zeros_like(y)
    yhat[safe] = y[safe] / ry[safe, None]
    yhat[~safe] = np.array([0.0, 0.0, 1.0])
    dens = density.values if isinstance(density, Density) else np.asarray(density, complex)
    xh = grid.directions
    add = addition_degree1(xh[:, None, :], yhat[None, :, :]).real
    phase = np.exp(-1j * omega * add * ry[None, :])
    samples = -(phase * source.weights) @ dens / (4.0 * np.pi)
    return FarField(grid, np.asarray(incident if incident is not None else np.zeros(3)), samples)


def compare_grids(a: FarField, b: FarField):
    if not a.grid.same_as(b.grid):
        raise GridMismatchError("far fields sampled on different grids")


def dump_matrix(matrix: np.ndarray, path) -> None:
    """Row-major text dump, one row per line as 're im' pairs."""
    with Path(path).open("w") as fh:
        for row in np.asarray(matrix, complex):
            fh.write(" ".join(f"{v.real:.17g} {v.imag:.17g}" for v in row))
            fh.write("\n")


def load_matrix(path) -> np.ndarray:
    rows = []
    with Path(path).open() as fh:
        for line in fh:
            vals = np.array(line.split(), float)
            rows.append(vals[0::2] + 1j * vals[1::2])
    return np.array(rows)
