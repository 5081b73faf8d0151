"""Exterior sound-hard (Neumann) problem by the single-layer ansatz."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, ResonanceError, SolverError
from ..numerics import DenseSystem, DirectionGrid, solve_dense
from ..potentials.operators import (
    DEFAULT_QUAD,
    Density,
    FarField,
    assemble_operator,
    evaluate_potential,
    far_field,
)
from .incident import plane_wave_normal_derivative, unit_directions

__all__ = ["SoundHardSolver", "SoundHardSolution", "solve_sound_hard"]

# beyond this the single-layer system is treated as resonant
RESONANCE_COND = 1e5


@dataclass(eq=False)
class SoundHardSolution:
    density: Density
    far_field: FarField
    condition: float
    residual: float

    def __iter__(self):
        yield self.density
        yield self.far_field


class SoundHardSolver:
    """Factorized (I/2 + K*) on a surface; solves for any incident direction.

    u^s = S[phi] with (I/2 + K*)[phi] = -du^i/dnu.
    """

    def __init__(self, surface, omega: float, opts=DEFAULT_QUAD):
        if not omega > 0:
            raise DomainError("omega must be positive")
        self.surface = surface
        self.omega = float(omega)
        self.opts = opts
        A = assemble_operator("Kstar", surface, surface, omega, opts)
        A[np.diag_indices_from(A)] += 0.5
        self.matrix = A
        self._lu = None
        self.condition = None

    def _factor(self, rhs):
        system = DenseSystem(self.matrix, rhs, refine=True)
        try:
            sol = solve_dense(system)
        except SolverError as exc:
            raise ResonanceError(
                f"single-layer Neumann system singular (omega near an interior Dirichlet eigenvalue); "
                f"use a combined-field representation: {exc}", exc.condition) from exc
        if sol.condition > RESONANCE_COND:
            raise ResonanceError(
                f"condition estimate {sol.condition:.3e} suggests an interior resonance; "
                f"use a combined-field representation", sol.condition)
        self._lu = sol
        self.condition = sol.condition
        return sol

    def densities(self, d) -> tuple[np.ndarray, float]:
        d = unit_directions(d)
        s = self.surface
        rhs = -plane_wave_normal_derivative(self.omega, d, s.points, s.normals)
        if self._lu is None:
            sol = self._factor(rhs)
            x, res = sol.x, sol.residual
        else:
            x = self._lu.solve(rhs)
            x = x + self._lu.solve(rhs - self.matrix @ x)
            r = rhs - self.matrix @ x
            res = float(np.linalg.norm(r) / np.linalg.norm(rhs)) if np.linalg.norm(rhs) > 0 else 0.0
        return x, res

    def solve(self, d, directions=None) -> SoundHardSolution:
        grid = directions if directions is not None else DirectionGrid.product()
        phi, res = self.densities(d)
        ff = far_field(self.surface, phi, self.omega, grid, incident=d)
        dens = Density(self.surface, phi if phi.ndim == 1 else phi[:, 0])
        return SoundHardSolution(dens, ff, self.condition, res)

    def scattered(self, phi, points) -> np.ndarray:
        return evaluate_potential("S", self.surface, phi, points, self.omega, self.opts)


def solve_sound_hard(surface, omega: float, d, directions=None, opts=DEFAULT_QUAD) -> SoundHardSolution:
    """Single-layer solve of the exterior Neumann problem for a plane wave."""
    return SoundHardSolver(surface, omega, opts).solve(d, directions)
