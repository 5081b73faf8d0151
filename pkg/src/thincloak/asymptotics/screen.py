"""Flat-screen operators: the panel operator K*_Gamma0, the composed
operator K and the degree-1 far-field formula."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConditioningError, ConfigError, DomainError
from ..numerics import DenseSystem, gauss_legendre, solve_dense
from ..potentials.kernels import kernel_values
from ..potentials.operators import FarField, _dirs
from ..numerics import addition_degree1
from ..solvers.incident import unit_directions
from ..errors import SolverError

__all__ = ["PanelQuadrature", "panel_quadrature", "ScreenOperator", "screen_K_operator", "screen_farfield",
           "screen_normal_data"]


@dataclass(frozen=True, eq=False)
class PanelQuadrature:
    """Tensor Gauss-Legendre nodes on the square of side ``side`` in x3 = 0."""

    side: float
    points: np.ndarray
    weights: np.ndarray
    normal: np.ndarray

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def area(self) -> float:
        return float(self.weights.sum())


def panel_quadrature(side: float = 1.0, n_panels: int = 4, order: int = 8) -> PanelQuadrature:
    if side <= 0 or n_panels < 1 or order < 1:
        raise ConfigError("degenerate panel quadrature")
    g, gw = gauss_legendre(order)
    br = np.linspace(-side / 2, side / 2, n_panels + 1)
    h = 0.5 * np.diff(br)
    x = (0.5 * (br[:-1] + br[1:])[:, None] + h[:, None] * g[None, :]).ravel()
    w = (h[:, None] * gw[None, :]).ravel()
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    pts = np.stack([X.ravel(), Y.ravel(), np.zeros(X.size)], axis=1)
    return PanelQuadrature(float(side), pts, W.ravel(), np.array([0.0, 0.0, 1.0]))


@dataclass(frozen=True, eq=False)
class ScreenOperator:
    kstar: np.ndarray
    K: np.ndarray

    def identity_residual(self) -> float:
        """|| (I/4 - K*) K (I/4 + K*) - K* || relative to max(||K*||, 1)."""
        n = len(self.kstar)
        eye = np.eye(n)
        lhs = (0.25 * eye - self.kstar) @ self.K @ (0.25 * eye + self.kstar)
        return float(np.linalg.norm(lhs - self.kstar) / max(np.linalg.norm(self.kstar), 1.0))

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.K @ f


def _panel_kstar(panel: PanelQuadrature, omega: float) -> np.ndarray:
    """Nodal discretization of p.v. int n.grad_z G(z - y) phi(y) dsigma_y.

    The kernel carries the factor n.(z - y), which vanishes for every pair
    of points of the plane, so off-diagonal entries are zero to rounding and
    the principal value at the diagonal is zero as well.
    """
    z = panel.points
    n = np.broadcast_to(panel.normal, z.shape)
    vals = kernel_values(("Kstar",), omega, z[:, None, :], z[None, :, :], n[:, None, :], None)["Kstar"]
    vals[np.diag_indices_from(vals)] = 0.0
    return vals * panel.weights[None, :]


def screen_K_operator(panel: PanelQuadrature, omega: float) -> ScreenOperator:
    """K = (I/4 - K*)^-1 K* (I/4 + K*)^-1 on the panel quadrature."""
    if not omega > 0:
        raise DomainError("omega must be positive")
    ks = _panel_kstar(panel, omega)
    eye = np.eye(panel.n)
    try:
        right = solve_dense(DenseSystem((0.25 * eye + ks).T, ks.T)).x.T  # K* (I/4 + K*)^-1
        K = solve_dense(DenseSystem(0.25 * eye - ks, right)).x
    except SolverError as exc:
        raise ConditioningError(f"I/4 +- K* not invertible: {exc}", exc.condition) from exc
    return ScreenOperator(ks, K)


def screen_normal_data(panel: PanelQuadrature, omega: float, d) -> np.ndarray:
    """n.grad u^i(z) = i w (n.d) exp(i w z.d) at the panel nodes."""
    d = unit_directions(d)
    dd = np.atleast_2d(d)
    out = 1j * omega * (dd @ panel.normal)[None, :] * np.exp(1j * omega * panel.points @ dd.T)
    return out[:, 0] if np.ndim(d) == 1 else out


def screen_farfield(panel: PanelQuadrature, omega: float, d, directions, operator: ScreenOperator | None = None
                    ) -> FarField:
    """-(1/2 pi) int exp(-i w (4 pi/3) sum_m Y1m(xhat) conj(Y1m(zhat)) |z|) K[n.grad u^i](z) dsigma_z."""
    grid = _dirs(directions)
    op = operator if operator is not None else screen_K_operator(panel, omega)
    f = op.apply(screen_normal_data(panel, omega, d))
    z = panel.points
    rz = np.linalg.norm(z, axis=1)
    zhat = np.divide(z, rz[:, None], out=np.tile([0.0, 0.0, 1.0], (len(z), 1)), where=rz[:, None] > 0)
    add = addition_degree1(grid.directions[:, None, :], zhat[None, :, :]).real
    kern = np.exp(-1j * omega * add * rz[None, :]) * panel.weights[None, :]
    samples = -(kern @ f) / (2.0 * np.pi)
    return FarField(grid, np.asarray(d, float), samples)
