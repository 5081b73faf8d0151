"""Lossy-layer cloak: exterior, rescaled shell and content coupled by
boundary integral equations.

Unknowns (one column per incident direction)
    u   total field on the physical boundary of D_delta (= v on the rescaled twin)
    q   shell-side normal derivative of v on the rescaled outer boundary
    vi  v on the inner boundary (radius or half-thickness 1/2)
    Qi  shell-side normal derivative of v on the inner boundary

Rows
    exterior, physical surface, wavenumber w:   (I/2 + K) u - S (c q) = (I/2 + K) u^i - S du^i/dnu
    shell, rescaled outer, k_l:                 (I/2 - K) u + S q + K vi - S Qi = 0
    shell, inner, k_l:                          -K u + S q + (I/2 + K) vi - S Qi = 0
    content, inner, k_a:                        (I/2 - K) vi + S (gamma/sigma_a) Qi = 0

Derivation of the coupling factor c. With sigma_l = gamma B^-2 the pulled
back shell is the medium (gamma/det B, q_l/det B) in rescaled variables, so
the flux identity nu.sigma_l grad u = gamma (B^-1 nu).grad v together with
B nu = nu/delta gives du/dnu = gamma delta dv/dnu on the facade (and on the
flat screen faces). The shell equation is solved in the normalized form
gamma Lap v + (alpha + i beta) w^2 v = 0 throughout D minus D_1/2. In the
default "pushforward" model the physical layer is the push-forward of that
uniform normalized shell; flux conservation then gives
    c_j = gamma (dsigma~/dsigma)_j / det B_0,
with B_0 the Jacobian of the main region (facade or slab). This equals
gamma delta on the facade/slab, gamma on tube caps and screen sides, and
gamma/delta on screen corners. The "uniform" model applies gamma delta at
every node instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConditioningError, ConfigError, DomainError, SolverError, UnsupportedGeometryError
from ..geometry.bodies import ScreenGeometry, TubeGeometry, build_inner_surface, build_screen_surface, build_tube_surface
from ..numerics import DenseSystem, DirectionGrid, solve_dense
from ..potentials.kernels import principal_sqrt
from ..potentials.operators import DEFAULT_QUAD, FarField, assemble_operators, far_field_cauchy
from .incident import plane_wave, plane_wave_normal_derivative, unit_directions

__all__ = [
    "LossyLayerSpec",
    "ContentSpec",
    "CloakSolution",
    "CLOAK_MODELS",
    "coupling_factors",
    "solve_cloak",
    "solve_screen_cloak",
    "solve_transmission",
]

CLOAK_MODELS = ("pushforward", "uniform")
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class LossyLayerSpec:
    gamma: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not (self.gamma > 0 and self.alpha > 0):
            raise DomainError("gamma and alpha must be positive")
        if self.beta < 0:
            raise DomainError("beta must be nonnegative")

    def wavenumber(self, omega: float) -> complex:
        return principal_sqrt((self.alpha + 1j * self.beta) / self.gamma) * omega


@dataclass(frozen=True)
class ContentSpec:
    sigma_a: float = 1.0
    q_a: complex = 1.0

    def __post_init__(self):
        q = complex(self.q_a)
        if not self.sigma_a > 0:
            raise DomainError("sigma_a must be positive")
        if q.real <= 0 or q.imag < 0:
            raise DomainError("q_a needs Re q_a > 0 and Im q_a >= 0")
        object.__setattr__(self, "q_a", q)

    def wavenumber(self, omega: float) -> complex:
        return principal_sqrt(self.q_a / self.sigma_a) * omega


@dataclass(eq=False)
class CloakSolution:
    outer: object
    inner: object
    omega: float
    incident: np.ndarray
    lossy: LossyLayerSpec
    content: ContentSpec
    coupling: np.ndarray
    det_b0: float
    u: np.ndarray
    q: np.ndarray
    vi: np.ndarray
    Qi: np.ndarray
    far_field: FarField
    residual: float
    condition: float
    block_residuals: dict = field(default_factory=dict)
    model: str = "pushforward"

    @property
    def sup(self) -> float:
        return self.far_field.sup

    @property
    def scattered_trace(self) -> np.ndarray:
        return self.u - plane_wave(self.omega, self.incident, self.outer.points).reshape(self.u.shape)


def coupling_factors(outer, gamma: float, det_b0: float, delta: float, model: str = "pushforward") -> np.ndarray:
    if model not in CLOAK_MODELS:
        raise ConfigError(f"model must be one of {CLOAK_MODELS}")
    if model == "uniform":
        return np.full(outer.n, gamma * delta)
    return gamma / (outer.measure_ratio * det_b0)


def _columns(a):
    return a[:, None] if a.ndim == 1 else a


def solve_transmission(outer, inner, coupling, lossy: LossyLayerSpec, content: ContentSpec, omega: float, d,
                       directions=None, opts=DEFAULT_QUAD, det_b0: float = 1.0, model: str = "pushforward"
                       ) -> CloakSolution:
    """Assemble and solve the four-row system; ``outer`` must carry its
    rescaled twin."""
    if not omega > 0:
        raise DomainError("omega must be positive")
    d = unit_directions(d)
    twin = outer.twin
    if twin is None:
        raise ConfigError("outer surface has no rescaled twin")
    grid = directions if directions is not None else DirectionGrid.product()
    kl = lossy.wavenumber(omega)
    ka = content.wavenumber(omega)
    no, ni = outer.n, inner.n
    c = np.asarray(coupling, float)

    n = 2 * no + 2 * ni
    A = np.zeros((n, n), complex)
    iu, iq, iv, iQ = (slice(0, no), slice(no, 2 * no), slice(2 * no, 2 * no + ni), slice(2 * no + ni, n))
    eye_o = np.eye(no)
    eye_i = np.eye(ni)

    # exterior
    ext = assemble_operators(("S", "K"), outer, outer, omega, opts)
    Ke = ext["K"]
    Ke[np.diag_indices(no)] += 0.5
    uin = _columns(plane_wave(omega, d, outer.points))
    dun = _columns(plane_wave_normal_derivative(omega, d, outer.points, outer.normals))
    rhs = np.zeros((n, uin.shape[1]), complex)
    rhs[iu] = Ke @ uin - ext["S"] @ dun
    A[iu, iu] = Ke
    A[iu, iq] = -ext["S"] * c[None, :]
    del ext, Ke

    # shell rows on the rescaled outer boundary
    oo = assemble_operators(("S", "K"), twin, twin, kl, opts)
    A[iq, iu] = 0.5 * eye_o - oo["K"]
    A[iq, iq] = oo["S"]
    del oo
    oi = assemble_operators(("S", "K"), twin, inner, kl, opts)
    A[iq, iv] = oi["K"]
    A[iq, iQ] = -oi["S"]
    del oi
    # shell rows on the inner boundary
    io = assemble_operators(("S", "K"), inner, twin, kl, opts)
    A[iv, iu] = -io["K"]
    A[iv, iq] = io["S"]
    del io
    ii = assemble_operators(("S", "K"), inner, inner, kl, opts)
    A[iv, iv] = 0.5 * eye_i + ii["K"]
    A[iv, iQ] = -ii["S"]
    del ii
    # content rows
    aa = assemble_operators(("S", "K"), inner, inner, ka, opts)
    A[iQ, iv] = 0.5 * eye_i - aa["K"]
    A[iQ, iQ] = aa["S"] * (lossy.gamma / content.sigma_a)
    del aa

    system = DenseSystem(A, rhs, refine=True)
    try:
        sol = solve_dense(system)
    except SolverError as exc:
        raise ConditioningError(f"transmission system singular: {exc}", exc.condition) from exc
    if sol.condition > CONDITION_LIMIT:
        raise ConditioningError(f"transmission system condition {sol.condition:.3e} above {CONDITION_LIMIT:.0e}",
                                sol.condition)
    x = sol.x
    r = rhs - A @ x
    bn = max(np.linalg.norm(rhs), 1e-300)
    blocks = {name: float(np.linalg.norm(r[s]) / bn)
              for name, s in (("exterior", iu), ("shell_outer", iq), ("shell_inner", iv), ("content", iQ))}
    u, q, vi, Qi = x[iu], x[iq], x[iv], x[iQ]
    us = u - uin
    ps = c[:, None] * q - dun
    ff = far_field_cauchy(outer, us, ps, omega, grid, incident=d)
    if np.ndim(d) == 1:
        u, q, vi, Qi = u[:, 0], q[:, 0], vi[:, 0], Qi[:, 0]
        ff = FarField(ff.grid, d, ff.samples[:, 0])
    return CloakSolution(outer, inner, float(omega), d, lossy, content, c, float(det_b0), u, q, vi, Qi, ff,
                         sol.residual, sol.condition, blocks, model)


def solve_cloak(tube: TubeGeometry, lossy: LossyLayerSpec, content: ContentSpec, omega: float, d,
                directions=None, opts=DEFAULT_QUAD, model: str = "pushforward", inner_order: int | None = None,
                inner_h_max: float | None = None, inner_n_theta: int | None = None) -> CloakSolution:
    """Tube cloak about a straight generating segment."""
    if not isinstance(tube, TubeGeometry):
        raise ConfigError("solve_cloak expects a TubeGeometry")
    if not tube.curve.is_straight:
        raise UnsupportedGeometryError("solve_cloak supports straight generating segments only")
    outer = build_tube_surface(tube)
    inner = build_inner_surface(tube, order=inner_order, h_max=inner_h_max, n_theta=inner_n_theta)
    det_b0 = tube.delta ** -2
    c = coupling_factors(outer, lossy.gamma, det_b0, tube.delta, model)
    return solve_transmission(outer, inner, c, lossy, content, omega, d, directions, opts, det_b0, model)


def solve_screen_cloak(screen: ScreenGeometry, lossy: LossyLayerSpec, content: ContentSpec, omega: float, d,
                       directions=None, opts=DEFAULT_QUAD, model: str = "pushforward",
                       inner_order: int | None = None, inner_h_max: float | None = None) -> CloakSolution:
    """Screen cloak about the square in the x3 = 0 plane."""
    if not isinstance(screen, ScreenGeometry):
        raise ConfigError("solve_screen_cloak expects a ScreenGeometry")
    outer = build_screen_surface(screen)
    inner = build_inner_surface(screen, order=inner_order, h_max=inner_h_max)
    det_b0 = 1.0 / screen.delta
    c = coupling_factors(outer, lossy.gamma, det_b0, screen.delta, model)
    return solve_transmission(outer, inner, c, lossy, content, omega, d, directions, opts, det_b0, model)
