"""Parameter sweeps over delta (and epsilon for screens) with incremental CSV output."""

from __future__ import annotations

import csv
import logging
import math
from pathlib import Path

import numpy as np

from ..asymptotics import curve_quadrature, panel_quadrature, screen_farfield, screen_K_operator, thin_soundhard_farfield
from ..errors import ThinCloakError
from ..geometry import CircularArc, ScreenGeometry, StraightSegment, TubeGeometry, build_screen_surface, build_tube_surface
from ..numerics import DirectionGrid, incident_directions
from ..potentials import QuadOptions, far_field
from ..solvers import ContentSpec, LossyLayerSpec, SoundHardSolver, energy_residual, solve_cloak, solve_screen_cloak
from .config import SweepConfig

__all__ = ["COLUMNS", "run_sweep", "read_table", "write_table", "epsilon_directions", "config_geometry"]

log = logging.getLogger(__name__)

COLUMNS = (
    "index", "kind", "delta", "epsilon", "omega", "n_outer", "n_inner",
    "sup_uinf", "sup_asym", "sup_diff", "condition", "residual",
    "energy_residual", "energy_relative", "status", "message",
)
_TEXT = ("kind", "status", "message")
_INT = ("index", "n_outer", "n_inner")


def epsilon_directions(eps: float, azimuths) -> np.ndarray:
    """Unit d with d.e3 = eps exactly, tilted out of grazing directions."""
    az = np.asarray(azimuths, float)
    c = math.sqrt(1.0 - eps * eps)
    return np.stack([c * np.cos(az), c * np.sin(az), np.full(az.shape, eps)], axis=1)


def _azimuths(cfg: SweepConfig) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    return 2.0 * np.pi * (np.arange(cfg.n_azimuths) + rng.uniform(0.0, 1.0)) / cfg.n_azimuths


def _curve(cfg: SweepConfig):
    if cfg.curve == "straight":
        return StraightSegment(end=(0.0, 0.0, cfg.length))
    return CircularArc(radius=cfg.arc_radius, angle=cfg.length / cfg.arc_radius)


def config_geometry(cfg: SweepConfig, delta: float):
    if cfg.kind.endswith("screen"):
        return ScreenGeometry(side=cfg.screen_side, delta=delta, order=cfg.screen_order, n_face=cfg.screen_n_face,
                              edge_width=cfg.screen_edge, side_order=cfg.side_order, corner_order=cfg.corner_order)
    return TubeGeometry(curve=_curve(cfg), delta=delta, n_theta=cfg.tube_n_theta, order=cfg.tube_order,
                        h_max=cfg.tube_h_max, cap_order=cfg.cap_order)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_table(rows, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in COLUMNS])


def read_table(path) -> list[dict]:
    rows = []
    with Path(path).open(newline="") as fh:
        for rec in csv.DictReader(fh):
            row = {}
            for k, v in rec.items():
                if k in _TEXT:
                    row[k] = v
                elif k in _INT:
                    row[k] = int(v)
                else:
                    row[k] = float(v)
            rows.append(row)
    return rows


def _row(cfg, index, delta, eps, **kw) -> dict:
    r = dict(index=index, kind=cfg.kind, delta=float(delta), epsilon=float(eps), omega=float(cfg.omega),
             n_outer=0, n_inner=0, sup_uinf=math.nan, sup_asym=math.nan, sup_diff=math.nan,
             condition=math.nan, residual=math.nan, energy_residual=math.nan, energy_relative=math.nan,
             status="ok", message="")
    r.update(kw)
    for k in ("sup_uinf", "sup_asym", "sup_diff", "condition", "residual", "energy_residual", "energy_relative"):
        r[k] = float(r[k])
    return r


def _optical_defect(surface, solver, phi, D, ff, omega) -> float:
    """Relative defect of (4 pi/w) Im u_inf(d, d) = int |u_inf|^2."""
    out = 0.0
    for m in range(D.shape[0]):
        fwd = far_field(surface, phi[:, m], omega, D[m][None, :]).samples[0]
        lhs = 4.0 * np.pi / omega * fwd.imag
        rhs = float(ff.grid.weights @ np.abs(ff.samples[:, m]) ** 2)
        out = max(out, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return out


def _tube_soundhard(cfg, delta, grid, opts):
    geom = config_geometry(cfg, delta)
    surf = build_tube_surface(geom)
    D = incident_directions(cfg.n_incident)
    solver = SoundHardSolver(surf, cfg.omega, opts)
    phi, res = solver.densities(D)
    ff = far_field(surf, phi, cfg.omega, grid, incident=D)
    cq = curve_quadrature(geom.curve)
    asym = thin_soundhard_farfield(cq, delta, cfg.omega, D, grid.directions, variant=cfg.variant)
    return [dict(n_outer=surf.n, sup_uinf=ff.sup, sup_asym=np.abs(asym).max(),
                 sup_diff=np.abs(ff.samples - asym).max(), condition=solver.condition, residual=res,
                 energy_relative=_optical_defect(surf, solver, phi, D, ff, cfg.omega))]


def _screen_soundhard(cfg, delta, grid, opts):
    geom = config_geometry(cfg, delta)
    surf = build_screen_surface(geom)
    az = _azimuths(cfg)
    D = np.vstack([epsilon_directions(e, az) for e in cfg.epsilons])
    solver = SoundHardSolver(surf, cfg.omega, opts)
    phi, res = solver.densities(D)
    ff = far_field(surf, phi, cfg.omega, grid, incident=D)
    panel = panel_quadrature(cfg.screen_side)
    op = screen_K_operator(panel, cfg.omega)
    asym = screen_farfield(panel, cfg.omega, D, grid, op).samples
    opt = _optical_defect(surf, solver, phi, D, ff, cfg.omega)
    n = len(az)
    out = []
    for k in range(len(cfg.epsilons)):
        s = slice(k * n, (k + 1) * n)
        out.append(dict(n_outer=surf.n, sup_uinf=np.abs(ff.samples[:, s]).max(),
                        sup_asym=np.abs(asym[:, s]).max(), sup_diff=np.abs(ff.samples[:, s] - asym[:, s]).max(),
                        condition=solver.condition, residual=res, energy_relative=opt))
    return out


def _cloak(cfg, delta, grid, opts):
    lossy = LossyLayerSpec(cfg.gamma, cfg.alpha, cfg.beta)
    content = ContentSpec(cfg.sigma_a, cfg.q_a)
    geom = config_geometry(cfg, delta)
    if cfg.kind == "cloak_tube":
        D = incident_directions(cfg.n_incident)
        sol = solve_cloak(geom, lossy, content, cfg.omega, D, grid, opts, cfg.model, inner_order=cfg.inner_order)
        groups = [slice(None)]
    else:
        az = _azimuths(cfg)
        D = np.vstack([epsilon_directions(e, az) for e in cfg.epsilons])
        sol = solve_screen_cloak(geom, lossy, content, cfg.omega, D, grid, opts, cfg.model,
                                 inner_order=cfg.inner_order)
        n = len(az)
        groups = [slice(k * n, (k + 1) * n) for k in range(len(cfg.epsilons))]
    e_abs = energy_residual(sol)
    e_rel = energy_residual(sol, relative=True)
    return [dict(n_outer=sol.outer.n, n_inner=sol.inner.n, sup_uinf=np.abs(sol.far_field.samples[:, s]).max(),
                 condition=sol.condition, residual=sol.residual, energy_residual=e_abs, energy_relative=e_rel)
            for s in groups]


_RUNNERS = {
    "soundhard_tube": _tube_soundhard,
    "asymptotic_compare": _tube_soundhard,
    "soundhard_screen": _screen_soundhard,
    "cloak_tube": _cloak,
    "cloak_screen": _cloak,
}


def run_sweep(cfg: SweepConfig, output=None) -> list[dict]:
    """Run every ladder point; rows are appended to the CSV as they finish.

    A failing point is recorded with status 'error' and the sweep goes on.
    """
    path = Path(output if output is not None else cfg.output)
    grid = DirectionGrid.product(cfg.n_theta_dirs, cfg.n_phi_dirs)
    opts = QuadOptions(near_factor=cfg.near_factor, leaf_order=cfg.leaf_order)
    eps_list = cfg.epsilons if cfg.kind.endswith("screen") else (0.0,)
    rows = []
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        fh.flush()
        for delta in cfg.deltas:
            log.info("%s: delta = %g", cfg.kind, delta)
            try:
                results = _RUNNERS[cfg.kind](cfg, delta, grid, opts)
                new = [_row(cfg, len(rows) + k, delta, e, **res) for k, (e, res) in enumerate(zip(eps_list, results))]
            except ThinCloakError as exc:
                log.warning("delta = %g failed: %s", delta, exc)
                new = [_row(cfg, len(rows) + k, delta, e, status="error", message=f"{type(exc).__name__}: {exc}")
                       for k, e in enumerate(eps_list)]
            for r in new:
                w.writerow([_fmt(r[c]) for c in COLUMNS])
            fh.flush()
            rows.extend(new)
    return rows
