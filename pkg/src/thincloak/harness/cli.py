"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DomainError, GeometryError, GridMismatchError, NumericalError, ThinCloakError

__all__ = ["main", "build_parser", "write_far_field", "read_far_field"]

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
FAR_FIELD_COLUMNS = ("x", "y", "z", "weight", "dx", "dy", "dz", "re", "im")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def write_far_field(ff, path) -> None:
    """One row per (direction, incident) pair."""
    samples = ff.samples if ff.samples.ndim == 2 else ff.samples[:, None]
    inc = np.atleast_2d(ff.incident)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FAR_FIELD_COLUMNS)
        for m in range(samples.shape[1]):
            for k, (xh, wt) in enumerate(zip(ff.grid.directions, ff.grid.weights)):
                v = samples[k, m]
                w.writerow([repr(float(a)) for a in (*xh, wt, *inc[m], v.real, v.imag)])


def read_far_field(path):
    from ..numerics import DirectionGrid  # noqa: PLC0415
    from ..potentials import FarField  # noqa: PLC0415

    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read far-field file {path}: {exc}") from exc
    if data.shape[1] != len(FAR_FIELD_COLUMNS):
        raise ConfigError(f"{path}: expected columns {','.join(FAR_FIELD_COLUMNS)}")
    inc, first = np.unique(data[:, 4:7], axis=0, return_index=True)
    order = np.argsort(first)
    inc = inc[order]
    m = len(inc)
    n = len(data) // m
    dirs = data[:n, 0:3]
    grid = DirectionGrid(dirs, data[:n, 3])
    samples = (data[:, 7] + 1j * data[:, 8]).reshape(m, n).T
    if m == 1:
        return FarField(grid, inc[0], samples[:, 0])
    return FarField(grid, inc, samples)


def _incident(args) -> np.ndarray:
    if args.epsilon is not None:
        from .sweep import epsilon_directions  # noqa: PLC0415

        return epsilon_directions(args.epsilon, [args.azimuth])[0]
    d = np.asarray(args.direction, float)
    n = np.linalg.norm(d)
    if n == 0:
        raise DomainError("incident direction must be nonzero")
    return d / n


def _grid(args):
    from ..numerics import DirectionGrid  # noqa: PLC0415

    return DirectionGrid.product(args.n_theta_dirs, args.n_phi_dirs)


def _tube(args):
    from ..geometry import CircularArc, StraightSegment, TubeGeometry  # noqa: PLC0415

    curve = StraightSegment(end=(0.0, 0.0, args.length)) if args.curve == "straight" else CircularArc(
        radius=args.arc_radius, angle=args.length / args.arc_radius)
    kw = {}
    if args.order:
        kw["order"] = args.order
    if args.n_theta:
        kw["n_theta"] = args.n_theta
    if args.h_max:
        kw["h_max"] = args.h_max
    return TubeGeometry(curve=curve, delta=args.delta, **kw)


def _screen(args):
    from ..geometry import ScreenGeometry  # noqa: PLC0415

    kw = {}
    if args.order:
        kw["order"] = args.order
    return ScreenGeometry(side=args.side, delta=args.delta, **kw)


def _report(out, **items):
    for k, v in items.items():
        print(f"{k}: {v}", file=out)


def cmd_solve_hard(args) -> int:
    from ..geometry import build_screen_surface, build_tube_surface, dump_surface, sphere_surface  # noqa: PLC0415
    from ..solvers import mie_sound_hard_sphere, solve_sound_hard  # noqa: PLC0415
    from .analysis import compare_fields  # noqa: PLC0415

    if args.geometry == "sphere":
        surf = sphere_surface(radius=args.radius, m=args.patches, order=args.order or 9)
    elif args.geometry == "tube":
        surf = build_tube_surface(_tube(args))
    else:
        surf = build_screen_surface(_screen(args))
    d = _incident(args)
    grid = _grid(args)
    t0 = time.perf_counter()
    sol = solve_sound_hard(surf, args.omega, d, grid)
    info = dict(nodes=surf.n, sup_uinf=sol.far_field.sup, condition=sol.condition, residual=sol.residual,
                seconds=round(time.perf_counter() - t0, 2))
    if args.geometry == "sphere":
        mie = mie_sound_hard_sphere(args.radius, args.omega, d, grid)
        info["mie_max_rel"] = compare_fields(mie, sol.far_field).max_rel
    _report(sys.stdout, **info)
    if args.output:
        write_far_field(sol.far_field, args.output)
    if args.dump_surface:
        dump_surface(surf, args.dump_surface)
    return EXIT_OK


def cmd_solve_cloak(args) -> int:
    from ..solvers import ContentSpec, LossyLayerSpec, energy_residual, solve_cloak, solve_screen_cloak  # noqa: PLC0415

    lossy = LossyLayerSpec(args.gamma, args.alpha, args.beta)
    try:
        q_a = complex(args.q_a.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"bad --q-a value {args.q_a!r}") from exc
    content = ContentSpec(args.sigma_a, q_a)
    d = _incident(args)
    grid = _grid(args)
    t0 = time.perf_counter()
    if args.geometry == "tube":
        sol = solve_cloak(_tube(args), lossy, content, args.omega, d, grid, model=args.model,
                          inner_order=args.inner_order)
    else:
        sol = solve_screen_cloak(_screen(args), lossy, content, args.omega, d, grid, model=args.model,
                                 inner_order=args.inner_order)
    _report(sys.stdout, outer_nodes=sol.outer.n, inner_nodes=sol.inner.n, sup_uinf=sol.sup,
            condition=sol.condition, residual=sol.residual, energy_relative=energy_residual(sol, relative=True),
            seconds=round(time.perf_counter() - t0, 2))
    if args.output:
        write_far_field(sol.far_field, args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .config import load_config  # noqa: PLC0415
    from .sweep import run_sweep  # noqa: PLC0415

    cfg = load_config(args.config)
    out = args.output or cfg.output
    rows = run_sweep(cfg, out)
    bad = sum(r["status"] != "ok" for r in rows)
    _report(sys.stdout, rows=len(rows), failed=bad, output=out)
    return EXIT_NUMERICAL if bad == len(rows) else EXIT_OK


def cmd_asymptotic(args) -> int:
    from ..asymptotics import curve_quadrature, panel_quadrature, screen_farfield, thin_soundhard_farfield  # noqa: PLC0415
    from ..potentials import FarField  # noqa: PLC0415

    d = _incident(args)
    grid = _grid(args)
    if args.geometry == "tube":
        geom = _tube(args)
        vals = thin_soundhard_farfield(curve_quadrature(geom.curve), args.delta, args.omega, d, grid.directions,
                                       variant=args.variant)
        ff = FarField(grid, d, vals)
    else:
        ff = screen_farfield(panel_quadrature(args.side), args.omega, d, grid)
    _report(sys.stdout, sup_uinf=ff.sup)
    if args.output:
        write_far_field(ff, args.output)
    return EXIT_OK


def cmd_compare(args) -> int:
    from .analysis import compare_fields  # noqa: PLC0415

    c = compare_fields(read_far_field(args.reference), read_far_field(args.other))
    _report(sys.stdout, max_abs=c.max_abs, max_rel=c.max_rel, rms=c.rms)
    return EXIT_OK


def cmd_selftest(args) -> int:
    """Fast checks: Laplace sphere identities and the sphere oracle."""
    from ..geometry import sphere_surface  # noqa: PLC0415
    from ..numerics import DirectionGrid  # noqa: PLC0415
    from ..potentials import assemble_operators, evaluate_potential  # noqa: PLC0415
    from ..solvers import mie_sound_hard_sphere, solve_sound_hard  # noqa: PLC0415
    from .analysis import compare_fields  # noqa: PLC0415

    s = sphere_surface(m=1, order=8)
    one = np.ones(s.n)
    M = assemble_operators(("K", "Kstar"), s, s, 0.0)
    checks = {
        "laplace K[1] = 1/2": float(np.abs(M["K"] @ one - 0.5).max()),
        "laplace (I/2+K*)[1] = 1": float(np.abs(0.5 + M["Kstar"] @ one - 1.0).max()),
        "laplace S[1](|x|=2) = -1/2": float(abs(evaluate_potential("S", s, one, [[0, 0, 2.0]], 0.0)[0] + 0.5)),
    }
    grid = DirectionGrid.product(8, 16)
    d = np.array([0.0, 0.0, 1.0])
    sol = solve_sound_hard(s, 1.0, d, grid)
    checks["sound-hard sphere vs series"] = compare_fields(mie_sound_hard_sphere(1.0, 1.0, d, grid),
                                                           sol.far_field).max_rel
    ok = True
    for name, err in checks.items():
        passed = err < 1e-4
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} {name}: {err:.2e}")
    return EXIT_OK if ok else EXIT_NUMERICAL


def _common(p, geometries):
    p.add_argument("--geometry", choices=geometries, default=geometries[0])
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--direction", type=float, nargs=3, default=(0.0, 0.0, 1.0), metavar=("DX", "DY", "DZ"))
    p.add_argument("--epsilon", type=float, default=None, help="tilt d.e3 = epsilon out of grazing")
    p.add_argument("--azimuth", type=float, default=0.0)
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument("--curve", choices=("straight", "arc"), default="straight")
    p.add_argument("--arc-radius", type=float, default=2.0)
    p.add_argument("--side", type=float, default=1.0)
    p.add_argument("--order", type=int, default=None, help="panel order override")
    p.add_argument("--n-theta", type=int, default=None, help="tube angular nodes override")
    p.add_argument("--h-max", type=float, default=None, help="tube panel length override")
    p.add_argument("--n-theta-dirs", type=int, default=12)
    p.add_argument("--n-phi-dirs", type=int, default=24)
    p.add_argument("--output", default=None, help="far-field CSV path")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="thincloak", description="Thin-body scattering and lossy-layer cloak experiments.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sh = sub.add_parser("solve-hard", help="sound-hard scattering by a sphere, tube or screen")
    _common(sh, ("sphere", "tube", "screen"))
    sh.add_argument("--radius", type=float, default=1.0)
    sh.add_argument("--patches", type=int, default=2)
    sh.add_argument("--dump-surface", default=None)
    sh.set_defaults(func=cmd_solve_hard)

    sc = sub.add_parser("solve-cloak", help="lossy-layer cloak about a tube or screen")
    _common(sc, ("tube", "screen"))
    sc.add_argument("--gamma", type=float, default=1.0)
    sc.add_argument("--alpha", type=float, default=1.0)
    sc.add_argument("--beta", type=float, default=1.0)
    sc.add_argument("--sigma-a", type=float, default=1.0)
    sc.add_argument("--q-a", default="1")
    sc.add_argument("--model", choices=("pushforward", "uniform"), default="pushforward")
    sc.add_argument("--inner-order", type=int, default=None, help="inner body panel order override")
    sc.set_defaults(func=cmd_solve_cloak)

    sw = sub.add_parser("sweep", help="run a configured delta/epsilon sweep")
    sw.add_argument("--config", required=True)
    sw.add_argument("--output", default=None)
    sw.set_defaults(func=cmd_sweep)

    asy = sub.add_parser("asymptotic", help="evaluate the thin-body far-field formulas")
    _common(asy, ("tube", "screen"))
    asy.add_argument("--variant", choices=("corrected", "literal"), default="corrected")
    asy.set_defaults(func=cmd_asymptotic)

    cmp_ = sub.add_parser("compare", help="compare two far-field CSV files")
    cmp_.add_argument("reference")
    cmp_.add_argument("other")
    cmp_.set_defaults(func=cmd_compare)

    st = sub.add_parser("selftest", help="quick correctness checks")
    st.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DomainError, GeometryError, GridMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ThinCloakError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
