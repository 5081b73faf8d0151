"""Acceptance criteria C1-C7, run at desk scale.

Every test records its measurements with the ``acceptance`` fixture before
asserting, so the terminal summary prints one PASS/FAIL line per criterion.
Parts that cannot be met are strict xfails and show up as FAIL in that
summary.
"""

import time

import numpy as np
import pytest

from thincloak.geometry import TubeGeometry, build_tube_surface
from thincloak.harness import SweepConfig, fit_rate, run_sweep
from thincloak.numerics import DirectionGrid
from thincloak.potentials import assemble_operators, evaluate_potential, far_field
from thincloak.solvers import (
    SoundHardSolver,
    mie_sound_hard_sphere,
    plane_wave,
    plane_wave_normal_derivative,
)

pytestmark = pytest.mark.slow

LADDER = (0.2, 0.14, 0.1, 0.07, 0.05)
CONTENTS = {"(1, 1)": (1.0, 1.0), "(5, 2+3i)": (5.0, 2 + 3j), "(0.2, 10+0.5i)": (0.2, 10 + 0.5j)}
SCREEN_EPS = (0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001)


def _timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


def _sweep(tmp_path_factory, name, **kw):
    cfg = SweepConfig(**kw)
    path = tmp_path_factory.mktemp("acceptance") / f"{name}.csv"
    rows, seconds = _timed(run_sweep, cfg, path)
    return rows, seconds, path


def _ok_rows(rows):
    return [r for r in rows if r["status"] == "ok"]


# ------------------------------------------------------------ shared sweeps


@pytest.fixture(scope="module")
def thin_sweep(tmp_path_factory):
    return _sweep(tmp_path_factory, "thin", kind="asymptotic_compare", deltas=LADDER)


@pytest.fixture(scope="module")
def cloak_sweeps(tmp_path_factory):
    out = {}
    for label, (s, q) in CONTENTS.items():
        out[label] = _sweep(tmp_path_factory, f"cloak_{s}", kind="cloak_tube", deltas=LADDER, sigma_a=s, q_a=q)
    return out


@pytest.fixture(scope="module")
def screen_grazing(tmp_path_factory):
    return _sweep(tmp_path_factory, "screen_grazing", kind="cloak_screen", deltas=LADDER, epsilons=(0.0,))


@pytest.fixture(scope="module")
def screen_eps(tmp_path_factory):
    return _sweep(tmp_path_factory, "screen_eps", kind="cloak_screen", deltas=(0.01,), epsilons=SCREEN_EPS)


@pytest.fixture(scope="module")
def screen_hard(tmp_path_factory):
    return _sweep(tmp_path_factory, "screen_hard", kind="soundhard_screen", deltas=LADDER, epsilons=(0.1, 0.0))


# ---------------------------------------------------------------- C1


def _density(s):
    x = s.points
    return np.exp(1j * x[:, 2]) * (1 + 0.3 * x[:, 0])


def _layer_errors(s, kappa, h0=0.001):
    """Jump relations by one-sided polynomial extrapolation, the interior
    Green identity and the Calderon identity K S = S K*.

    Probes sit at h0, ..., 6 h0 along the normal; with a degree-5 fit the
    truncation error stays well below 1e-3 for curvature radii down to 0.2.
    """
    M = assemble_operators(("S", "K", "Kstar"), s, s, kappa)
    phi = _density(s)
    idx = np.arange(0, s.n, max(1, s.n // 40))
    hs = h0 * np.arange(1, 7)
    S_on = M["S"][idx] @ phi
    errs = {}
    for sign, side in ((1, "+"), (-1, "-")):
        vals = [evaluate_potential("S", s, phi, s.points[idx] + sign * h * s.normals[idx], kappa) for h in hs]
        dn = sign * np.polyfit(np.r_[0.0, hs], np.vstack([S_on[None], vals]), 5)[-2]
        ref = sign * 0.5 * phi[idx] + M["Kstar"][idx] @ phi
        errs[f"dS{side}"] = np.abs(dn - ref).max() / np.abs(ref).max()
        dv = [evaluate_potential("D", s, phi, s.points[idx] + sign * h * s.normals[idx], kappa) for h in hs]
        trace = np.polyfit(hs, np.array(dv), 5)[-1]
        refd = -sign * 0.5 * phi[idx] + M["K"][idx] @ phi
        errs[f"D{side}"] = np.abs(trace - refd).max() / np.abs(refd).max()
    d = np.array([0.3, 0.4, np.sqrt(0.75)])
    ui = plane_wave(kappa, d, s.points)
    dui = plane_wave_normal_derivative(kappa, d, s.points, s.normals)
    errs["green"] = np.abs(-0.5 * ui + M["K"] @ ui - M["S"] @ dui).max()
    C = M["K"] @ (M["S"] @ phi) - M["S"] @ (M["Kstar"] @ phi)
    errs["calderon"] = np.linalg.norm(C) / np.linalg.norm(M["S"] @ phi)
    return errs


def test_c1_layer_potentials(acceptance, sphere, tube02):
    t = time.perf_counter()
    worst = {}
    for name, s in (("sphere", sphere), ("tube 0.2", tube02)):
        e = _layer_errors(s, 1.0)
        worst[name] = max(e.values())
    lap = assemble_operators(("S", "Kstar"), sphere, sphere, 0.0)
    one = np.ones(sphere.n)
    lap_errs = (np.abs(0.5 * one + lap["Kstar"] @ one - 1.0).max(),
                abs(evaluate_potential("S", sphere, one, [[0, 0, 2.0]], 0.0)[0] + 0.5))
    seconds = time.perf_counter() - t
    ok = max(worst.values()) < 1e-3 and max(lap_errs) < 1e-4 and seconds < 120
    acceptance("C1", "jump, Green and Calderon < 1e-3; Laplace forms < 1e-4; < 2 min", ok,
               f"sphere {worst['sphere']:.1e} ({sphere.n} nodes), tube {worst['tube 0.2']:.1e} ({tube02.n} nodes), "
               f"Laplace {max(lap_errs):.1e}, {seconds:.0f} s")
    assert ok


# ---------------------------------------------------------------- C2


def test_c2_mie_oracle(acceptance, sphere):
    t = time.perf_counter()
    grid = DirectionGrid.product(12, 24)
    d = np.array([0.0, 0.0, 1.0])
    bie = SoundHardSolver(sphere, 1.0).solve(d, grid).far_field.samples
    mie = mie_sound_hard_sphere(1.0, 1.0, d, grid).samples
    err = np.abs(bie - mie).max() / np.abs(mie).max()
    seconds = time.perf_counter() - t
    ok = err < 1e-3 and seconds < 60
    acceptance("C2", "sound-hard sphere vs Mie < 1e-3; < 1 min", ok,
               f"max rel {err:.1e} at {sphere.n} nodes, {seconds:.0f} s")
    assert ok


# ---------------------------------------------------------------- C3


def test_c3_thin_tube_expansion(acceptance, thin_sweep):
    rows, seconds, _ = thin_sweep
    full = fit_rate(rows, "delta", "sup_uinf")
    diff = fit_rate(rows, "delta", "sup_diff")
    ok = abs(full.exponent - 2) <= 0.2 and diff.exponent >= 2.5 and seconds < 600
    acceptance("C3", "BIE exponent 2 +- 0.2, |BIE - formula| exponent >= 2.5; < 10 min", ok,
               f"BIE {full.exponent:.3f}, difference {diff.exponent:.3f} (corrected coefficient), {seconds:.0f} s")
    assert ok


@pytest.mark.xfail(strict=True, reason="literal transcription of the thin-tube formula misses part of the "
                                       "delta^2 term; difference decays only like delta^2")
def test_c3_literal_formula(acceptance, tmp_path_factory):
    rows, seconds, _ = _sweep(tmp_path_factory, "thin_literal", kind="asymptotic_compare", deltas=LADDER,
                              variant="literal")
    diff = fit_rate(rows, "delta", "sup_diff")
    ok = diff.exponent >= 2.5
    acceptance("C3", "literal-coefficient formula, difference exponent >= 2.5", ok,
               f"difference {diff.exponent:.3f}, {seconds:.0f} s")
    assert ok


# ---------------------------------------------------------------- C4


def test_c4_full_cloak_rate(acceptance, cloak_sweeps):
    fits, times = {}, {}
    for label, (rows, seconds, _) in cloak_sweeps.items():
        good = _ok_rows(rows)
        fits[label] = fit_rate(good, "delta", "sup_uinf") if len(good) == len(rows) else None
        times[label] = seconds
    ok_fit = all(f is not None and 1.8 <= f.exponent <= 2.3 for f in fits.values())
    consts = [f.constant for f in fits.values() if f is not None]
    spread = max(consts) / min(consts) if len(consts) == len(fits) else float("inf")
    ok = ok_fit and spread <= 3 and max(times.values()) < 900
    detail = ", ".join(f"{k}: p={f.exponent:.3f} C={f.constant:.3g}" if f else f"{k}: failed rows"
                       for k, f in fits.items())
    acceptance("C4", "exponent in [1.8, 2.3], constants within x3; < 15 min per content", ok,
               f"{detail}; spread {spread:.2f}, slowest {max(times.values()):.0f} s")
    assert ok


# ---------------------------------------------------------------- C5


def test_c5_screen_grazing_rate(acceptance, screen_grazing):
    rows, seconds, _ = screen_grazing
    fit = fit_rate(_ok_rows(rows), "delta", "sup_uinf")
    ok = len(_ok_rows(rows)) == len(rows) and abs(fit.exponent - 1) <= 0.2 and seconds < 900
    acceptance("C5", "grazing screen cloak exponent 1 +- 0.2", ok, f"p={fit.exponent:.3f}, {seconds:.0f} s")
    assert ok


@pytest.mark.xfail(strict=True, reason="at delta = 0.01 the eps-dependent part of the far field is two orders "
                                       "smaller than the delta part, so sup|u_inf| is nearly flat in eps")
def test_c5_screen_eps_slope(acceptance, screen_eps):
    rows, seconds, _ = screen_eps
    far = [r for r in _ok_rows(rows) if r["epsilon"] >= 2 * r["delta"]]
    fit = fit_rate(far, "epsilon", "sup_uinf")
    ok = abs(fit.exponent - 1) <= 0.2
    acceptance("C5", "eps slope 1 +- 0.2 at delta = 0.01 for eps >> delta", ok,
               f"p={fit.exponent:.3f} over eps {sorted(r['epsilon'] for r in far)}, {seconds:.0f} s")
    assert ok


def test_c5_screen_formula_grazing(acceptance, screen_hard):
    rows, seconds, _ = screen_hard
    graze = [r for r in _ok_rows(rows) if r["epsilon"] == 0.0]
    fit = fit_rate(graze, "delta", "sup_diff")
    ok = len(graze) == len(LADDER) and fit.exponent >= 1 and seconds < 900
    acceptance("C5", "sound-hard screen |BIE - K formula| exponent >= 1, grazing", ok,
               f"p={fit.exponent:.3f}, {seconds:.0f} s")
    assert ok


def test_c5_screen_formula_oblique(acceptance, screen_hard):
    rows, _, _ = screen_hard
    tilt = [r for r in _ok_rows(rows) if r["epsilon"] == 0.1]
    fit = fit_rate(tilt, "delta", "sup_diff")
    ok = len(tilt) == len(LADDER) and fit.exponent >= 1
    acceptance("C5", "sound-hard screen |BIE - K formula| exponent >= 1, eps = 0.1", ok, f"p={fit.exponent:.3f}")
    assert ok


# ---------------------------------------------------------------- C6


def test_c6_energy_balance(acceptance, cloak_sweeps, screen_grazing, screen_eps):
    rows = [r for s in cloak_sweeps.values() for r in s[0]] + screen_grazing[0] + screen_eps[0]
    good = _ok_rows(rows)
    worst = max(r["energy_relative"] for r in good)
    ok = len(good) == len(rows) and worst < 1e-6
    acceptance("C6", "energy balance < 1e-6 relative on every cloak solve", ok,
               f"worst {worst:.2e} over {len(good)} rows ({len(rows) - len(good)} failed)")
    assert ok


def test_c6_reciprocity(acceptance, rng):
    surf = build_tube_surface(TubeGeometry(delta=0.2))
    solver = SoundHardSolver(surf, 1.0)
    v = rng.normal(size=(20, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    xh, d = v[:10], v[10:]
    phi_d, _ = solver.densities(d)
    phi_x, _ = solver.densities(-xh)
    err = 0.0
    for m in range(10):
        a = far_field(surf, phi_d[:, m], 1.0, xh[m][None, :]).samples[0]
        b = far_field(surf, phi_x[:, m], 1.0, -d[m][None, :]).samples[0]
        err = max(err, abs(a - b) / max(abs(a), abs(b)))
    ok = err < 1e-4
    acceptance("C6", "sound-hard reciprocity < 1e-4 on 10 random pairs", ok, f"max rel {err:.1e}")
    assert ok


# ---------------------------------------------------------------- C7


def test_c7_determinism(acceptance, tmp_path):
    configs = {
        "soundhard_tube": dict(kind="soundhard_tube", deltas=(0.2, 0.1)),
        "cloak_tube": dict(kind="cloak_tube", deltas=(0.2,), tube_n_theta=8, tube_order=6, tube_h_max=0.5,
                           cap_order=6, inner_order=6),
    }
    same = {}
    for name, kw in configs.items():
        cfg = SweepConfig(**kw)
        a, b = tmp_path / f"{name}_a.csv", tmp_path / f"{name}_b.csv"
        run_sweep(cfg, a)
        run_sweep(cfg, b)
        same[name] = a.read_bytes() == b.read_bytes()
    ok = all(same.values())
    acceptance("C7", "repeated sweeps give byte-identical CSV", ok,
               ", ".join(f"{k}: {'identical' if v else 'differs'}" for k, v in same.items()))
    assert ok
