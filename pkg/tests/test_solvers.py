import dataclasses
import warnings

import numpy as np
import pytest

from thincloak.errors import ConditioningError, ConfigError, DomainError, ResonanceError, UnsupportedGeometryError
from thincloak.geometry import (
    CircularArc,
    ScreenGeometry,
    TubeGeometry,
    build_inner_surface,
    build_tube_surface,
    graded_breaks,
    sphere_surface,
    tube_body,
)
from thincloak.harness import compare_fields
from thincloak.numerics import DirectionGrid
from thincloak.solvers import (
    ContentSpec,
    LossyLayerSpec,
    SoundHardSolver,
    coupling_factors,
    energy_balance,
    energy_residual,
    mie_coefficients,
    mie_sound_hard_sphere,
    plane_wave,
    solve_cloak,
    solve_screen_cloak,
    solve_sound_hard,
    solve_transmission,
)
from thincloak.solvers import cloak as cloak_module

D3 = np.array([0.0, 0.0, 1.0])


def _random_units(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# ------------------------------------------------------------------- Mie


def test_mie_truncation_converged(grid):
    a = mie_sound_hard_sphere(1.0, 3.0, D3, grid, truncation=14).samples
    b = mie_sound_hard_sphere(1.0, 3.0, D3, grid, truncation=19).samples
    assert np.abs(a - b).max() < 1e-12


def test_mie_warns_on_short_truncation(grid):
    with pytest.warns(RuntimeWarning, match="truncation"):
        mie_sound_hard_sphere(1.0, 1.0, D3, grid, truncation=3)


def test_mie_rotational_symmetry(rng):
    for _ in range(20):
        d1, d2 = _random_units(rng, 2)
        angle = rng.uniform(0, np.pi)
        # directions at the same angle to d1 and d2
        def at_angle(d):
            p = np.cross(d, _random_units(rng, 1)[0])
            p /= np.linalg.norm(p)
            return np.cos(angle) * d + np.sin(angle) * p
        a = mie_sound_hard_sphere(1.0, 2.0, d1, [at_angle(d1)]).samples[0]
        b = mie_sound_hard_sphere(1.0, 2.0, d2, [at_angle(d2)]).samples[0]
        assert abs(a - b) < 1e-12


def test_mie_rayleigh_scaling(grid):
    ratios = []
    for w in (0.05, 0.1):
        a = 0.1 / w
        ratios.append(mie_sound_hard_sphere(a, w, D3, grid).sup / (w**2 * a**3))
    assert abs(ratios[0] / ratios[1] - 1) < 0.02


def test_mie_coefficient_definition():
    from scipy.special import spherical_jn, spherical_yn

    a = mie_coefficients(1.0, 2.0, 5)
    n = np.arange(6)
    jp = spherical_jn(n, 2.0, True)
    hp = jp + 1j * spherical_yn(n, 2.0, True)
    assert np.allclose(a, -jp / hp, rtol=1e-14)


def test_mie_off_center_translation(grid):
    c = np.array([0.3, -0.2, 0.1])
    a = mie_sound_hard_sphere(1.0, 1.0, D3, grid, center=c).samples
    b = mie_sound_hard_sphere(1.0, 1.0, D3, grid).samples
    assert np.allclose(np.abs(a), np.abs(b), atol=1e-14)


def test_mie_bad_input(grid):
    with pytest.raises(DomainError):
        mie_sound_hard_sphere(-1.0, 1.0, D3, grid)


# ------------------------------------------------------------ sound hard


@pytest.fixture(scope="module")
def sphere_solver(sphere):
    return SoundHardSolver(sphere, 1.0)


def test_sound_hard_sphere_matches_mie(sphere_solver, grid):
    sol = sphere_solver.solve(D3, grid)
    err = compare_fields(mie_sound_hard_sphere(1.0, 1.0, D3, grid), sol.far_field).max_rel
    assert err < 1e-3
    assert sol.residual < 1e-10


def test_sound_hard_reciprocity(sphere_solver, rng):
    s = sphere_solver.surface
    xs, ds = _random_units(rng, 10), _random_units(rng, 10)
    phi, _ = sphere_solver.densities(np.vstack([ds, -xs]))
    from thincloak.potentials import far_field

    for k in range(10):
        a = far_field(s, phi[:, k], 1.0, [xs[k]]).samples[0]
        b = far_field(s, phi[:, 10 + k], 1.0, [-ds[k]]).samples[0]
        assert abs(a - b) < 1e-4


def test_sound_hard_neumann_condition(sphere_solver):
    s = sphere_solver.surface
    phi, _ = sphere_solver.densities(D3)
    idx = np.arange(0, s.n, 97)
    x, nu = s.points[idx], s.normals[idx]
    h = 1e-3
    hs = h * np.arange(1, 5)
    tot = [sphere_solver.scattered(phi, x + t * nu) + plane_wave(1.0, D3, x + t * nu) for t in hs]
    dn = np.polyfit(hs, np.array(tot), 3)[-2]
    assert np.abs(dn).max() < 1e-3


def test_exterior_field_satisfies_helmholtz(sphere_solver):
    phi, _ = sphere_solver.densities(D3)
    p = np.array([0.4, -1.1, 1.3])
    h = 1e-2
    offs = np.vstack([np.zeros(3), h * np.eye(3), -h * np.eye(3)])
    u = sphere_solver.scattered(phi, p + offs)
    lap = (u[1:4].sum() + u[4:].sum() - 6 * u[0]) / h**2
    assert abs(lap + u[0]) < 1e-4 * abs(u[0]) + 1e-4


def test_optical_theorem(sphere_solver, grid):
    sol = sphere_solver.solve(D3, grid)
    from thincloak.potentials import far_field

    fwd = far_field(sphere_solver.surface, sol.density.values, 1.0, [D3]).samples[0]
    total = grid.integrate(np.abs(sol.far_field.samples) ** 2)
    assert abs(4 * np.pi * fwd.imag - total) / total < 1e-4


def test_multiple_incidences_linear(sphere_solver):
    D = np.array([[0, 0, 1.0], [1.0, 0, 0]])
    phi, _ = sphere_solver.densities(D)
    p0, _ = sphere_solver.densities(D[0])
    p1, _ = sphere_solver.densities(D[1])
    assert np.allclose(phi[:, 0], p0, atol=1e-13) and np.allclose(phi[:, 1], p1, atol=1e-13)


def test_rayleigh_doubling():
    s = sphere_surface(radius=0.05, m=1, order=6)
    g = DirectionGrid.product(6, 12)
    a = solve_sound_hard(s, 0.5, D3, g).far_field.sup
    b = solve_sound_hard(s, 1.0, D3, g).far_field.sup
    assert abs(b / a / 4 - 1) < 0.05


def test_resonance_detected(small_sphere):
    # first interior Dirichlet eigenvalue of the unit sphere: sin(w) = 0
    with pytest.raises(ResonanceError, match="combined-field"):
        solve_sound_hard(small_sphere, np.pi, D3)


def test_sound_hard_bad_omega(small_sphere):
    with pytest.raises(DomainError):
        solve_sound_hard(small_sphere, 0.0, D3)


def test_solution_unpacks(small_sphere):
    phi, ff = solve_sound_hard(small_sphere, 1.0, D3, DirectionGrid.product(4, 8))
    assert phi.values.shape == (small_sphere.n,) and ff.samples.shape == (32,)


# ------------------------------------------------------------------ specs


def test_lossy_wavenumber_branch():
    k = LossyLayerSpec(1.0, 1.0, 1.0).wavenumber(2.0)
    assert k.imag > 0 and abs(k**2 - 4 * (1 + 1j)) < 1e-12
    assert LossyLayerSpec(2.0, 1.0, 0.0).wavenumber(1.0).imag == 0


def test_content_wavenumber_branch():
    k = ContentSpec(5.0, 2 + 3j).wavenumber(1.0)
    assert k.imag >= 0 and abs(k**2 - (2 + 3j) / 5) < 1e-12


@pytest.mark.parametrize("kw", [dict(gamma=0), dict(alpha=-1), dict(beta=-0.1)])
def test_lossy_invalid(kw):
    with pytest.raises(DomainError):
        LossyLayerSpec(**kw)


@pytest.mark.parametrize("kw", [dict(sigma_a=0), dict(q_a=-1), dict(q_a=1 - 1j)])
def test_content_invalid(kw):
    with pytest.raises(DomainError):
        ContentSpec(**kw)


# ------------------------------------------------------------------ cloak

COARSE_TUBE = dict(n_theta=8, order=6, h_max=0.5, cap_order=6)


@pytest.fixture(scope="module")
def cloak02():
    tube = TubeGeometry(delta=0.2, **COARSE_TUBE)
    return solve_cloak(tube, LossyLayerSpec(), ContentSpec(), 1.0, np.array([D3, [1.0, 0, 0]]),
                       DirectionGrid.product(8, 16), inner_order=6)


def test_cloak_trivial_tube():
    # default resolution: the coarse mesh leaves a 4e-5 discretization error on this fat body
    sol = solve_cloak(TubeGeometry(delta=1.0), LossyLayerSpec(1, 1, 0), ContentSpec(1, 1), 1.0, D3,
                      DirectionGrid.product(8, 16))
    assert sol.sup < 1e-6
    assert energy_residual(sol) < 1e-10


def test_cloak_trivial_screen():
    # at delta = 1 the faces need no edge strips, two uniform panels suffice
    scr = ScreenGeometry(delta=1.0, n_face=2, edge_width=0.0)
    sol = solve_screen_cloak(scr, LossyLayerSpec(1, 1, 0), ContentSpec(1, 1), 1.0, [1.0, 0, 0],
                             DirectionGrid.product(8, 16))
    assert sol.sup < 1e-6
    assert energy_residual(sol) < 1e-10


def test_cloak_diagnostics(cloak02):
    assert cloak02.residual < 1e-10
    assert all(v < 1e-10 for v in cloak02.block_residuals.values())
    assert np.isfinite(cloak02.condition)
    assert cloak02.far_field.samples.shape == (128, 2)
    assert energy_residual(cloak02, relative=True) < 1e-5


def test_cloak_energy_terms_signs(cloak02):
    eb = energy_balance(cloak02)
    assert np.all(eb.radiated > 0)
    # absorbed plus scattered power is nonnegative (lossy layer, beta > 0)
    assert np.all(eb.radiated + eb.absorbed_layer + eb.absorbed_content > 0)
    assert np.all(eb.absorbed_layer > 0)


def test_cloak_linearity(cloak02):
    tube = TubeGeometry(delta=0.2, **COARSE_TUBE)
    one = solve_cloak(tube, LossyLayerSpec(), ContentSpec(), 1.0, D3, DirectionGrid.product(8, 16), inner_order=6)
    assert np.allclose(one.far_field.samples, cloak02.far_field.samples[:, 0], atol=1e-12)


def test_transparent_content_makes_interface_invisible():
    """Content equal to the shell medium: the far field cannot depend on where
    the inner interface sits."""
    tube = TubeGeometry(delta=0.2, **COARSE_TUBE)
    lossy = LossyLayerSpec(1.0, 1.0, 1.0)
    content = ContentSpec(lossy.gamma, complex(lossy.alpha, lossy.beta))
    outer = build_tube_surface(tube)
    g = DirectionGrid.product(8, 16)
    c = coupling_factors(outer, lossy.gamma, tube.delta**-2, tube.delta)
    fields = []
    for r in (0.5, 0.7):
        br = graded_breaks(0.0, 1.0, r, 0.5)
        inner = tube_body(tube.curve, r, br, 8, 6, 0, 6, body="inner")
        sol = solve_transmission(outer, inner, c, lossy, content, 1.0, D3, g, det_b0=tube.delta**-2)
        fields.append(sol.far_field)
    assert compare_fields(fields[0], fields[1]).max_rel < 1e-3


def test_coupling_factors_tube():
    tube = TubeGeometry(delta=0.1, **COARSE_TUBE)
    s = build_tube_surface(tube)
    c = coupling_factors(s, 2.0, tube.delta**-2, tube.delta)
    assert np.allclose(c[s.tag_mask("facade")], 2.0 * 0.1)
    assert np.allclose(c[s.tag_mask("capA", "capB")], 2.0)
    u = coupling_factors(s, 2.0, tube.delta**-2, tube.delta, model="uniform")
    assert np.allclose(u, 0.2)
    with pytest.raises(ConfigError):
        coupling_factors(s, 2.0, 1.0, 0.1, model="other")


def test_cloak_curved_rejected():
    tube = TubeGeometry(curve=CircularArc(radius=2.0, angle=0.5), delta=0.1)
    with pytest.raises(UnsupportedGeometryError):
        solve_cloak(tube, LossyLayerSpec(), ContentSpec(), 1.0, D3)


def test_cloak_conditioning_error(monkeypatch):
    monkeypatch.setattr(cloak_module, "CONDITION_LIMIT", 1.0)
    tube = TubeGeometry(delta=0.5, **COARSE_TUBE)
    with pytest.raises(ConditioningError) as info:
        solve_cloak(tube, LossyLayerSpec(), ContentSpec(), 1.0, D3, DirectionGrid.product(4, 8), inner_order=4)
    assert info.value.condition > 1.0


def test_cloak_wrong_geometry_type():
    with pytest.raises(ConfigError):
        solve_cloak(ScreenGeometry(), LossyLayerSpec(), ContentSpec(), 1.0, D3)
    with pytest.raises(ConfigError):
        solve_screen_cloak(TubeGeometry(), LossyLayerSpec(), ContentSpec(), 1.0, D3)
