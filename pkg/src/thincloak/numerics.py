"""Quadrature rules, interpolation, direction grids, degree-1 harmonics and
dense complex solves."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import DomainError, SolverError

__all__ = [
    "gauss_legendre",
    "periodic_trapezoid",
    "quadrature_rule",
    "lagrange_matrix",
    "lagrange_derivative_matrix",
    "trig_matrix",
    "DirectionGrid",
    "incident_directions",
    "sph_harm_Y1",
    "addition_degree1",
    "DenseSystem",
    "DenseSolution",
    "solve_dense",
]


# ---------------------------------------------------------------- rules


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre rule on [-1, 1]."""
    if n < 1:
        raise DomainError(f"rule size must be >= 1, got {n}")
    return _leggauss(int(n))


def periodic_trapezoid(n: int) -> tuple[np.ndarray, np.ndarray]:
    """n-point trapezoid rule on [0, 2*pi), nodes 2*pi*k/n."""
    if n < 1:
        raise DomainError(f"rule size must be >= 1, got {n}")
    x = 2.0 * np.pi * np.arange(n) / n
    return x, np.full(n, 2.0 * np.pi / n)


def quadrature_rule(kind: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (nodes, weights) for ``gauss_legendre`` or ``periodic_trapezoid``."""
    if kind == "gauss_legendre":
        x, w = gauss_legendre(n)
        return x.copy(), w.copy()
    if kind == "periodic_trapezoid":
        return periodic_trapezoid(n)
    raise DomainError(f"unknown quadrature kind {kind!r}")


# -------------------------------------------------------- interpolation


@lru_cache(maxsize=64)
def _bary_weights(n: int) -> np.ndarray:
    x, _ = _leggauss(n)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / diff.prod(axis=1)


def lagrange_matrix(n: int, x: np.ndarray) -> np.ndarray:
    """Values of the n Lagrange cardinals on Gauss-Legendre nodes at points x.

    Barycentric form; exact rows at node coincidences. Shape x.shape + (n,).
    """
    nodes, _ = _leggauss(n)
    lam = _bary_weights(n)
    x = np.asarray(x, dtype=float)
    d = x[..., None] - nodes
    hit = d == 0.0
    d = np.where(hit, 1.0, d)
    t = lam / d
    out = t / t.sum(axis=-1, keepdims=True)
    if hit.any():
        rows = hit.any(axis=-1)
        out[rows] = hit[rows].astype(float)
    return out


@lru_cache(maxsize=64)
def lagrange_derivative_matrix(n: int) -> np.ndarray:
    """Differentiation matrix on n Gauss-Legendre nodes (d/dx on [-1, 1])."""
    x, _ = _leggauss(n)
    lam = _bary_weights(n)
    d = x[:, None] - x[None, :]
    np.fill_diagonal(d, 1.0)
    m = (lam[None, :] / lam[:, None]) / d
    np.fill_diagonal(m, 0.0)
    np.fill_diagonal(m, -m.sum(axis=1))
    return m


def trig_matrix(n: int, theta: np.ndarray) -> np.ndarray:
    """Periodic cardinal functions for nodes 2*pi*k/n evaluated at theta.

    For even n the Nyquist mode is split symmetrically. Shape theta.shape + (n,).
    """
    theta = np.asarray(theta, dtype=float)
    nodes = 2.0 * np.pi * np.arange(n) / n
    x = theta[..., None] - nodes
    half = 0.5 * x
    s = np.sin(half)
    small = np.abs(s) < 1e-14
    s_safe = np.where(small, 1.0, s)
    if n % 2:
        val = np.sin(n * half) / (n * s_safe)
    else:
        val = np.sin(n * half) * np.cos(half) / (n * s_safe)
    return np.where(small, 1.0, val)


# ------------------------------------------------------- direction grids


@dataclass(frozen=True)
class DirectionGrid:
    """Unit directions with quadrature weights on the sphere (sum 4*pi)."""

    directions: np.ndarray
    weights: np.ndarray
    shape: tuple[int, int] = (0, 0)

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        if d.ndim != 2 or d.shape[1] != 3:
            raise DomainError("directions must have shape (M, 3)")
        if not np.allclose(np.linalg.norm(d, axis=1), 1.0, atol=1e-12):
            raise DomainError("directions must be unit vectors")

    @classmethod
    def product(cls, n_theta: int = 12, n_phi: int = 24) -> DirectionGrid:
        """Gauss-Legendre in cos(theta) times uniform azimuth."""
        if n_theta < 1 or n_phi < 1:
            raise DomainError("grid resolutions must be positive")
        c, wc = gauss_legendre(n_theta)
        phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        cc, pp = np.meshgrid(c, phi, indexing="ij")
        ss = np.sqrt(1.0 - cc**2)
        dirs = np.stack([ss * np.cos(pp), ss * np.sin(pp), cc], axis=-1).reshape(-1, 3)
        w = np.repeat(wc, n_phi) * (2.0 * np.pi / n_phi)
        return cls(dirs, w, (n_theta, n_phi))

    def __len__(self) -> int:
        return len(self.directions)

    def integrate(self, values: np.ndarray) -> complex:
        return np.tensordot(self.weights, values, axes=(0, 0))

    def same_as(self, other: DirectionGrid) -> bool:
        return self.directions.shape == other.directions.shape and bool(
            np.array_equal(self.directions, other.directions)
        )


def incident_directions(n: int = 6) -> np.ndarray:
    """Deterministic spread of n incident directions.

    n = 6 uses one vertex from each antipodal pair of a regular icosahedron,
    tilted off the coordinate axes so none is exactly axial.
    """
    if n == 6:
        g = (1.0 + np.sqrt(5.0)) / 2.0
        v = np.array([[0, 1, g], [0, -1, g], [1, g, 0], [-1, g, 0], [g, 0, 1], [g, 0, -1]], float)
    else:
        # golden-angle spiral on the upper hemisphere
        k = np.arange(n) + 0.5
        z = 1.0 - k / n
        phi = np.pi * (3.0 - np.sqrt(5.0)) * k
        r = np.sqrt(1.0 - z**2)
        v = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    a = 0.3
    rot = np.array([[np.cos(a), 0, np.sin(a)], [0, 1, 0], [-np.sin(a), 0, np.cos(a)]])
    v = v @ rot.T
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# ----------------------------------------------------- degree-1 harmonics


def sph_harm_Y1(m: int, xhat: np.ndarray) -> np.ndarray:
    """Complex orthonormal Y_1^m with Condon-Shortley phase.

    Y_1^0 = c z,  Y_1^{+-1} = -+ c (x +- i y)/sqrt(2),  c = sqrt(3/(4 pi)).
    """
    xhat = np.asarray(xhat, dtype=float)
    if not np.allclose(np.linalg.norm(xhat, axis=-1), 1.0, atol=1e-10):
        raise DomainError("sph_harm_Y1 needs unit vectors")
    c = np.sqrt(3.0 / (4.0 * np.pi))
    x, y, z = xhat[..., 0], xhat[..., 1], xhat[..., 2]
    if m == 0:
        return c * z + 0j
    if m == 1:
        return -c * (x + 1j * y) / np.sqrt(2.0)
    if m == -1:
        return c * (x - 1j * y) / np.sqrt(2.0)
    raise DomainError(f"degree-1 order must be in {{-1,0,1}}, got {m}")


def addition_degree1(xhat: np.ndarray, yhat: np.ndarray) -> np.ndarray:
    """(4 pi/3) sum_m Y_1^m(xhat) conj(Y_1^m(yhat)); equals xhat . yhat."""
    s = sum(sph_harm_Y1(m, xhat) * np.conj(sph_harm_Y1(m, yhat)) for m in (-1, 0, 1))
    return (4.0 * np.pi / 3.0) * s


# ------------------------------------------------------------ dense solve


@dataclass
class DenseSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    refine: bool = False
    condition: float | None = field(default=None, init=False)

    def __post_init__(self):
        a = np.asarray(self.matrix)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"matrix must be square, got shape {a.shape}")
        b = np.asarray(self.rhs)
        if b.shape[0] != a.shape[0]:
            raise DomainError("right-hand side length does not match matrix")


@dataclass
class DenseSolution:
    x: np.ndarray
    residual: float
    condition: float
    lu: tuple = field(repr=False, default=None)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Reuse the factorization for new right-hand sides."""
        return sla.lu_solve(self.lu, rhs)


def _rcond(lu: np.ndarray, anorm: float) -> float:
    gecon = lapack.get_lapack_funcs("gecon", (lu,))
    rc, info = gecon(lu, anorm, norm="1")
    return float(rc) if info == 0 else 0.0


def solve_dense(system: DenseSystem) -> DenseSolution:
    """LU with partial pivoting, optional refinement step, residual and
    1-norm condition estimate."""
    a = np.asarray(system.matrix)
    b = np.asarray(system.rhs)
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise SolverError("non-finite entries in linear system")
    anorm = float(np.abs(a).sum(axis=0).max()) if a.size else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            lu = sla.lu_factor(a, check_finite=False)
        except (sla.LinAlgWarning, np.linalg.LinAlgError, ValueError) as exc:
            raise SolverError(f"matrix singular to working precision: {exc}", 0.0) from exc
    rc = _rcond(lu[0], anorm)
    cond = np.inf if rc == 0.0 else 1.0 / rc
    if rc < np.finfo(float).eps:
        raise SolverError(f"matrix singular to working precision (cond ~ {cond:.3e})", cond)
    x = sla.lu_solve(lu, b, check_finite=False)
    r = b - a @ x
    if system.refine:
        x = x + sla.lu_solve(lu, r, check_finite=False)
        r = b - a @ x
    bn = np.linalg.norm(b)
    res = float(np.linalg.norm(r) / bn) if bn > 0 else float(np.linalg.norm(r))
    system.condition = cond
    return DenseSolution(x=x, residual=res, condition=cond, lu=lu)
