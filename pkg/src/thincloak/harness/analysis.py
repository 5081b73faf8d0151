"""Rate fitting and far-field comparison."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FitError, GridMismatchError

__all__ = ["RateFit", "fit_rate", "FieldComparison", "compare_fields"]


@dataclass(frozen=True)
class RateFit:
    exponent: float
    log_constant: float
    r2: float
    ladder: tuple

    @property
    def constant(self) -> float:
        return float(np.exp(self.log_constant))


def _column(table, name):
    if isinstance(table, dict):
        return np.asarray(table[name], float)
    return np.asarray([row[name] for row in table], float)


def fit_rate(table, x: str, y: str) -> RateFit:
    """Least squares of log y against log x: y ~ C x^p."""
    xs, ys = _column(table, x), _column(table, y)
    if len(xs) < 3:
        raise FitError("a rate fit needs at least 3 points")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise FitError("non-finite values in fit data")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise FitError("rate fit needs positive values")
    lx, ly = np.log(xs), np.log(ys)
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    (p, c), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ np.array([p, c])
    ss = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return RateFit(float(p), float(c), r2, tuple(float(v) for v in xs))


@dataclass(frozen=True)
class FieldComparison:
    max_abs: float
    max_rel: float
    rms: float


def compare_fields(a, b) -> FieldComparison:
    """Errors of b against reference a on a shared grid; max_rel is scaled
    by sup |a|."""
    if not a.grid.same_as(b.grid):
        raise GridMismatchError("far fields sampled on different direction grids")
    sa, sb = np.asarray(a.samples), np.asarray(b.samples)
    if sa.shape != sb.shape:
        raise GridMismatchError("far-field sample shapes differ")
    diff = np.abs(sa - sb)
    max_abs = float(diff.max()) if diff.size else 0.0
    ref = float(np.abs(sa).max()) if sa.size else 0.0
    if ref > 0:
        max_rel = max_abs / ref
    else:
        max_rel = 0.0 if max_abs == 0 else float("inf")
    return FieldComparison(max_abs, max_rel, float(np.sqrt(np.mean(diff**2))) if diff.size else 0.0)
