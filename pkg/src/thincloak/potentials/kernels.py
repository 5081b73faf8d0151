"""Helmholtz kernel G(x - y) = -exp(i k |x-y|) / (4 pi |x-y|) and its normal
derivatives. The leading minus sign is kept throughout the package."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, SingularityError

__all__ = ["Wavenumber", "kernel_eval", "kernel_values", "KINDS", "principal_sqrt"]

KINDS = ("S", "K", "Kstar", "D")
_FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class Wavenumber:
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if v.imag < 0:
            raise DomainError("wavenumber must satisfy Im k >= 0")
        object.__setattr__(self, "value", v)

    def __complex__(self) -> complex:
        return self.value


def principal_sqrt(z: complex) -> complex:
    """Square root on the branch Im >= 0."""
    w = np.sqrt(complex(z))
    if w.imag < 0 or (w.imag == 0 and w.real < 0):
        w = -w
    return complex(w)


def _k(kappa) -> complex:
    return kappa.value if isinstance(kappa, Wavenumber) else Wavenumber(kappa).value


def kernel_eval(kappa, x, y) -> complex:
    """G at a single pair of distinct points."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    r = float(np.linalg.norm(x - y))
    if r == 0.0:
        raise SingularityError("kernel evaluated at coincident points")
    k = _k(kappa)
    return complex(-np.exp(1j * k * r) / (_FOUR_PI * r))


def kernel_values(kinds, kappa, x, y, nx=None, ny=None) -> dict[str, np.ndarray]:
    """Vectorized kernels for broadcastable point arrays (..., 3).

    S     : G(x - y)
    K, D  : d/d nu_y G(x - y)
    Kstar : d/d nu_x G(x - y)
    Coincident points give non-finite values; callers mask them.
    """
    k = _k(kappa)
    d = x - y
    r = np.sqrt(np.einsum("...i,...i->...", d, d))
    with np.errstate(divide="ignore", invalid="ignore"):
        e = np.exp(1j * k * r) if k != 0 else np.ones_like(r, dtype=complex)
        inv = 1.0 / r
        out = {}
        if "S" in kinds:
            out["S"] = -e * inv / _FOUR_PI
        if "K" in kinds or "D" in kinds or "Kstar" in kinds:
            # G'(r) / r
            g1 = (1.0 - 1j * k * r) * e * inv**3 / _FOUR_PI
            if "K" in kinds or "D" in kinds:
                v = -g1 * np.einsum("...i,...i->...", d, ny)
                if "K" in kinds:
                    out["K"] = v
                if "D" in kinds:
                    out["D"] = v
            if "Kstar" in kinds:
                out["Kstar"] = g1 * np.einsum("...i,...i->...", d, nx)
    return out
