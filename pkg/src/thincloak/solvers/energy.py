"""Energy balance of a cloak solution.

Multiplying the exterior equation by conj(u - u^i), the interior ones by
conj(u) and integrating by parts gives, per incident direction,

    w int |u_inf|^2 + A_l + A_c + Im int du/dnu conj(u^i) + Im int du^i/dnu conj(u - u^i) = 0,

with A_l, A_c the power absorbed in the lossy layer and in the content.
The absorbed powers come from Green's identity on the rescaled shell and
content, the radiated power from the far field on the direction grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .incident import plane_wave, plane_wave_normal_derivative

__all__ = ["EnergyBalance", "energy_balance", "energy_residual"]


@dataclass(frozen=True)
class EnergyBalance:
    radiated: np.ndarray
    absorbed_layer: np.ndarray
    absorbed_content: np.ndarray
    incident_flux: np.ndarray
    incident_trace: np.ndarray

    @property
    def defect(self) -> np.ndarray:
        return self.radiated + self.absorbed_layer + self.absorbed_content + self.incident_flux + self.incident_trace

    @property
    def scale(self) -> np.ndarray:
        terms = np.abs(np.stack([self.radiated, self.absorbed_layer, self.absorbed_content, self.incident_flux,
                                 self.incident_trace]))
        return terms.max(axis=0)

    @property
    def relative(self) -> np.ndarray:
        s = self.scale
        out = np.abs(self.defect)
        return np.divide(out, s, out=np.zeros_like(out), where=s > 0)


def _col(a):
    return a[:, None] if a.ndim == 1 else a


def energy_balance(solution, omega: float | None = None) -> EnergyBalance:
    omega = solution.omega if omega is None else float(omega)
    outer, inner, twin = solution.outer, solution.inner, solution.outer.twin
    g = solution.lossy.gamma / solution.det_b0
    u, q, vi, Qi = (_col(a) for a in (solution.u, solution.q, solution.vi, solution.Qi))
    w, wt, wi = outer.weights[:, None], twin.weights[:, None], inner.weights[:, None]
    uin = _col(plane_wave(omega, solution.incident, outer.points))
    dun = _col(plane_wave_normal_derivative(omega, solution.incident, outer.points, outer.normals))
    p = solution.coupling[:, None] * q
    inner_flux = np.sum(Qi * np.conj(vi) * wi, axis=0)
    absorbed_layer = -g * np.imag(np.sum(q * np.conj(u) * wt, axis=0) - inner_flux)
    absorbed_content = -g * np.imag(inner_flux)
    incident_flux = np.imag(np.sum(p * np.conj(uin) * w, axis=0))
    incident_trace = np.imag(np.sum(dun * np.conj(u - uin) * w, axis=0))
    ff = _col(solution.far_field.samples)
    radiated = omega * np.real(solution.far_field.grid.weights @ (np.abs(ff) ** 2))
    return EnergyBalance(radiated, absorbed_layer, absorbed_content, incident_flux, incident_trace)


def energy_residual(solution, omega: float | None = None, relative: bool = False) -> float:
    """Largest balance defect over the incident directions, absolute or
    relative to the largest of the five terms."""
    eb = energy_balance(solution, omega)
    return float(np.max(eb.relative if relative else np.abs(eb.defect)))
