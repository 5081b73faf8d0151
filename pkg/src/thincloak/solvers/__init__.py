"""Sound-hard and lossy-cloak solvers, the sphere oracle and energy diagnostics."""

from .cloak import (
    CLOAK_MODELS,
    CloakSolution,
    ContentSpec,
    LossyLayerSpec,
    coupling_factors,
    solve_cloak,
    solve_screen_cloak,
    solve_transmission,
)
from .energy import EnergyBalance, energy_balance, energy_residual
from .incident import plane_wave, plane_wave_normal_derivative, unit_directions
from .mie import mie_coefficients, mie_sound_hard_sphere
from .soundhard import SoundHardSolution, SoundHardSolver, solve_sound_hard

__all__ = [
    "CLOAK_MODELS",
    "CloakSolution",
    "ContentSpec",
    "EnergyBalance",
    "LossyLayerSpec",
    "SoundHardSolution",
    "SoundHardSolver",
    "coupling_factors",
    "energy_balance",
    "energy_residual",
    "mie_coefficients",
    "mie_sound_hard_sphere",
    "plane_wave",
    "plane_wave_normal_derivative",
    "solve_cloak",
    "solve_screen_cloak",
    "solve_sound_hard",
    "solve_transmission",
    "unit_directions",
]
