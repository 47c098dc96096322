"""Spectral Newton solver for co-rotating and traveling vortex sheet equilibria."""

from .fourier import EvenSeries, OddSeries, SampledFunction, analyze, synth
from .functionals import (
    SheetConfig,
    SheetState,
    SpeedClosure,
    closed_residual,
    closure_speed,
    eval_F1,
    eval_F2,
    eval_G1,
    eval_G2,
)
from .oracle import equilibrium_residual, mirror_check
from .solver import SheetSolution, continue_family, newton_solve, spectral_diagnostics

__all__ = [
    "EvenSeries", "OddSeries", "SampledFunction", "analyze", "synth",
    "SheetConfig", "SheetState", "SpeedClosure", "closed_residual", "closure_speed",
    "eval_F1", "eval_F2", "eval_G1", "eval_G2",
    "equilibrium_residual", "mirror_check",
    "SheetSolution", "continue_family", "newton_solve", "spectral_diagnostics",
]
