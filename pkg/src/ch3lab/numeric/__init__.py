"""Periodic pseudospectral harness for the three-component system."""
from .grid import Grid, NumericError, helmholtz_solve
from .system import (FieldState, SimConfig, Trajectory, apply_J1, apply_J2, biham_residual,
                     conserved_quantities, functional_gradient, gateaux_check, mode_state,
                     rhs_eval, simulate, smooth_state, stationary_state, velocity_rates)

__all__ = [
    "FieldState", "Grid", "NumericError", "SimConfig", "Trajectory", "apply_J1", "apply_J2",
    "biham_residual", "conserved_quantities", "functional_gradient", "gateaux_check",
    "helmholtz_solve", "mode_state", "rhs_eval", "simulate", "smooth_state", "stationary_state",
    "velocity_rates",
]
