"""Ground states of mass-constrained nonlinear scalar field equations.

Gradient-flow minimizers of I on S_m, shooting for the free problem,
critical mass search, mountain-pass paths, and a verdict suite.
"""
from .critical_mass import MStarEstimate, curve_properties, estimate_mstar, phi_u_probe
from .functionals import action_J, energy_I, multiplier_estimate
from .minimizer import MinimizeResult, SolverConfig, energy_curve, minimize
from .nonlinearity import (NonlinearityModel, check_hypotheses, cubic_quintic, custom,
                           parse_model, power_difference, power_sum, single_power)
from .radial import RadialGrid, RadialProfile, schwarz_rearrange
from .shooting import least_action, shoot_1d, shoot_radial

__all__ = [
    "MStarEstimate", "curve_properties", "estimate_mstar", "phi_u_probe",
    "action_J", "energy_I", "multiplier_estimate",
    "MinimizeResult", "SolverConfig", "energy_curve", "minimize",
    "NonlinearityModel", "check_hypotheses", "cubic_quintic", "custom", "parse_model",
    "power_difference", "power_sum", "single_power",
    "RadialGrid", "RadialProfile", "schwarz_rearrange",
    "least_action", "shoot_1d", "shoot_radial",
]
