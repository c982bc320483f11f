"""Energy, action and the identity residuals that certify solutions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nonlinearity import NonlinearityModel
from .radial import RadialProfile, grad_norm_sq, integrate, mass


@dataclass(frozen=True)
class EnergyReport:
    kinetic: float  # 1/2 int |grad u|^2
    potential: float  # int F(u)
    I: float
    mass: float

    @property
    def grad_sq(self) -> float:
        return 2.0 * self.kinetic


@dataclass(frozen=True)
class ActionReport:
    J: float
    pohozaev_residual: float
    nehari_residual: float
    mu: float

    @property
    def scale(self) -> float:
        return 1.0 + abs(self.J)

    @property
    def pohozaev_rel(self) -> float:
        return abs(self.pohozaev_residual) / self.scale

    @property
    def nehari_rel(self) -> float:
        return abs(self.nehari_residual) / self.scale


def energy_I(model: NonlinearityModel, u: RadialProfile) -> EnergyReport:
    kin = 0.5 * grad_norm_sq(u)
    pot = integrate(u.grid, model.F(u.values))
    return EnergyReport(kin, pot, kin - pot, mass(u))


def action_J(model: NonlinearityModel, u: RadialProfile, mu: float) -> ActionReport:
    """J_mu(u) with the Pohozaev and Nehari residuals of -Lap u = g_mu(u)."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    N = u.grid.N
    e = energy_I(model, u)
    v = u.values
    grad = e.grad_sq
    G_int = e.potential - 0.5 * mu * e.mass
    g_u = integrate(u.grid, model.f(v) * v) - mu * e.mass
    J = e.I + 0.5 * mu * e.mass
    poh = (N - 2) / (2.0 * N) * grad - G_int
    neh = grad - g_u
    return ActionReport(J, poh, neh, mu)


def multiplier_estimate(model: NonlinearityModel, u: RadialProfile) -> float:
    """mu read off the equation tested with u: (int f(u)u - int |grad u|^2) / mass."""
    m = mass(u)
    if m == 0:
        raise ValueError("multiplier undefined for a zero-mass profile")
    fu = integrate(u.grid, model.f(u.values) * u.values)
    return (fu - grad_norm_sq(u)) / m


def multiplier_positivity_check(report: EnergyReport, mu: float, N: int, tol: float = 1e-6) -> str:
    """'pass' iff mu >= (2/N) int|grad v|^2 / m - tol; 'not_applicable' when I > 0."""
    if report.I > 0:
        return "not_applicable"
    bound = (2.0 / N) * report.grad_sq / report.mass
    return "pass" if mu >= bound - tol else "fail"


def euler_lagrange_residual(model: NonlinearityModel, u: RadialProfile, mu: float) -> float:
    """Discrete L^2 norm of -Lap_h u - f(u) + mu u over the free nodes."""
    g = u.grid
    v = u.values
    k = g.stiffness
    du = np.diff(v)
    Ku = np.zeros_like(v)
    Ku[:-1] -= k * du
    Ku[1:] += k * du
    w = g.weights
    free = np.arange(g.M)
    free = free[w[free] > 0]
    lap = Ku[free] / w[free]
    res = lap - model.f(v[free]) + mu * v[free]
    return float(np.sqrt(np.dot(w[free], res * res)))


def coercivity_probe(model: NonlinearityModel, u: RadialProfile, s_values) -> np.ndarray:
    """I along the mass-preserving scaling s <> u, for increasing s.

    grad_norm_sq grows like e^(2s); on S_m the energy must eventually
    increase without bound.  Evaluated through exact grid scaling.
    """
    from .radial import dilate_exact

    N = u.grid.N
    out = []
    for s in s_values:
        t = np.exp(-s)
        v = dilate_exact(t, u)
        v = v.with_values(np.exp(N * s / 2.0) * v.values)
        out.append(energy_I(model, v).I)
    return np.array(out)
