"""Critical mass m* and the shape of the energy curve m -> E_m.

"E_m < 0" is certified by a converged gradient-flow run ending below
-margin.  The converse cannot be certified numerically, so a mass is given
zero status when no restart reaches that bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .minimizer import CurveRow, SolverConfig, minimize
from .nonlinearity import NonlinearityModel, classify_small_mass
from .radial import RadialGrid, RadialProfile, grad_norm_sq, integrate, mass


class BracketError(ValueError):
    pass


@dataclass
class MStarEstimate:
    lower: float
    upper: float
    classification: str  # zero | positive | bracketed
    E_upper: float = float("nan")
    history: list = field(default_factory=list)
    margin: float = float("nan")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)


HISTORY_FIELDS = ["iteration", "m_lo", "m_hi", "status_lo", "status_hi"]


def negativity_status(model, N, m, grid, config, margin) -> tuple:
    """('negative', E) if some restart certifies E_m < -margin, else ('zero', E)."""
    res = minimize(model, N, m, grid, config)
    best = min((r.E for r in res.restarts if r.converged), default=res.E)
    return ("negative" if res.certifies_negative(margin) else "zero"), best


def estimate_mstar(model: NonlinearityModel, N: int, bracket=(0.1, 200.0), tol_mass: float = 1e-2,
                   grid: Optional[RadialGrid] = None, config: Optional[SolverConfig] = None,
                   max_grow: int = 10, max_shrink: int = 3) -> MStarEstimate:
    """Bisection on 'minimize certifies E < -margin', margin = 10 * config.tol."""
    config = config or SolverConfig(restarts=4)
    grid = grid or RadialGrid(N, 40.0, 4000)
    cls = classify_small_mass(model, N)
    margin = 10.0 * config.tol
    if cls == "A1":
        return MStarEstimate(0.0, 0.0, "zero", margin=margin)
    lo, hi = map(float, bracket)
    if not 0 < lo < hi:
        raise BracketError(f"bad bracket {bracket}")

    def status(m, reseed=0):
        cfg = replace(config, seed=config.seed + reseed) if reseed else config
        return negativity_status(model, N, m, grid, cfg, margin)

    s_lo, _ = status(lo)
    shrink = 0
    while s_lo == "negative":
        if shrink >= max_shrink:
            if cls == "A2":
                raise BracketError(f"E < 0 certified at the lower end m={lo}: bracket invalid for an A2 model")
            return MStarEstimate(0.0, lo, "bracketed", margin=margin)
        lo /= 10.0
        shrink += 1
        s_lo, _ = status(lo)
    s_hi, E_hi = status(hi)
    grow = 0
    while s_hi != "negative":
        if grow >= max_grow:
            raise BracketError(f"no certified E < 0 up to m={hi}")
        lo, s_lo = hi, s_hi
        hi *= 2.0
        grow += 1
        s_hi, E_hi = status(hi)
    history = [(0, lo, hi, s_lo, s_hi)]
    it = 0
    while hi - lo > tol_mass:
        it += 1
        mid = 0.5 * (lo + hi)
        s_mid, E_mid = status(mid)
        if s_mid == "negative":
            hi, E_hi = mid, E_mid
            # re-verify the kept endpoint with fresh restarts
            s_lo, _ = status(lo, reseed=1000 + it)
            if s_lo == "negative":
                raise BracketError(f"predicate not monotone: lower end {lo} turned negative")
        else:
            lo = mid
            s_hi, E_hi2 = status(hi, reseed=1000 + it)
            if s_hi != "negative":
                raise BracketError(f"predicate not monotone: upper end {hi} lost certification")
        history.append((it, lo, hi, "zero", "negative"))
    return MStarEstimate(lo, hi, "positive" if cls == "A2" else "bracketed", E_hi, history, margin)


def certify_negative(model, N, masses, grids, config, margin=None) -> list:
    """Spot checks of E_m < -margin; ``grids`` maps each mass to its grid."""
    margin = 10.0 * config.tol if margin is None else margin
    out = []
    for m in masses:
        grid = grids(m) if callable(grids) else grids
        res = minimize(model, N, m, grid, config)
        out.append((m, res.E, res.certifies_negative(margin), res))
    return out


# -- curve properties ------------------------------------------------------

@dataclass
class CurveReport:
    nonincreasing: bool
    continuous_gap: bool
    concave: Optional[bool]  # None when N = 1 (not asserted)
    subhomogeneous: bool
    max_slope: float
    slope_bound: float
    details: list = field(default_factory=list)


def _as_pairs(table):
    ms, Es = [], []
    for row in table:
        if isinstance(row, CurveRow):
            if row.status.startswith("error"):
                continue
            ms.append(row.m)
            Es.append(row.E)
        else:
            ms.append(float(row[0]))
            Es.append(float(row[1]))
    return np.array(ms), np.array(Es)


def curve_properties(table, N: int, tol: float = 1e-9, gap_factor: float = 10.0) -> CurveReport:
    """Nonincreasing, concave (N >= 2), sub-homogeneous, and no jumps."""
    m, E = _as_pairs(table)
    if m.size < 4:
        raise ValueError(f"curve_properties needs >= 4 rows, got {m.size}")
    order = np.argsort(m)
    m, E = m[order], E[order]
    slack = 2.0 * tol
    details = []
    dE = np.diff(E)
    dm = np.diff(m)
    noninc = bool(np.all(dE <= slack))
    if not noninc:
        details.append(f"increase at m={m[1:][dE > slack].tolist()}")
    concave = None
    if N >= 2:
        s = dE / dm
        second = np.diff(s) / (0.5 * (dm[1:] + dm[:-1]))
        # the chord-slope test tolerates 2*tol on each energy
        ok = np.diff(s) <= slack * (1.0 / dm[1:] + 1.0 / dm[:-1])
        concave = bool(np.all(ok))
        if not concave:
            details.append(f"convex kink near m={m[1:-1][~ok].tolist()} (2nd diff {second[~ok].tolist()})")
    sub = True
    for i in range(m.size):
        for j in range(i + 1, m.size):
            if E[j] > (m[j] / m[i]) * E[i] + slack:
                sub = False
                details.append(f"E({m[j]:g}) > ({m[j]:g}/{m[i]:g}) E({m[i]:g})")
    slopes = np.abs(dE) / dm
    mean_slope = abs(E[-1] - E[0]) / (m[-1] - m[0])
    bound = gap_factor * mean_slope + slack / dm.min()
    max_slope = float(slopes.max())
    gap_ok = bool(max_slope <= bound)
    if not gap_ok:
        details.append(f"jump: slope {max_slope:g} > {bound:g}")
    return CurveReport(noninc, gap_ok, concave, sub, max_slope, float(bound), details)


# -- Phi_u -----------------------------------------------------------------

def phi_u(model: NonlinearityModel, u: RadialProfile, m) -> np.ndarray:
    """m^(1-2/N) ||grad u||^2 - m int F(u), for u of unit mass (un-halved gradient)."""
    N = u.grid.N
    m = np.asarray(m, dtype=float)
    G2 = grad_norm_sq(u)
    Fi = integrate(u.grid, model.F(u.values))
    return m ** (1.0 - 2.0 / N) * G2 - m * Fi


@dataclass
class PhiProbeRow:
    m: float
    phi: float
    E: float
    ok: bool


def phi_u_probe(model: NonlinearityModel, u: RadialProfile, masses: Sequence[float],
                curve=None, tol: float = 1e-9) -> list:
    """Phi_u(m) along ``masses`` and the envelope check Phi_u(m) >= E_m."""
    N = u.grid.N
    if N < 2:
        raise ValueError("Phi_u probe requires N >= 2")
    if not math.isclose(mass(u), 1.0, rel_tol=1e-8):
        raise ValueError(f"u must lie on S_1 (mass {mass(u)!r})")
    vals = phi_u(model, u, masses)
    Em = {}
    if curve is not None:
        ms, Es = _as_pairs(curve)
        Em = dict(zip(ms.tolist(), Es.tolist()))
    rows = []
    for m, ph in zip(masses, vals):
        E = Em.get(float(m), float("nan"))
        ok = True if math.isnan(E) else bool(ph >= E - 2.0 * tol)
        rows.append(PhiProbeRow(float(m), float(ph), E, ok))
    return rows
