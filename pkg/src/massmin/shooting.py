"""Shooting solvers for the free problem -Lap u = g_mu(u).

N = 1: the decaying solutions start at the extreme roots zeta_+/- of G_mu
with zero slope, and one RK4 integration of -u'' = g_mu(u) produces them.
N >= 2: radial shooting in the initial height b with the (N-1)/r u' term,
bisecting between undershoot (|u| turns back) and overshoot (u crosses 0).

Integrating towards a hyperbolic rest point is unstable: any error grows
like exp(sqrt(mu) r) while the solution decays like exp(-sqrt(mu) r).  Once
|u| has dropped by ``switch_frac`` the state is split into the decaying and
growing solutions of the linearised equation, r^-nu K_nu(sqrt(mu) r) and
r^-nu I_nu(sqrt(mu) r) with nu = (N-2)/2, and the tail is continued along
the decaying one.  The size of the discarded growing component is kept as
a diagnostic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate as spi
from scipy import special

from .functionals import ActionReport, action_J
from .nonlinearity import NonlinearityModel, ShiftedNonlinearity, find_zeta
from .radial import RadialGrid, RadialProfile, sphere_measure

DEFAULT_STEP = 1e-3
DECAY_THRESHOLD = 1e-10
SWITCH_FRAC = 1e-4
GROWTH_TOL = 1e-2
BLOWUP_FACTOR = 10.0


class IntegrationError(RuntimeError):
    pass


@dataclass
class ShootResult:
    N: int
    mu: float
    zeta: float
    status: str  # decayed | blew_up | oscillated | no_solution
    event: str
    x: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    u: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    uprime: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    action: float = float("nan")
    mass: float = float("nan")
    phase_energy_max_dev: float = float("nan")
    switch_x: float = float("nan")
    growth_ratio: float = float("nan")
    model: Optional[NonlinearityModel] = field(default=None, repr=False)

    @property
    def decayed(self) -> bool:
        return self.status == "decayed"

    @property
    def sign(self) -> int:
        return 1 if self.zeta > 0 else -1

    def profile(self) -> RadialProfile:
        """The trajectory as a RadialProfile on its own (uniform) nodes."""
        if self.x.size < 17:
            raise ValueError("no trajectory to convert")
        grid = RadialGrid(self.N, float(self.x[-1]), self.x.size - 1)
        return RadialProfile(grid, self.u)

    def residuals(self) -> ActionReport:
        return action_J(self.model, self.profile(), self.mu)

    def summary_row(self) -> dict:
        return {"mu": self.mu, "zeta_or_b": self.zeta, "action": self.action,
                "mass": self.mass, "status": self.status}


# -- integration -----------------------------------------------------------

def _linear_modes(N: int, k: float, r: float):
    """(phi, phi', psi, psi') at r for the decaying/growing linear solutions, scaled by e^{-+kr}."""
    nu = (N - 2) / 2.0
    z = k * r
    pre = r ** (-nu)
    phi = pre * special.kve(nu, z)
    dphi = -k * pre * special.kve(nu + 1.0, z)
    psi = pre * special.ive(nu, z)
    dpsi = k * pre * special.ive(nu + 1.0, z)
    return phi, dphi, psi, dpsi


def _integrate(N: int, mu: float, fs, u0: float, step: float, length: float,
               switch: bool, switch_frac: float = SWITCH_FRAC):
    """RK4 for u'' = -g(u) - (N-1)/r u' from (u0, 0).

    Returns (xs, us, vs, status, event, switch_index, growth_ratio).
    With ``switch`` false the integration stops at the first event and is
    used to classify undershoot/overshoot.
    """
    c = float(N - 1)
    n_steps = int(round(length / step))
    us = [u0]
    vs = [0.0]
    u, v = u0, 0.0
    a0 = abs(u0)
    s0 = 1.0 if u0 > 0 else -1.0
    k = math.sqrt(mu)
    blow = BLOWUP_FACTOR * a0
    h = step
    h2 = 0.5 * h

    def acc(r, u, v):
        g = -mu * u + fs(u)
        if r == 0.0:
            return -g / N
        return -g - c * v / r

    status, event = None, None
    switch_idx, growth = -1, float("nan")
    r = 0.0
    for i in range(n_steps):
        k1u, k1v = v, acc(r, u, v)
        k2u, k2v = v + h2 * k1v, acc(r + h2, u + h2 * k1u, v + h2 * k1v)
        k3u, k3v = v + h2 * k2v, acc(r + h2, u + h2 * k2u, v + h2 * k2v)
        k4u, k4v = v + h * k3v, acc(r + h, u + h * k3u, v + h * k3v)
        un = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        vn = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        r = (i + 1) * h
        if not (math.isfinite(un) and math.isfinite(vn)):
            status, event = "blew_up", "non_finite"
            break
        us.append(un)
        vs.append(vn)
        if abs(un) > blow:
            status, event = "blew_up", "escaped"
            break
        if un * s0 <= 0.0:
            status, event = "oscillated", "crossed_zero"
            break
        if abs(un) > abs(u):
            if i == 0:
                status, event = "blew_up", "escaped"
            else:
                status, event = "oscillated", "turned_back"
            break
        u, v = un, vn
        if switch and abs(u) <= switch_frac * a0:
            phi, dphi, psi, dpsi = _linear_modes(N, k, r)
            det = phi * dpsi - psi * dphi
            a = (u * dpsi - psi * v) / det  # coefficient on scaled phi
            cg = (phi * v - u * dphi) / det  # coefficient on scaled psi
            growth = abs(cg * psi) / abs(u)
            if growth <= GROWTH_TOL:
                switch_idx = i + 1
                status, event = "decayed", "matched"
                # continue along the decaying mode to the end of the domain
                rt = (np.arange(switch_idx + 1, n_steps + 1)) * h
                if rt.size:
                    nu = (N - 2) / 2.0
                    e = np.exp(-k * (rt - r))
                    tail_u = a * rt ** (-nu) * special.kve(nu, k * rt) * e
                    tail_v = -k * a * rt ** (-nu) * special.kve(nu + 1.0, k * rt) * e
                    us.extend(tail_u.tolist())
                    vs.extend(tail_v.tolist())
                break
            switch = False  # large growing part: let the event decide
    if status is None:
        status, event = "oscillated", "no_decay"
    xs = np.arange(len(us)) * h
    return xs, np.array(us), np.array(vs), status, event, switch_idx, growth


def _finish(res: ShootResult, model: NonlinearityModel, sh: ShiftedNonlinearity) -> ShootResult:
    x, u, v = res.x, res.u, res.uprime
    if res.N == 1:
        res.phase_energy_max_dev = float(np.max(np.abs(0.5 * v * v + sh.G(u))))
    if res.decayed:
        end = abs(u[-1]) + abs(v[-1])
        tail = np.abs(u[res_switch(res):])
        if end >= DECAY_THRESHOLD or np.any(np.diff(tail) > 0):
            res.status, res.event = "oscillated", "tail_not_decayed"
            return res
        w = sphere_measure(res.N) * x ** (res.N - 1)
        res.mass = float(spi.simpson(w * u * u, x=x))
        res.action = float(spi.simpson(w * (0.5 * v * v - sh.G(u)), x=x))
    return res


def res_switch(res: ShootResult) -> int:
    if not math.isfinite(res.switch_x):
        return 0
    return int(round(res.switch_x / (res.x[1] - res.x[0])))


def default_length(mu: float) -> float:
    return 40.0 / math.sqrt(mu)


def shoot_1d(model: NonlinearityModel, mu: float, sign: int, step: float = DEFAULT_STEP,
             length: Optional[float] = None) -> ShootResult:
    """Decaying solution of -u'' = g_mu(u) from (zeta_sign, 0)."""
    sh = ShiftedNonlinearity(model, mu)
    z = find_zeta(sh, sign)
    if z is None:
        return ShootResult(1, mu, float("nan"), "no_solution", "no_zeta", model=model)
    if not z.sign_condition:
        return ShootResult(1, mu, z.zeta, "no_solution", "sign_condition_failed", model=model)
    return _shoot(model, 1, mu, z.zeta, step, length)


def shoot_radial(model: NonlinearityModel, N: int, mu: float, b: float,
                 step: float = DEFAULT_STEP, length: Optional[float] = None) -> ShootResult:
    """-u'' - (N-1)/r u' = g_mu(u), u(0) = b, u'(0) = 0."""
    if N < 2:
        raise ValueError("shoot_radial is for N >= 2; use shoot_1d")
    if b == 0:
        raise ValueError("initial height must be nonzero")
    if not mu > 0:
        raise ValueError("mu must be positive")
    return _shoot(model, N, mu, b, step, length)


def _shoot(model, N, mu, b, step, length, switch=True) -> ShootResult:
    sh = ShiftedNonlinearity(model, mu)
    length = length or default_length(mu)
    x, u, v, status, event, sidx, growth = _integrate(N, mu, model.scalar_f(), float(b),
                                                      step, length, switch)
    res = ShootResult(N, mu, float(b), status, event, x, u, v, model=model,
                      switch_x=sidx * step if sidx >= 0 else float("nan"), growth_ratio=growth)
    return _finish(res, model, sh)


def classify_height(model, N, mu, b, step=DEFAULT_STEP, length=None) -> str:
    """Event of an unswitched shot: crossed_zero, turned_back, escaped, ..."""
    length = length or default_length(mu)
    out = _integrate(N, mu, model.scalar_f(), float(b), step, length, switch=False)
    return out[4]


# -- least action ----------------------------------------------------------

@dataclass
class LeastActionResult:
    A: float
    witness: Optional[ShootResult]
    upper_bound_only: bool
    candidates: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.witness is not None


@dataclass
class SearchConfig:
    step: float = DEFAULT_STEP
    scan_points: int = 48
    bisect_iter: int = 80
    length: Optional[float] = None


def _next_root(sh: ShiftedNonlinearity, z: float, factor: float = 50.0, n: int = 20000):
    """First point beyond zeta where G_mu returns to <= 0, else None."""
    t = np.linspace(z, factor * z, n + 1)[1:]
    G = sh.G(t)
    idx = np.nonzero(G <= 0)[0]
    return float(t[idx[0]]) if idx.size else None


def ground_state_height(model, N, mu, sign, config: Optional[SearchConfig] = None):
    """Bisect the initial height onto the first undershoot/overshoot transition."""
    config = config or SearchConfig()
    sh = ShiftedNonlinearity(model, mu)
    z = find_zeta(sh, sign)
    if z is None:
        return None
    zeta = z.zeta
    top = _next_root(sh, zeta)
    hi_lim = top if top is not None else 20.0 * zeta
    # scan heights between zeta and the next root (or 20 zeta)
    fr = np.linspace(0.0, 1.0, config.scan_points + 2)[1:-1]
    heights = zeta + (hi_lim - zeta) * fr
    length = config.length or default_length(mu)
    lo = None
    bracket = None
    for b in heights:
        ev = classify_height(model, N, mu, b, config.step, length)
        if ev == "turned_back":
            lo = b
        elif ev == "crossed_zero" and lo is not None:
            bracket = (lo, b)
            break
    if bracket is None:
        return None
    lo, hi = bracket
    for _ in range(config.bisect_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        ev = classify_height(model, N, mu, mid, config.step, length)
        if ev == "crossed_zero":
            hi = mid
        else:
            lo = mid
    return lo, hi


def least_action(model: NonlinearityModel, N: int, mu: float,
                 config: Optional[SearchConfig] = None) -> LeastActionResult:
    """Smallest action among the decaying solutions found by shooting.

    Exact for N = 1 (all solutions are the two zeta-shots); for N >= 2 only
    radial one-signed solutions are enumerated, so the value is an upper
    bound for the least action.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    config = config or SearchConfig()
    cands = []
    if N == 1:
        for s in (1, -1):
            res = shoot_1d(model, mu, s, config.step, config.length)
            if res.decayed:
                cands.append(res)
    else:
        signs = (1,) if model.is_odd else (1, -1)
        for s in signs:
            br = ground_state_height(model, N, mu, s, config)
            if br is None:
                continue
            res = None
            for b in br:
                res = shoot_radial(model, N, mu, b, config.step, config.length)
                if res.decayed:
                    break
            if res is not None and res.decayed:
                cands.append(res)
    if not cands:
        return LeastActionResult(float("nan"), None, N >= 2, [])
    best = min(cands, key=lambda r: r.action)
    return LeastActionResult(best.action, best, N >= 2, cands)


def nearby_heights_decay(model, mu, zeta, rel: float = 1e-3, count: int = 8) -> list:
    """Shoot N=1 from heights near zeta; returns the list of statuses."""
    out = []
    for d in np.linspace(-rel, rel, count):
        b = zeta * (1 + d)
        if b == 0:
            continue
        out.append(_shoot(model, 1, mu, b, DEFAULT_STEP, None).status)
    return out


def reshoot(res: ShootResult, step: float) -> ShootResult:
    """Same initial height, finer step: quadrature residuals shrink like step^2."""
    return _shoot(res.model, res.N, res.mu, res.zeta, step, float(res.x[-1]))
