"""Explicit mountain-pass paths through a solution w of -Lap w = g_mu(w).

Each constructor returns a ``PathResult`` whose samples carry the action
J_mu(gamma(t)) computed by grid quadrature and, where a closed expression
exists, by that expression too.  ``check_path`` then tests the three path
properties: gamma(0) = 0 with J(gamma(T)) < -1 and max J = J(w); J < J(w)
away from w; and a strictly increasing mass reaching above a target.

    N >= 3   gamma(t) = w(./t)
    N  = 1   gamma(t) = W(|x| - ln t), W = w glued to a quartic cap and a plateau
    N  = 2   gamma(t) = theta(t) w(./s(t)) along a seven-segment (theta, s) curve
"""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import integrate as spi
from scipy.optimize import brentq

from .functionals import action_J
from .nonlinearity import NonlinearityModel, ShiftedNonlinearity
from .radial import (RadialGrid, RadialProfile, dilate_exact, grad_norm_sq, integrate,
                     l2_distance, mass)
from .shooting import ShootResult

FORMULA_TOL = 1e-6


class PathError(RuntimeError):
    pass


@dataclass
class PathSample:
    t: float
    mass: float
    action: float
    dist: float = float("nan")  # ||gamma(t) - w||_{L^2}
    action_formula: float = float("nan")
    segment: int = 0


@dataclass
class Path2DParams:
    theta1: float
    theta2: float
    theta_star: float
    eps: float
    s_star: float
    vartheta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.theta1 < 1.0 < self.theta2:
            raise ValueError("need theta1 < 1 < theta2")
        bound = min(1 - self.theta1, self.theta2 - 1, *self.vartheta.values())
        if self.theta_star > bound + 1e-15:
            raise ValueError(f"theta_star={self.theta_star} exceeds its bound {bound}")
        if not self.s_star < 1 - self.eps:
            raise ValueError("need s_star < 1 - eps")


@dataclass
class PathResult:
    kind: str  # dilation | plateau | two-param
    N: int
    mu: float
    samples: list
    T: float
    J_w: float
    mass_w: float
    t_w: float = 1.0  # path parameter at which gamma(t) = w
    params: Optional[object] = None
    max_formula_dev: float = float("nan")

    @property
    def actions(self) -> np.ndarray:
        return np.array([s.action for s in self.samples])

    @property
    def masses(self) -> np.ndarray:
        return np.array([s.mass for s in self.samples])


def as_profile(w: Union[RadialProfile, ShootResult]) -> RadialProfile:
    return w.profile() if isinstance(w, ShootResult) else w


def _rel(a, b):
    return abs(a - b) / (1.0 + abs(b))


# -- N >= 3 ---------------------------------------------------------------

def dilation_path(model: NonlinearityModel, w, mu: float, samples: int = 64,
                  M_target: Optional[float] = None, strict: bool = True,
                  tol: float = FORMULA_TOL) -> PathResult:
    """gamma(t) = w(./t) on [0, T], T chosen so J(T) < -1 and m(T) > M_target."""
    w = as_profile(w)
    N = w.grid.N
    if N < 3:
        raise ValueError("the dilation path needs N >= 3")
    K = grad_norm_sq(w)
    m_w = mass(w)
    J_w = action_J(model, w, mu).J
    M_target = 2.0 * m_w if M_target is None else M_target

    def formula(t):
        return 0.5 * (t ** (N - 2) - (N - 2) / N * t**N) * K

    t_neg = brentq(lambda t: formula(t) + 1.0, 1.0, 1e3)
    T = 1.05 * max(t_neg, (M_target / m_w) ** (1.0 / N))
    ts = np.union1d(np.linspace(0.0, T, samples + 1), [1.0])
    out = []
    worst = 0.0
    for t in ts:
        if t == 0:
            out.append(PathSample(0.0, 0.0, 0.0, math.sqrt(m_w), 0.0))
            continue
        g = dilate_exact(t, w)
        Jq = action_J(model, g, mu).J
        Jf = formula(t)
        worst = max(worst, _rel(Jq, Jf))
        out.append(PathSample(float(t), mass(g), Jq, l2_distance(g, w), Jf))
    if strict and worst > tol:
        raise PathError(f"formula/quadrature mismatch {worst:.3e} > {tol:g}: "
                        "w does not satisfy the Pohozaev identity")
    return PathResult("dilation", N, mu, out, float(T), J_w, m_w, 1.0, None, worst)


# -- N = 1 ----------------------------------------------------------------

def plateau_eps(sh: ShiftedNonlinearity, zeta: float, eps0: float = 0.5,
                eps_min: float = 1e-4, n: int = 4000, refine: int = 12) -> float:
    """eps with 8x^6 - G(zeta + sgn x^4) < 0 on [-eps, 0).

    Halving from eps0 finds a valid dyadic value, then bisection towards the
    first failing one enlarges it (only verified values are returned).

    G(zeta) is zero only to root-finding accuracy, so the grid stops where
    |g(zeta)| x^4 would drop under 1e3 |G(zeta)|; below that the sign is
    the sign of -sgn*g(zeta), which is checked directly.
    """
    sgn = 1.0 if zeta > 0 else -1.0
    gz = float(sh.g(zeta))
    if not sgn * gz > 0:
        raise PathError("sign condition on g at zeta fails")
    floor = (1e3 * max(abs(float(sh.G(zeta))), 1e-16) / abs(gz)) ** 0.25

    def holds(eps):
        lo = min(max(floor, eps * 1e-3), eps)
        x = -np.geomspace(eps, lo, n)
        return bool(np.all(8 * x**6 - sh.G(zeta + sgn * x**4) < 0))

    eps = eps0
    while eps >= eps_min:
        if holds(eps):
            # push towards the failing value: a larger cap keeps ln T moderate
            bad = 2.0 * eps
            for _ in range(refine):
                mid = 0.5 * (eps + bad)
                if holds(mid):
                    eps = mid
                else:
                    bad = mid
            return eps
        eps /= 2.0
    raise PathError(f"no eps down to {eps_min} satisfies the cap inequality")


def plateau_path_1d(model: NonlinearityModel, w: ShootResult, samples: int = 32,
                    M_target: Optional[float] = None) -> PathResult:
    """gamma(t) = W(|x| - ln t) with ln t restricted to multiples of the grid step.

    ln T grows like 1/G(zeta -+ eps^4), which can be huge, so samples are
    parametrized by tau = t on [0, 1] and tau = 1 + ln t beyond.
    """
    if w.N != 1 or not w.decayed:
        raise ValueError("plateau path needs a decayed 1D shooting witness")
    mu = w.mu
    sh = ShiftedNonlinearity(model, mu)
    zeta = float(w.u[0])
    sgn = 1.0 if zeta > 0 else -1.0
    eps = plateau_eps(sh, zeta)
    h = float(w.x[1] - w.x[0])
    u = w.u
    n = u.size - 1
    L = float(w.x[-1])
    base = RadialProfile(RadialGrid(1, L, n), u)
    J_w = action_J(model, base, mu).J
    m_w = mass(base)
    M_target = 2.0 * m_w if M_target is None else M_target
    z_e = zeta + sgn * eps**4
    G_e = float(sh.G(z_e))

    def cap_density(x):
        return 8 * x**6 - float(sh.G(zeta + sgn * x**4))

    # ln T from the linear-in-ln t growth of -J and of the mass
    lt_T = eps + max((J_w + 1.0) / (2 * G_e), (M_target - m_w) / (2 * z_e**2), 0.0)
    lt_T = 1.2 * lt_T + 0.1
    k_T = int(math.ceil(lt_T / h))
    k_pos = np.unique(np.round(np.geomspace(0.05 / h, k_T, samples)).astype(np.int64))
    k_pos = np.union1d(k_pos, [k_T])
    k_neg = np.unique(np.round(np.geomspace(0.01 / h, 0.9 * n, samples)).astype(np.int64))
    dens = 0.5 * w.uprime**2 - sh.G(u)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * h * (dens[1:] + dens[:-1]))])
    # beyond k_cap the plateau covers supp w on the grid; longer plateaus add
    # exactly (length) x (constant density) to every trapezoid integral
    k_cap = int(math.ceil((eps + L + 1.0) / h))

    out = [PathSample(0.0, 0.0, 0.0, math.sqrt(m_w), 0.0, 0)]
    for k in sorted(k_neg, reverse=True):
        vals = np.concatenate([u[k:], np.zeros(k)])
        g = base.with_values(vals)
        Jf = J_w - 2.0 * cum[k]
        out.append(PathSample(math.exp(-k * h), mass(g), action_J(model, g, mu).J,
                              l2_distance(g, base), Jf, 1))
    out.append(PathSample(1.0, m_w, J_w, 0.0, J_w, 2))
    for k in k_pos:
        lt = k * h
        kg = int(min(k, k_cap))
        extra = (k - kg) * h
        x = (np.arange(kg) - kg) * h
        cap = np.where(x >= -eps, zeta + sgn * x**4, z_e)
        vals = np.concatenate([cap, u])
        grid = RadialGrid(1, L + kg * h, n + kg)
        g = RadialProfile(grid, vals)
        m_g = mass(g) + 2 * extra * z_e**2
        J_g = action_J(model, g, mu).J - 2 * extra * G_e
        ip = integrate(grid, vals * np.concatenate([u, np.zeros(kg)]))
        dist = math.sqrt(max(m_g + m_w - 2 * ip, 0.0))
        b = spi.quad(cap_density, -min(eps, lt), 0.0, epsabs=1e-14, limit=200)[0]
        Jf = J_w + 2 * b - 2 * G_e * max(lt - eps, 0.0)
        out.append(PathSample(1.0 + lt, m_g, J_g, dist, Jf, 3))
    worst = max(_rel(s.action, s.action_formula) for s in out)
    res = PathResult("plateau", 1, mu, out, 1.0 + k_T * h, J_w, m_w, 1.0,
                     {"eps": eps, "zeta": zeta, "G_cap": G_e, "log_T": k_T * h}, worst)
    return res


def plateau_bound_ok(path: PathResult) -> bool:
    """J(gamma(t)) < J(w) - 2 G(zeta -+ eps^4)(ln t - eps) wherever ln t > eps."""
    eps = path.params["eps"]
    G_e = path.params["G_cap"]
    ok = True
    for s in path.samples:
        lt = s.t - 1.0
        if lt > eps:
            ok &= s.action < path.J_w - 2 * G_e * (lt - eps)
    return bool(ok)


# -- N = 2 ----------------------------------------------------------------

class _Psi:
    def __init__(self, model, w: RadialProfile, mu):
        self.sh = ShiftedNonlinearity(model, mu)
        self.model = model
        self.mu = mu
        self.w = w
        self.K = grad_norm_sq(w)

    def Gi(self, th):
        return integrate(self.w.grid, self.sh.G(th * self.w.values))

    def gi(self, th):
        v = self.w.values
        return integrate(self.w.grid, self.sh.g(th * v) * v)

    def hi(self, th):
        v = self.w.values
        return integrate(self.w.grid, (self.model.h(th * v) - self.mu) * v * v)

    def psi(self, th, s):
        return 0.5 * th**2 * self.K - s**2 * self.Gi(th)

    def psi_theta(self, th, s):
        return th * self.K - s**2 * self.gi(th)


def _margins(P: _Psi, step: float = 1.0 / 64):
    if not P.gi(1.0) > 0:
        raise PathError("Nehari identity: int g(w) w <= 0, cannot bracket theta = 1")
    j = 1
    while j < 64 and P.gi(1.0 - j * step) > 0:
        j += 1
    th1 = 1.0 - (j - 1) * step if j > 1 else None
    j = 1
    while j < 64 and P.gi(1.0 + j * step) > 0:
        j += 1
    th2 = 1.0 + (j - 1) * step if j > 1 else None
    if th1 is None or th2 is None:
        raise PathError("sign-scan of d/dtheta int G(theta w) failed to bracket theta = 1 "
                        "(Nehari/Pohozaev residuals too large)")
    return th1, th2


def _vartheta(P: _Psi, s: float, n: int = 65, jmax: int = 20) -> float:
    sgn = 1.0 if s < 1 else -1.0
    for j in range(1, jmax + 1):
        v = 2.0**-j
        th = np.linspace(1 - v, 1 + v, n)
        if all(sgn * P.psi_theta(t, s) > 0 for t in th):
            return v
    raise PathError(f"no margin makes Psi_theta sign-definite at s={s}")


def _s_star(P: _Psi, n: int = 128) -> float:
    th = np.linspace(1.0 / n, 1.0, n)
    hmax = max(P.hi(t) for t in th)
    s = 0.5
    while s > 1e-8:
        if P.K - s * s * hmax > 0:
            return s
        s /= 2.0
    raise PathError("no s* found")


def _eps(w: RadialProfile, delta: float, s_star: float) -> float:
    e = 0.25
    while e > 1e-8:
        if 1 - e > s_star and all(
                l2_distance(dilate_exact(s, w), w) < delta for s in (1 - e, 1 - e / 2, 1 + e / 2, 1 + e)):
            return e
        e /= 2.0
    raise PathError("no dilation margin eps found")


def two_param_params(model, w: RadialProfile, mu: float, delta: float) -> Path2DParams:
    P = _Psi(model, w, mu)
    th1, th2 = _margins(P)
    s_star = _s_star(P)
    eps = _eps(w, delta, s_star)
    vt = {1 - eps: _vartheta(P, 1 - eps), 1 + eps: _vartheta(P, 1 + eps)}
    th_star = min(1 - th1, th2 - 1, *vt.values())
    return Path2DParams(th1, th2, th_star, eps, s_star, vt)


def two_param_path_2d(model: NonlinearityModel, w, mu: float, samples: int = 16,
                      delta: Optional[float] = None, M_target: Optional[float] = None) -> PathResult:
    """Piecewise-linear (theta, s) curve through (1, 1); gamma = theta w(./s)."""
    w = as_profile(w)
    if w.grid.N != 2:
        raise ValueError("two-parameter path is for N = 2")
    m_w = mass(w)
    delta = 0.1 * math.sqrt(m_w) if delta is None else delta
    M_target = 2.0 * m_w if M_target is None else M_target
    P = _Psi(model, w, mu)
    prm = two_param_params(model, w, mu, delta)
    a = 1 + prm.theta_star
    Ga = P.Gi(a)
    if not Ga > 0:
        raise PathError("int G((1+theta*) w) <= 0: Pohozaev identity fails")
    sT2 = max((0.5 * a * a * P.K + 1.0) / Ga, M_target / (a * a * m_w))
    s_T = 1.05 * math.sqrt(sT2)
    s_T = max(s_T, 1 + prm.eps + 0.1)
    e, ts, ss = prm.eps, prm.theta_star, prm.s_star
    corners = [(0.0, ss), (1 - ts, ss), (1 - ts, 1 - e), (1.0, 1 - e), (1.0, 1.0),
               (1.0, 1 + e), (a, 1 + e), (a, s_T)]
    J_w = action_J(model, w, mu).J
    out = []
    t0 = 0.0
    t_w = float("nan")
    for seg, (p, q) in enumerate(zip(corners[:-1], corners[1:]), start=1):
        length = abs(q[0] - p[0]) + abs(q[1] - p[1])
        fr = np.linspace(0.0, 1.0, samples + 1)
        if seg > 1:
            fr = fr[1:]
        for f in fr:
            th = p[0] + f * (q[0] - p[0])
            s = p[1] + f * (q[1] - p[1])
            t = t0 + f * length
            if (th, s) == (1.0, 1.0):
                t_w = t
            if th == 0:
                out.append(PathSample(t, 0.0, 0.0, math.sqrt(m_w), 0.0, seg))
                continue
            g = dilate_exact(s, w)
            g = g.with_values(th * g.values)
            out.append(PathSample(t, mass(g), action_J(model, g, mu).J, l2_distance(g, w),
                                  P.psi(th, s), seg))
        t0 += length
    worst = max(_rel(s.action, s.action_formula) for s in out)
    return PathResult("two-param", 2, mu, out, t0, J_w, m_w, t_w, prm, worst)


SEGMENT_PATTERN = {1: "increasing", 2: "increasing", 3: "increasing", 4: "constant",
                   5: "constant", 6: "decreasing", 7: "decreasing"}


def segment_pattern(path: PathResult, const_tol: float = 1e-6) -> dict:
    """Observed trend of J on each segment ('increasing', 'constant', ...)."""
    noise = 1e-12 * (1 + abs(path.J_w))
    out = {}
    prev = None
    by_seg: dict = {}
    for s in path.samples:
        by_seg.setdefault(s.segment, []).append(s)
    for seg in sorted(by_seg):
        pts = ([prev] if prev is not None else []) + by_seg[seg]
        J = np.array([p.action for p in pts])
        d = np.diff(J)
        if np.all(np.abs(J - path.J_w) <= const_tol * (1 + abs(path.J_w))):
            out[seg] = "constant"
        elif np.all(d > noise):
            out[seg] = "increasing"
        elif np.all(d < -noise):
            out[seg] = "decreasing"
        else:
            out[seg] = "mixed"
        prev = by_seg[seg][-1]
    return out


# -- checks ---------------------------------------------------------------

@dataclass
class PathReport:
    endpoints: bool
    maximum: bool
    separation: bool
    mass_increasing: bool
    mass_target: bool
    reasons: list = field(default_factory=list)
    argmax_t: float = float("nan")

    @property
    def item_i(self) -> bool:
        return self.endpoints and self.maximum

    @property
    def item_ii(self) -> bool:
        return self.separation

    @property
    def item_iii(self) -> bool:
        return self.mass_increasing and self.mass_target

    @property
    def passed(self) -> bool:
        return self.item_i and self.item_ii and self.item_iii


def check_path(samples, J_w: float, delta: float, M_target: float, T: float,
               tol: float = 1e-6) -> PathReport:
    """Path properties on a sample list; reasons name each failure."""
    reasons = []
    if not samples:
        return PathReport(False, False, False, False, False, ["empty sample list"])
    first, last = samples[0], samples[-1]
    ends = True
    if not (first.t == 0 and first.mass == 0 and first.action == 0):
        ends = False
        reasons.append("(i) first sample is not gamma(0) = 0")
    if not math.isclose(last.t, T, rel_tol=1e-12):
        ends = False
        reasons.append(f"(i) no sample at t=T={T:g} (last t={last.t:g})")
    elif not last.action < -1:
        ends = False
        reasons.append(f"(i) J(gamma(T)) = {last.action:g} is not < -1")
    J = np.array([s.action for s in samples])
    i_max = int(np.argmax(J))
    scale = tol * (1 + abs(J_w))
    maximum = abs(J[i_max] - J_w) <= scale
    if not maximum:
        reasons.append(f"(i) max J = {J[i_max]:.10g} differs from J(w) = {J_w:.10g}")
    far = [s for s in samples if s.dist >= delta]
    bad = [s.t for s in far if not s.action < J_w]
    if bad:
        reasons.append(f"(ii) J >= J(w) at distance >= delta for t in {bad[:5]}")
    m = np.array([s.mass for s in samples])
    inc = bool(np.all(np.diff(m) > 0))
    if not inc:
        reasons.append("(iii) mass not strictly increasing")
    reach = bool(m[-1] > M_target)
    if not reach:
        reasons.append(f"(iii) m(T) = {m[-1]:g} does not exceed M = {M_target:g}")
    return PathReport(ends, bool(maximum), not bad, inc, reach, reasons, samples[i_max].t)


def check_path_result(path: PathResult, delta: Optional[float] = None,
                      M_target: Optional[float] = None, tol: float = 1e-6) -> PathReport:
    delta = 0.1 * math.sqrt(path.mass_w) if delta is None else delta
    M_target = 2.0 * path.mass_w if M_target is None else M_target
    return check_path(path.samples, path.J_w, delta, M_target, path.T, tol)


PATH_FIELDS = ["t", "mass", "action", "dist", "action_formula", "segment"]


def write_path_csv(path: PathResult, filename) -> None:
    with open(filename, "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=PATH_FIELDS)
        wr.writeheader()
        for s in path.samples:
            wr.writerow({k: repr(v) if isinstance(v, float) else v for k, v in asdict(s).items()})
