"""Nonlinearity families f, their primitives F and the shifted pair g_mu, G_mu.

Built-in families are odd power combinations with closed-form primitives.
Custom nonlinearities take a callable ``f`` plus declared leading exponents
of ``F`` at zero and at infinity; everything about them is sampled rather
than decided.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import optimize

FAMILIES = ("single-power", "power-sum", "power-difference", "cubic-quintic", "custom")

# Gauss-Legendre rule for F(t) = t * int_0^1 f(s t) ds on custom models.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS
CUSTOM_F_TOL = 1e-10


class InadmissibleModel(ValueError):
    """Raised when a model's exponents violate the family's defining conditions."""


class NonlinearityError(RuntimeError):
    """A custom nonlinearity failed (or returned a non-finite value) at some t."""

    def __init__(self, t, cause):
        self.t = t
        super().__init__(f"custom nonlinearity failed at t={t!r}: {cause}")


def _spow(t, a):
    """|t|^(a-2) t, the odd power with homogeneity a-1."""
    return np.sign(t) * np.abs(t) ** (a - 1.0)


def mass_critical_exponent(N: int) -> float:
    return 2.0 + 4.0 / N


def sobolev_exponent(N: int) -> float:
    return 2.0 * N / (N - 2.0) if N >= 3 else np.inf


@dataclass(frozen=True)
class NonlinearityModel:
    """Closed-form descriptor of f.

    For ``custom`` models ``exponent_zero`` is the leading exponent of F at 0
    (a number, or a ``(lo, hi)`` range when only bounds are known) and
    ``exponent_inf`` the growth exponent of F at infinity.
    """

    family: str
    p: Optional[float] = None
    q: Optional[float] = None
    A: float = 0.0
    sign: float = 1.0
    func: Optional[Callable] = field(default=None, compare=False, repr=False)
    primitive: Optional[Callable] = field(default=None, compare=False, repr=False)
    exponent_zero: Union[float, tuple, None] = None
    exponent_inf: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InadmissibleModel(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        fam, p, q = self.family, self.p, self.q
        if fam == "cubic-quintic":
            object.__setattr__(self, "p", 4.0)
            object.__setattr__(self, "q", 6.0)
        elif fam == "single-power":
            if p is None or not p > 2:
                raise InadmissibleModel(f"single-power needs p > 2 (got p={p})")
            if self.sign not in (1, -1, 1.0, -1.0):
                raise InadmissibleModel("single-power sign must be +1 or -1")
        elif fam == "power-sum":
            if p is None or q is None or not 2 < q < p:
                raise InadmissibleModel(f"power-sum needs 2 < q < p (got p={p}, q={q})")
        elif fam == "power-difference":
            if p is None or q is None or not 2 < p < q:
                raise InadmissibleModel(f"power-difference needs 2 < p < q (got p={p}, q={q})")
        elif fam == "custom":
            if self.func is None:
                raise InadmissibleModel("custom model needs a callable f")
            if self.exponent_zero is None or self.exponent_inf is None:
                raise InadmissibleModel("custom model must declare exponent_zero and exponent_inf")

    # -- closed forms -------------------------------------------------------
    def f(self, t):
        t = np.asarray(t, dtype=float)
        fam = self.family
        if fam == "single-power":
            return self.sign * _spow(t, self.p)
        if fam == "power-sum":
            return _spow(t, self.p) + self.A * _spow(t, self.q)
        if fam in ("power-difference", "cubic-quintic"):
            return _spow(t, self.p) - _spow(t, self.q)
        return self._call_custom(self.func, t)

    def F(self, t):
        t = np.asarray(t, dtype=float)
        fam = self.family
        a = np.abs(t)
        if fam == "single-power":
            return self.sign * a**self.p / self.p
        if fam == "power-sum":
            return a**self.p / self.p + self.A * a**self.q / self.q
        if fam in ("power-difference", "cubic-quintic"):
            return a**self.p / self.p - a**self.q / self.q
        if self.primitive is not None:
            return self._call_custom(self.primitive, t)
        # F(t) = t * int_0^1 f(s t) ds
        vals = self._call_custom(self.func, np.multiply.outer(t, _GL_NODES))
        return t * (vals @ _GL_WEIGHTS)

    def h(self, t):
        """f(t)/t, extended by 0 at t = 0 (f(t)/t -> 0 as t -> 0)."""
        t = np.asarray(t, dtype=float)
        fam = self.family
        a = np.abs(t)
        if fam == "single-power":
            return self.sign * a ** (self.p - 2.0)
        if fam == "power-sum":
            return a ** (self.p - 2.0) + self.A * a ** (self.q - 2.0)
        if fam in ("power-difference", "cubic-quintic"):
            return a ** (self.p - 2.0) - a ** (self.q - 2.0)
        safe = np.where(t == 0.0, 1.0, t)
        return np.where(t == 0.0, 0.0, self.f(safe) / safe)

    def _call_custom(self, fn, t):
        try:
            out = np.asarray(np.vectorize(fn, otypes=[float])(t) if np.ndim(t) else fn(float(t)), dtype=float)
        except Exception as exc:  # noqa: BLE001 - user callable
            raise NonlinearityError(t, exc) from exc
        if not np.all(np.isfinite(out)):
            bad = np.asarray(t)[~np.isfinite(out)] if np.ndim(t) else t
            raise NonlinearityError(np.ravel(bad)[0] if np.ndim(t) else bad, "non-finite value")
        return out

    def scalar_f(self) -> Callable[[float], float]:
        """Plain-float f for ODE right-hand sides (no numpy overhead)."""
        fam, p, q, A, sg = self.family, self.p, self.q, self.A, self.sign
        if fam == "single-power":
            return lambda t: sg * abs(t) ** (p - 2.0) * t
        if fam == "power-sum":
            return lambda t: (abs(t) ** (p - 2.0) + A * abs(t) ** (q - 2.0)) * t
        if fam in ("power-difference", "cubic-quintic"):
            return lambda t: (abs(t) ** (p - 2.0) - abs(t) ** (q - 2.0)) * t
        fn = self.func

        def call(t):
            try:
                return float(fn(t))
            except Exception as exc:  # noqa: BLE001 - user callable
                raise NonlinearityError(t, exc) from exc
        return call

    # -- metadata -----------------------------------------------------------
    @property
    def is_builtin(self) -> bool:
        return self.family != "custom"

    @property
    def is_odd(self) -> bool:
        return self.is_builtin

    def leading_exponent_zero(self):
        """Exponent (and sign) of the leading term of F at 0."""
        fam = self.family
        if fam == "single-power":
            return self.p, self.sign
        if fam == "power-sum":
            if self.A > 0:
                return self.q, 1.0
            if self.A < 0:
                return self.q, -1.0
            return self.p, 1.0
        if fam in ("power-difference", "cubic-quintic"):
            return self.p, 1.0
        return self.exponent_zero, None

    def dimension_record(self, max_dim: int = 6) -> dict:
        """Which dimensions N <= max_dim the hypotheses admit."""
        return {N: check_hypotheses(self, N).all_pass for N in range(1, max_dim + 1)}

    def describe(self) -> str:
        if self.name:
            return self.name
        fam = self.family
        if fam == "single-power":
            s = "" if self.sign > 0 else ",sign=-1"
            return f"single-power:p={self.p:g}{s}"
        if fam == "power-sum":
            return f"power-sum:p={self.p:g},q={self.q:g},A={self.A:g}"
        if fam == "power-difference":
            return f"power-difference:p={self.p:g},q={self.q:g}"
        return fam

    def to_dict(self) -> dict:
        d = {"family": self.family}
        if self.family in ("single-power", "power-sum", "power-difference"):
            d["p"] = self.p
        if self.family in ("power-sum", "power-difference"):
            d["q"] = self.q
        if self.family == "power-sum":
            d["A"] = self.A
        if self.family == "single-power" and self.sign < 0:
            d["sign"] = -1
        return d


def single_power(p: float, sign: float = 1.0) -> NonlinearityModel:
    return NonlinearityModel("single-power", p=float(p), sign=float(sign))


def power_sum(p: float, q: float, A: float) -> NonlinearityModel:
    return NonlinearityModel("power-sum", p=float(p), q=float(q), A=float(A))


def power_difference(p: float, q: float) -> NonlinearityModel:
    return NonlinearityModel("power-difference", p=float(p), q=float(q))


def cubic_quintic() -> NonlinearityModel:
    return NonlinearityModel("cubic-quintic")


def custom(f: Callable, exponent_zero, exponent_inf: float, F: Optional[Callable] = None,
           name: str = "custom") -> NonlinearityModel:
    return NonlinearityModel("custom", func=f, primitive=F, exponent_zero=exponent_zero,
                             exponent_inf=float(exponent_inf), name=name)


def model_from_dict(d: dict) -> NonlinearityModel:
    d = dict(d)
    fam = d.pop("family", None)
    if fam == "cubic-quintic":
        if d:
            raise InadmissibleModel(f"cubic-quintic takes no parameters, got {sorted(d)}")
        return cubic_quintic()
    allowed = {"single-power": {"p", "sign"}, "power-sum": {"p", "q", "A"},
               "power-difference": {"p", "q"}}
    if fam not in allowed:
        raise InadmissibleModel(f"unknown or non-serialisable family {fam!r}")
    extra = set(d) - allowed[fam]
    if extra:
        raise InadmissibleModel(f"unknown keys for {fam}: {sorted(extra)}")
    return NonlinearityModel(fam, **{k: float(v) for k, v in d.items()})


def parse_model(text: str) -> NonlinearityModel:
    """Parse ``family:key=val,key=val`` (e.g. ``single-power:p=4``)."""
    fam, _, rest = text.partition(":")
    d = {"family": fam.strip()}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise InadmissibleModel(f"malformed model parameter {item!r}")
        d[key.strip()] = float(val)
    return model_from_dict(d)


def eval_f(model: NonlinearityModel, t):
    out = model.f(t)
    return float(out) if np.ndim(out) == 0 else out


def eval_F(model: NonlinearityModel, t):
    out = model.F(t)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ShiftedNonlinearity:
    base: NonlinearityModel
    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")

    def g(self, t):
        t = np.asarray(t, dtype=float)
        return -self.mu * t + self.base.f(t)

    def G(self, t):
        t = np.asarray(t, dtype=float)
        return -0.5 * self.mu * t * t + self.base.F(t)


# -- hypotheses ------------------------------------------------------------

@dataclass
class HypothesisReport:
    f1: str
    f2: str
    f3: str
    reasons: list = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(v in ("pass", "sampled") for v in (self.f1, self.f2, self.f3))


def check_hypotheses(model: NonlinearityModel, N: int) -> HypothesisReport:
    """f1: f(t)/t -> 0 at 0; f2: growth below |t|^(1+4/N); f3: F > 0 somewhere.

    Decided symbolically for built-ins, by sampling for custom models.
    """
    if N < 1:
        raise ValueError("dimension N must be >= 1")
    if not model.is_builtin:
        return _sample_hypotheses(model, N)
    crit = mass_critical_exponent(N)
    sob = sobolev_exponent(N)
    reasons = []
    f1 = "pass"  # every built-in exponent exceeds 2
    f3 = "pass"
    f2 = "pass"
    fam = model.family
    if fam == "single-power":
        if model.sign < 0:
            f3 = "fail"
            reasons.append("f3: F(t) = -|t|^p/p < 0 for all t != 0")
            top_positive = False
        else:
            top_positive = True
        top = model.p
    elif fam == "power-sum":
        top, top_positive = model.p, True
    else:
        top, top_positive = model.q, False
    if N >= 3 and top > sob:
        f2 = "fail"
        reasons.append(f"f2: growth exponent {top:g} - 1 exceeds (N+2)/(N-2) = {(N + 2) / (N - 2):g}")
    if top_positive and top >= crit:
        f2 = "fail"
        reasons.append(f"f2: f(t)t ~ |t|^{top:g} is not dominated by |t|^(2+4/N) = |t|^{crit:g}")
    return HypothesisReport(f1, f2, f3, reasons)


def _sample_hypotheses(model: NonlinearityModel, N: int) -> HypothesisReport:
    reasons = []
    small = np.concatenate([-np.logspace(-8, -3, 40), np.logspace(-8, -3, 40)])
    ratio = np.abs(model.f(small) / small)
    f1 = "sampled" if ratio.max() < 1e-2 and ratio[[0, -1]].max() <= ratio[[39, 40]].max() + 1e-12 else "fail"
    if f1 == "fail":
        reasons.append("f1: |f(t)/t| does not vanish on the sampled small-t grid")

    big = np.logspace(1, 4, 60)
    f2 = "sampled"
    crit = mass_critical_exponent(N)
    for s in (1.0, -1.0):
        t = s * big
        val = model.f(t) * t / np.abs(t) ** crit
        if val[-10:].max() > 1e-6:
            f2 = "fail"
            reasons.append(f"f2: f(t)t/|t|^(2+4/N) stays positive as t -> {'+' if s > 0 else '-'}inf")
        if N >= 3:
            grow = np.abs(model.f(t)) / np.abs(t) ** ((N + 2) / (N - 2))
            if grow[-1] > 10 * max(grow[-20], 1e-300) and grow[-1] > 1e-8:
                f2 = "fail"
                reasons.append("f2: |f(t)| grows faster than |t|^((N+2)/(N-2))")
    if model.exponent_inf is not None and model.exponent_inf >= crit and f2 == "sampled":
        # declared growth is supercritical: only the sign of the top term saves it
        reasons.append("f2: declared growth exceeds 2+4/N; passing relies on the sampled sign")

    grid = np.concatenate([-np.logspace(-4, 2, 400), np.logspace(-4, 2, 400)])
    f3 = "sampled" if np.any(model.F(grid) > 0) else "fail"
    if f3 == "fail":
        reasons.append("f3: no sampled zeta with F(zeta) > 0")
    return HypothesisReport(f1, f2, f3, reasons)


def classify_small_mass(model: NonlinearityModel, N: int) -> str:
    """'A1' (m* = 0), 'A2' (m* > 0) or 'undetermined'."""
    crit = mass_critical_exponent(N)
    if model.is_builtin:
        a, sgn = model.leading_exponent_zero()
        return "A1" if (sgn > 0 and a < crit) else "A2"
    a0 = model.exponent_zero
    if isinstance(a0, (tuple, list)):
        lo, hi = float(a0[0]), float(a0[1])
        if lo < crit <= hi:
            return "undetermined"
        a0 = lo
    if a0 >= crit:
        return "A2"
    t = np.array([-1e-6, -1e-5, 1e-5, 1e-6])
    return "A1" if np.all(model.F(t) > 0) else "A2"


def sampled_A2_constant(model: NonlinearityModel, N: int, t_max: float = 1.0) -> float:
    """Sampled sup of F(t)/|t|^(2+4/N) on 0 < |t| <= t_max (an estimate, not a bound)."""
    crit = mass_critical_exponent(N)
    t = np.concatenate([-np.logspace(-6, np.log10(t_max), 400), np.logspace(-6, np.log10(t_max), 400)])
    return float(np.max(model.F(t) / np.abs(t) ** crit))


# -- phase-plane roots -----------------------------------------------------

@dataclass(frozen=True)
class ZetaResult:
    zeta: float
    g_at_zeta: float
    scan_max: float

    @property
    def sign_condition(self) -> bool:
        """g_mu(zeta_+) > 0, resp. g_mu(zeta_-) < 0."""
        return self.g_at_zeta * np.sign(self.zeta) > 0


ZETA_XTOL = 1e-12


def find_zeta(shifted: ShiftedNonlinearity, sign: int, t_min: float = 1e-8,
              t_max: float = 1e8, scan_points: int = 20000) -> Optional[ZetaResult]:
    """Extreme root of G_mu nearest 0 on the side ``sign`` (+1 or -1), or None."""
    s = 1.0 if sign > 0 else -1.0
    geo = s * np.geomspace(t_min, t_max, 2000)
    pos = np.nonzero(s * shifted.g(geo) > 0)[0]
    if pos.size == 0:
        return None
    t_g = abs(geo[pos[0]])
    scan_max = 10.0 * t_g
    grid = s * np.linspace(0.0, scan_max, scan_points + 1)[1:]
    Gv = shifted.G(grid)
    hit = np.nonzero(Gv >= 0.0)[0]
    if hit.size == 0:
        return None
    k = hit[0]
    if Gv[k] == 0.0:
        z = float(grid[k])
    else:
        if k > 0:
            a = grid[k - 1]
        else:
            # root below the first scan point: halve towards 0 until G < 0
            a = 0.5 * grid[0]
            for _ in range(200):
                if shifted.G(a) < 0:
                    break
                a *= 0.5
            else:
                return None
        xtol = ZETA_XTOL * min(1.0, abs(float(grid[k])))
        z = optimize.bisect(lambda x: float(shifted.G(x)), a, grid[k], xtol=xtol, maxiter=400)
    return ZetaResult(float(z), float(shifted.g(z)), scan_max)
