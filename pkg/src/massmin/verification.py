"""Numerical verdicts on the structural claims, one ``TheoremVerdict`` per claim.

Claim ids:
    THM18-i / THM18-ii   least action vs E_m + mu m / 2, and the witness on S_m
    THM14                constant sign and monotone modulus of a minimizer
    THM11-i .. THM11-iv  energy curve: sign, small-mass dichotomy,
                         sub-homogeneity, monotone and continuous
    REM23                concavity of m -> E_m (N >= 2)
    LEM31-a*, LEM31-b*   structure of 1D solutions, per sign
    LEM32                rearrangement: mass kept, gradient not increased
    LEM41-*              mountain-pass path properties
    RESID                Pohozaev / Nehari residuals of every certified solution
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .critical_mass import curve_properties
from .functionals import energy_I
from .minimizer import (MinimizeResult, SolverConfig, energy_curve, minimize,
                        sign_monotonicity_check)
from .mp_path import (PathError, check_path_result, dilation_path, plateau_bound_ok,
                      plateau_path_1d, segment_pattern, SEGMENT_PATTERN, two_param_path_2d)
from .nonlinearity import (NonlinearityModel, ShiftedNonlinearity, classify_small_mass,
                           find_zeta)
from .radial import (RadialGrid, RadialProfile, grad_norm_sq, mass, schwarz_rearrange)
from .shooting import least_action, reshoot, shoot_1d

PASS, FAIL, NA = "pass", "fail", "not-applicable"

TOLERANCES = {
    "THM18": 2e-3,
    "THM14": 1e-8,
    "THM11": 1e-8,
    "LEM31": 1e-6,
    "LEM32": 1e-10,
    "LEM41": 1e-6,
    "RESID": 1e-3,
}


@dataclass
class TheoremVerdict:
    claim_id: str
    instance: str
    measured: dict
    tolerance: float
    verdict: str
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def row(self) -> dict:
        return {"claim_id": self.claim_id, "instance": self.instance, "verdict": self.verdict,
                "tolerance": self.tolerance, "measured": json.dumps(self.measured, sort_keys=True),
                "note": self.note}


def _instance(model: NonlinearityModel, N, **kw) -> str:
    extra = ",".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in kw.items())
    return f"{model.describe()};N={N}" + (f";{extra}" if extra else "")


def _tol(key, tolerances):
    return (tolerances or {}).get(key, TOLERANCES[key])


def _v(flag: bool) -> str:
    return PASS if flag else FAIL


# -- residuals -------------------------------------------------------------

def residual_verdict(label: str, report, tol: Optional[float] = None) -> TheoremVerdict:
    tol = TOLERANCES["RESID"] if tol is None else tol
    meas = {"pohozaev_rel": report.pohozaev_rel, "nehari_rel": report.nehari_rel, "J": report.J}
    ok = report.pohozaev_rel <= tol and report.nehari_rel <= tol
    return TheoremVerdict("RESID", label, meas, tol, _v(ok))


# -- least action ------------------------------------------------------------

def verify_thm18(model, N, m, grid, config=None, tolerances=None, mstar_upper=None,
                 result: Optional[MinimizeResult] = None):
    """(THM18-i, THM18-ii) at mass m; N >= 2 comparisons are one-sided."""
    config = config or SolverConfig()
    tol = _tol("THM18", tolerances)
    inst = _instance(model, N, m=float(m))
    if mstar_upper is not None and m <= mstar_upper:
        note = f"m={m:g} not above the critical-mass bracket (upper {mstar_upper:g})"
        return (TheoremVerdict("THM18-i", inst, {}, tol, NA, note),
                TheoremVerdict("THM18-ii", inst, {}, tol, NA, note))
    res = result or minimize(model, N, m, grid, config)
    if not res.converged or not res.mu > 0:
        note = f"minimizer status {res.status}; E_m < 0 not established"
        return (TheoremVerdict("THM18-i", inst, {"E": res.E}, tol, NA, note),
                TheoremVerdict("THM18-ii", inst, {"E": res.E}, tol, NA, note))
    target = res.E + 0.5 * res.mu * m
    la = least_action(model, N, res.mu)
    meas = {"E": res.E, "mu": res.mu, "E_plus_half_mu_m": target, "A": la.A}
    if not la.found:
        note = "no decaying solution found by shooting"
        return (TheoremVerdict("THM18-i", inst, meas, tol, NA, note),
                TheoremVerdict("THM18-ii", inst, meas, tol, NA, note))
    scale = tol * max(1.0, abs(target))
    diff = la.A - target
    meas["diff"] = diff
    if N == 1:
        v1 = TheoremVerdict("THM18-i", inst, meas, tol, _v(abs(diff) <= scale), "two-sided")
    else:
        # shooting gives the action of a solution, so A_mu <= A; A < target - tol
        # would exhibit a solution below E_m + mu m / 2
        if diff < -scale:
            verdict, note = FAIL, "one-sided: solution with action below E + mu m/2"
        elif abs(diff) <= scale:
            verdict, note = PASS, "one-sided bound, equality observed"
        else:
            verdict, note = NA, "one-sided: shooting witness has larger action (upper bound only)"
        v1 = TheoremVerdict("THM18-i", inst, meas, tol, verdict, note)
    w = la.witness
    prof = w.profile()
    m_w = mass(prof)
    I_w = energy_I(model, prof).I
    meas2 = {"witness_mass": m_w, "m": float(m), "witness_I": I_w, "E": res.E}
    ok = abs(m_w - m) <= tol * max(1.0, m) and abs(I_w - res.E) <= tol * max(1.0, abs(res.E))
    v2 = TheoremVerdict("THM18-ii", inst, meas2, tol, _v(ok),
                        "two-sided" if N == 1 else "one-sided witness (radial shooting)")
    return v1, v2


# -- sign / monotonicity ----------------------------------------------------------

def verify_thm14(result: MinimizeResult, tolerances=None, instance: str = "") -> TheoremVerdict:
    tol = _tol("THM14", tolerances)
    inst = instance or f"N={result.profile.grid.N};m={result.m:g}"
    if not result.converged:
        return TheoremVerdict("THM14", inst, {"status": result.status}, tol, NA,
                              "minimizer not converged")
    rep = sign_monotonicity_check(result, floor_rel=tol)
    meas = {"constant_sign": rep.constant_sign, "nonincreasing_modulus": rep.nonincreasing_modulus,
            "floor": rep.floor, "radial_symmetry": "by construction"}
    return TheoremVerdict("THM14", inst, meas, tol, _v(rep.passed))


# -- energy curve ----------------------------------------------------------------

def verify_curve(model, N, masses, grid, config=None, tolerances=None, oracle=None,
                 mstar=None, oracle_rtol: float = 5e-3) -> list:
    """THM11-i..iv (and REM23 for N >= 2) on an energy-curve table."""
    masses = list(masses)
    if not masses:
        raise ValueError("empty mass list")
    config = config or SolverConfig()
    tol = _tol("THM11", tolerances)
    inst = _instance(model, N, masses=f"{masses[0]:g}..{masses[-1]:g}")
    rows = energy_curve(model, N, masses, grid, config)
    out = []
    E = np.array([r.E for r in rows])
    margin = 10.0 * config.tol
    certified = [r.result is not None and r.result.certifies_negative(margin) for r in rows]
    meas = {"E": E.tolist(), "certified_negative": certified}
    ok_i = bool(np.all(E <= 0) and certified[-1])
    out.append(TheoremVerdict("THM11-i", inst, meas, tol, _v(ok_i),
                              "E_m <= 0 everywhere and certified negative at the largest mass"))
    cls = classify_small_mass(model, N)
    meas2 = {"classification": cls, "certified_negative": certified}
    if cls == "A1":
        out.append(TheoremVerdict("THM11-ii", inst, meas2, tol, _v(all(certified)),
                                  "A1: E_m < 0 at every sampled mass"))
    elif cls == "A2":
        est = mstar if mstar is not None else None
        if est is None:
            zero_small = not certified[0]
            out.append(TheoremVerdict("THM11-ii", inst, meas2, tol, _v(zero_small),
                                      "A2: E_m not certified negative at the smallest mass"))
        else:
            meas2.update(lower=est.lower, upper=est.upper, E_upper=est.E_upper)
            ok = est.lower > 0 and est.E_upper < -est.margin
            out.append(TheoremVerdict("THM11-ii", inst, meas2, tol, _v(ok), "A2: m* > 0 bracket"))
    else:
        out.append(TheoremVerdict("THM11-ii", inst, meas2, tol, NA, "small-mass class undetermined"))
    rep = curve_properties(rows, N, tol=tol) if len(rows) >= 4 else None
    if rep is None:
        out.append(TheoremVerdict("THM11-iii", inst, {}, tol, NA, "fewer than 4 masses"))
        out.append(TheoremVerdict("THM11-iv", inst, {}, tol, NA, "fewer than 4 masses"))
    else:
        out.append(TheoremVerdict("THM11-iii", inst, {"subhomogeneous": rep.subhomogeneous},
                                  tol, _v(rep.subhomogeneous), "; ".join(rep.details)))
        meas4 = {"nonincreasing": rep.nonincreasing, "continuous_gap": rep.continuous_gap,
                 "max_slope": rep.max_slope, "slope_bound": rep.slope_bound}
        out.append(TheoremVerdict("THM11-iv", inst, meas4, tol,
                                  _v(rep.nonincreasing and rep.continuous_gap)))
        if N >= 2:
            out.append(TheoremVerdict("REM23", inst, {"concave": rep.concave}, tol, _v(bool(rep.concave))))
    if oracle is not None:
        ref = np.array([oracle(m) for m in masses])
        rel = np.abs(E - ref) / np.abs(ref)
        out.append(TheoremVerdict("CURVE-oracle", inst, {"E": E.tolist(), "ref": ref.tolist(),
                                                         "rel": rel.tolist()},
                                  oracle_rtol, _v(bool(np.all(rel <= oracle_rtol)))))
    for r in rows:
        if r.result is not None and r.result.converged:
            out.append(residual_verdict(_instance(model, N, m=r.m) + ";minimizer", r.result.residuals,
                                        _tol("RESID", tolerances)))
    return out


# -- 1D solutions ----------------------------------------------------------------

def verify_lemma31(model, mu_list, tolerances=None) -> list:
    """Per mu and sign: sign condition at zeta, and (x1)-(x4) on the shot."""
    tol = _tol("LEM31", tolerances)
    out = []
    for mu in mu_list:
        sh = ShiftedNonlinearity(model, mu)
        for sign, tag in ((-1, "a"), (1, "b")):
            inst = _instance(model, 1, mu=float(mu), sign=sign)
            z = find_zeta(sh, sign)
            if z is None:
                for k in range(5):
                    out.append(TheoremVerdict(f"LEM31-{tag}{k}", inst, {}, tol, NA, "no zeta (G_mu has no root)"))
                continue
            out.append(TheoremVerdict(f"LEM31-{tag}0", inst, {"zeta": z.zeta, "g_zeta": z.g_at_zeta},
                                      tol, _v(z.sign_condition), "sign condition on g_mu at zeta"))
            res = shoot_1d(model, mu, sign)
            if not res.decayed:
                for k in range(1, 5):
                    out.append(TheoremVerdict(f"LEM31-{tag}{k}", inst, {"status": res.status}, tol,
                                              NA if not z.sign_condition else FAIL, res.event))
                continue
            out.append(TheoremVerdict(f"LEM31-{tag}1", inst, {"reflection": "even"}, tol, PASS,
                                      "symmetric by construction (even reflection)"))
            u = res.u
            floor = 1e-12 * abs(z.zeta)
            const = bool(np.all(sign * u[:-1] > -floor)) and bool(np.all(sign * u[u.size // 4:] >= -floor))
            out.append(TheoremVerdict(f"LEM31-{tag}2", inst, {"min_signed": float(np.min(sign * u))},
                                      tol, _v(const)))
            out.append(TheoremVerdict(f"LEM31-{tag}3", inst,
                                      {"u0": float(u[0]), "zeta": z.zeta,
                                       "phase_dev": res.phase_energy_max_dev},
                                      tol, _v(res.phase_energy_max_dev <= tol),
                                      "w(0) = zeta; phase-plane energy conserved"))
            up = res.uprime[1:]
            mono = bool(np.all(-sign * up >= -floor))
            out.append(TheoremVerdict(f"LEM31-{tag}4", inst, {"max_wrong_slope": float(np.max(sign * up))},
                                      tol, _v(mono)))
            out.append(residual_verdict(inst + ";shooting", res.residuals(), _tol("RESID", tolerances)))
    return out


# -- rearrangement ---------------------------------------------------------------

def random_profiles(grid: RadialGrid, count: int, seed: int = 0) -> list:
    """Nonnegative profiles: random sums of bumps plus noise, zero at R."""
    rng = np.random.default_rng(seed)
    r = grid.r
    out = []
    for _ in range(count):
        v = np.zeros_like(r)
        for _ in range(rng.integers(1, 5)):
            c = rng.uniform(0, 0.6 * grid.R)
            s = rng.uniform(0.2, 2.0)
            v += rng.uniform(0.1, 2.0) * np.exp(-((r - c) ** 2) / (2 * s * s))
        v += 0.05 * rng.random(r.size) * np.exp(-r / 3)
        out.append(RadialProfile(grid, v))
    return out


def verify_lemma32(N: int = 2, count: int = 100, seed: int = 0, tolerances=None,
                   grid: Optional[RadialGrid] = None) -> TheoremVerdict:
    tol = _tol("LEM32", tolerances)
    grid = grid or RadialGrid(N, 10.0, 800)
    worst_mass = 0.0
    grad_up = 0
    idem = True
    for u in random_profiles(grid, count, seed):
        v = schwarz_rearrange(u)
        worst_mass = max(worst_mass, abs(mass(v) - mass(u)) / mass(u))
        if grad_norm_sq(v) > grad_norm_sq(u) * (1 + 1e-12):
            grad_up += 1
        idem &= bool(np.array_equal(schwarz_rearrange(v).values, v.values))
    meas = {"max_rel_mass_change": worst_mass, "gradient_increases": grad_up, "idempotent": idem}
    ok = worst_mass <= tol and grad_up == 0 and idem
    return TheoremVerdict("LEM32", f"N={N};profiles={count};seed={seed}", meas, tol, _v(ok))


# -- mountain-pass paths ---------------------------------------------------------------

def witness_path(model, N, mu, samples):
    """Witness by shooting, then the path for its dimension: plateau, two-parameter or dilation."""
    if N == 1:
        la = least_action(model, 1, mu)
        if not la.found:
            raise PathError("no 1D witness")
        w = la.witness
        if w.sign > 0:
            neg = shoot_1d(model, mu, -1)
            w = neg if neg.decayed else w
        return plateau_path_1d(model, w, samples=samples), w
    la = least_action(model, N, mu)
    if not la.found:
        raise PathError(f"no radial witness at mu={mu}")
    w = reshoot(la.witness, 1.25e-4)
    if N == 2:
        return two_param_path_2d(model, w, mu, samples=max(samples // 4, 4)), w
    return dilation_path(model, w, mu, samples=samples), w


def verify_lemma41(model, N, mu, delta=None, M_target=None, samples: int = 32,
                   tolerances=None) -> list:
    """Build the path for dimension N and check it; sampling doubles once to test stability."""
    tol = _tol("LEM41", tolerances)
    inst = _instance(model, N, mu=float(mu))
    out = []
    try:
        path, w = witness_path(model, N, mu, samples)
        path2, _ = witness_path(model, N, mu, 2 * samples)
    except PathError as exc:
        return [TheoremVerdict("LEM41", inst, {}, tol, FAIL, str(exc))]
    rep = check_path_result(path, delta, M_target)
    rep2 = check_path_result(path2, delta, M_target)
    stable = rep.passed == rep2.passed
    meas = {"T": path.T, "J_w": path.J_w, "J_T": path.samples[-1].action,
            "m_T": path.samples[-1].mass, "argmax_t": rep.argmax_t, "t_w": path.t_w,
            "formula_dev": path.max_formula_dev, "stable_under_refinement": stable}
    out.append(TheoremVerdict("LEM41-i", inst, meas, tol, _v(rep.item_i and stable), "; ".join(rep.reasons)))
    out.append(TheoremVerdict("LEM41-ii", inst, {"samples": len(path.samples)}, tol, _v(rep.item_ii)))
    out.append(TheoremVerdict("LEM41-iii", inst, {"m_T": path.samples[-1].mass}, tol, _v(rep.item_iii)))
    if path.kind == "dilation":
        out.append(TheoremVerdict("LEM41-formula", inst, {"max_rel_dev": path.max_formula_dev},
                                  tol, _v(path.max_formula_dev <= tol)))
    elif path.kind == "plateau":
        away = [s.action < path.J_w for s in path.samples if s.t != 1.0]
        out.append(TheoremVerdict("LEM41-plateau", inst, {"eps": path.params["eps"],
                                                          "below_J_w": all(away),
                                                          "bound": plateau_bound_ok(path)},
                                  tol, _v(all(away) and plateau_bound_ok(path))))
    else:
        pat = segment_pattern(path)
        out.append(TheoremVerdict("LEM41-pattern", inst, {"observed": pat}, tol,
                                  _v(pat == SEGMENT_PATTERN)))
    return out


# -- suite ----------------------------------------------------------------------

def run_suite(model, N, m, grid=None, config=None, suite: str = "all", tolerances=None,
              mu_list=None, curve_masses=None) -> list:
    """Verdicts sorted by claim id."""
    config = config or SolverConfig()
    grid = grid or RadialGrid(N)
    parts = set(suite.split(","))
    every = "all" in parts
    out = []
    res = minimize(model, N, m, grid, config)
    if every or "thm14" in parts:
        out.append(verify_thm14(res, tolerances, _instance(model, N, m=float(m))))
    if res.converged:
        out.append(residual_verdict(_instance(model, N, m=float(m)) + ";minimizer", res.residuals,
                                    _tol("RESID", tolerances)))
    if every or "thm18" in parts:
        out.extend(verify_thm18(model, N, m, grid, config, tolerances, result=res))
    if every or "curve" in parts:
        masses = curve_masses or [m * k / 4 for k in (1, 2, 3, 4)]
        out.extend(verify_curve(model, N, masses, grid, config, tolerances))
    mu = res.mu if res.mu > 0 else 1.0
    if N == 1 and (every or "lemma31" in parts):
        out.extend(verify_lemma31(model, mu_list or [mu], tolerances))
    if every or "lemma32" in parts:
        out.append(verify_lemma32(max(N, 1), tolerances=tolerances))
    if every or "lemma41" in parts:
        out.extend(verify_lemma41(model, N, mu, tolerances=tolerances))
    return sorted(out, key=lambda v: v.claim_id)


VERDICT_FIELDS = ["claim_id", "instance", "verdict", "tolerance", "measured", "note"]


def write_verdicts_csv(verdicts, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=VERDICT_FIELDS)
        wr.writeheader()
        for v in verdicts:
            wr.writerow(v.row())


def summary_table(verdicts) -> str:
    w = max([len(v.claim_id) for v in verdicts] + [5])
    lines = [f"{'claim':<{w}}  {'verdict':<14}  instance"]
    for v in verdicts:
        lines.append(f"{v.claim_id:<{w}}  {v.verdict:<14}  {v.instance}")
    n_fail = sum(v.verdict == FAIL for v in verdicts)
    lines.append(f"{len(verdicts)} verdicts, {n_fail} failed")
    return "\n".join(lines)


def exit_status(verdicts) -> int:
    return 3 if any(v.verdict == FAIL for v in verdicts) else 0


def compare_baseline(verdicts, path, rtol: float = 1e-6) -> list:
    """Write measured numbers on first use; later runs report drift per claim."""
    current = {f"{v.claim_id}|{v.instance}": v.measured for v in verdicts}
    if not os.path.exists(path):
        with open(path, "w") as fh:
            json.dump(current, fh, indent=1, sort_keys=True, default=str)
        return []
    with open(path) as fh:
        base = json.load(fh)
    drift = []
    for key, meas in current.items():
        old = base.get(key)
        if old is None:
            continue
        for k, v in meas.items():
            o = old.get(k)
            if isinstance(v, float) and isinstance(o, (int, float)) and math.isfinite(v):
                if abs(v - o) > rtol * max(1.0, abs(o)):
                    drift.append((key, k, o, v))
    return drift
