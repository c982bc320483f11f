"""The ten acceptance criteria at their stated tolerances.

Each test records one ``criterion k: PASS|FAIL ...`` line; the lines are
printed in the terminal summary (see conftest.py) and on stdout.
"""
import math
import time

import numpy as np
import pytest

from massmin.critical_mass import (certify_negative, curve_properties, estimate_mstar,
                                   negativity_status)
from massmin.minimizer import SolverConfig, energy_curve, minimize, sign_monotonicity_check
from massmin.mp_path import (check_path_result, dilation_path, plateau_path_1d, segment_pattern,
                             two_param_path_2d, SEGMENT_PATTERN)
from massmin.nonlinearity import (check_hypotheses, cubic_quintic, mass_critical_exponent,
                                  power_sum, single_power)
from massmin.radial import RadialGrid
from massmin.shooting import least_action, reshoot, shoot_1d
from massmin.verification import verify_lemma32

from conftest import ACCEPTANCE_LINES

RESID_TOL = 1e-3
# residual reports gathered from criteria 1-3, 6, 7, 9, 10 for criterion 4
RESIDUALS: list = []


def record(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[k] = line
    print(line)
    assert ok, line


def collect(label, report):
    RESIDUALS.append((label, report.pohozaev_rel, report.nehari_rel))


@pytest.fixture(scope="module")
def cubic_run():
    t0 = time.perf_counter()
    res = minimize(single_power(4), 1, 4.0, RadialGrid(1, 20.0, 4000), SolverConfig())
    return res, time.perf_counter() - t0


def test_criterion_01_cubic_soliton(cubic_run):
    res, dt = cubic_run
    collect("c1 minimizer m=4", res.residuals)
    ok = abs(res.E + 2 / 3) <= 1e-3 and abs(res.mu - 1) <= 1e-3 and dt < 5 and res.converged
    record(1, ok, f"E={res.E:.7f} (-2/3), mu={res.mu:.7f}, {dt:.2f}s")


def test_criterion_02_energy_curve_law():
    rows = energy_curve(single_power(4), 1, [1.0, 2.0, 3.0, 4.0], RadialGrid(1, 20.0, 4000))
    rel = [abs(r.E + r.m**3 / 96) / (r.m**3 / 96) for r in rows]
    for r in rows:
        if r.converged:
            collect(f"c2 minimizer m={r.m:g}", r.result.residuals)
    rep = curve_properties(rows, 1)
    ok = max(rel) <= 5e-3 and rep.nonincreasing and rep.subhomogeneous
    record(2, ok, f"max rel dev {max(rel):.2e}, nonincreasing={rep.nonincreasing}, "
                  f"subhomogeneous={rep.subhomogeneous}")


def test_criterion_03_least_action_identity(cubic_run):
    res, _ = cubic_run
    la = least_action(single_power(4), 1, 1.0)
    for c in la.candidates:
        collect(f"c3 witness sign={c.sign}", c.residuals())
    gap = abs(la.A - (res.E + 2.0))
    ok = la.found and abs(la.A - 4 / 3) <= 1e-4 and gap <= 2e-3
    record(3, ok, f"A={la.A:.8f} (4/3), |A - (E_4 + 2)| = {gap:.2e}")


def test_criterion_05_phase_plane_conservation():
    w = shoot_1d(single_power(4), 1.0, 1, step=1e-3)
    ok = w.decayed and w.phase_energy_max_dev <= 1e-6
    record(5, ok, f"max |u'^2/2 + G_mu(u)| = {w.phase_energy_max_dev:.2e}")


def test_criterion_06_critical_mass_dichotomy():
    t0 = time.perf_counter()
    cq = cubic_quintic()
    # N = 1: no threshold; E_m ~ -m^3/96 is tiny, so grids follow the soliton width 4/m
    est1 = estimate_mstar(cq, 1)

    def small_grid(m):
        return RadialGrid(1, 40.0 * 4.0 / m, 8000)

    checks = []
    for m in (0.01, 0.1, 1.0):
        L = 4.0 / m
        cfg = SolverConfig(dt=0.1 * L * L, tol=1e-12, width=L)
        (_, E, ok, _), = certify_negative(cq, 1, [m], small_grid, cfg, margin=1e-11)
        checks.append((m, E, ok))
    zero_ok = est1.classification == "zero" and all(ok for _, _, ok in checks)

    grid3 = RadialGrid(3, 40.0, 4000)
    est3 = estimate_mstar(cq, 3, (0.1, 200.0), 1e-2, grid3, SolverConfig(restarts=4))
    # lower end re-checked with fresh restarts: never certified negative
    lower_status = [negativity_status(cq, 3, est3.lower, grid3,
                                      SolverConfig(restarts=4, seed=s), est3.margin)[0]
                    for s in (0, 17)]
    lower_never = all(st == "zero" for st in lower_status)
    bracket_ok = (est3.classification == "positive" and est3.width <= 1e-2
                  and est3.E_upper < -est3.margin and lower_never)
    rows = energy_curve(cq, 3, [250.0, 300.0, 350.0, 400.0], grid3, SolverConfig())
    for r in rows:
        if r.converged:
            collect(f"c6 N=3 minimizer m={r.m:g}", r.result.residuals)
    rep = curve_properties(rows, 3)
    dt = time.perf_counter() - t0
    ok = zero_ok and bracket_ok and bool(rep.concave) and dt < 120
    record(6, ok, f"N=1 {est1.classification}, E(0.01,0.1,1)=({', '.join(f'{E:.3e}' for _, E, _ in checks)}); "
                  f"N=3 m* in [{est3.lower:.4f}, {est3.upper:.4f}], E(upper)={est3.E_upper:.2e}, "
                  f"concave={rep.concave}, {dt:.1f}s")


def test_criterion_07_mountain_pass_paths():
    p3 = single_power(3)
    la3 = least_action(p3, 3, 1.0)
    w3 = reshoot(la3.witness, 1.25e-4)
    collect("c7 N=3 witness", w3.residuals())
    d3 = dilation_path(p3, w3, 1.0, samples=64, strict=False)
    r3 = check_path_result(d3)
    ok3 = d3.max_formula_dev <= 1e-6 and r3.argmax_t == 1.0 and d3.samples[-1].action < -1 \
        and r3.mass_increasing

    cubic = single_power(4)
    w1 = shoot_1d(cubic, 1.0, -1)
    collect("c7 N=1 witness", w1.residuals())
    pl = plateau_path_1d(cubic, w1, samples=32)
    ok1 = all(s.action < pl.J_w for s in pl.samples if s.t != 1.0)

    la2 = least_action(p3, 2, 1.0)
    w2 = reshoot(la2.witness, 2.5e-4)
    collect("c7 N=2 witness", w2.residuals())
    tp = two_param_path_2d(p3, w2, 1.0, samples=8)
    pat = segment_pattern(tp)
    ok2 = pat == SEGMENT_PATTERN
    record(7, ok3 and ok1 and ok2,
           f"N=3 dev {d3.max_formula_dev:.1e}, argmax t={r3.argmax_t:g}, J(T)={d3.samples[-1].action:.2f}; "
           f"N=1 plateau below J(w): {ok1}; N=2 pattern: {ok2}")


def test_criterion_08_rearrangement():
    v = verify_lemma32(2, count=100, seed=0)
    record(8, v.passed, f"mass dev {v.measured['max_rel_mass_change']:.1e}, "
                        f"gradient increases {v.measured['gradient_increases']}, "
                        f"idempotent {v.measured['idempotent']}")


def _random_instances(rng, count):
    out = []
    while len(out) < count:
        N = int(rng.integers(1, 4))
        crit = mass_critical_exponent(N)
        kind = rng.integers(0, 3)
        if kind == 0:
            model = single_power(float(rng.uniform(2.3, crit - 0.2)))
        elif kind == 1:
            q, p = sorted(rng.uniform(2.3, crit - 0.2, size=2))
            model = power_sum(float(p), float(q), float(rng.uniform(0.2, 2.0)))
        elif N == 1:
            model = cubic_quintic()
        else:
            continue
        if not check_hypotheses(model, N).all_pass:
            continue
        out.append((model, N, float(rng.uniform(2.0, 8.0) * N * N)))
    return out


def test_criterion_09_sign_and_monotonicity():
    rng = np.random.default_rng(2024)
    fails = []
    for model, N, m in _random_instances(rng, 10):
        res = minimize(model, N, m, RadialGrid(N, 40.0, 4000), SolverConfig())
        if res.mu > 1.0:
            # narrow ground state: refit the box to the decay length 1/sqrt(mu)
            L = 1.0 / math.sqrt(res.mu)
            res = minimize(model, N, m, RadialGrid(N, 40.0 * L, 4000), SolverConfig(dt=L * L, width=L))
        if res.converged:
            collect(f"c9 {model.describe()} N={N} m={m:.3g}", res.residuals)
        rep = sign_monotonicity_check(res)
        if not (res.converged and rep.passed):
            fails.append(f"{model.describe()} N={N} m={m:.3g} ({res.status})")
    record(9, not fails, "10 random instances" + (f"; failed: {fails}" if fails else ", all pass"))


def test_criterion_10_cross_solver():
    cq = cubic_quintic()
    grid = RadialGrid(1, 60.0, 12000)
    res = minimize(cq, 1, 2.0, grid, SolverConfig(width=3.0))
    collect("c10 minimizer", res.residuals)
    w = shoot_1d(cq, res.mu, 1)
    collect("c10 witness", w.residuals())
    u = np.abs(res.profile.values)  # height alignment: both positive, peaked at 0
    ws = np.interp(grid.r, w.x, w.u, right=0.0)
    dist = float(np.max(np.abs(u - ws)))
    record(10, res.converged and w.decayed and dist <= 1e-3,
           f"m=2, mu={res.mu:.6f}, sup |u - w| = {dist:.2e}")


def test_criterion_04_identity_residuals():
    # runs last in this module: the other criteria fill RESIDUALS
    assert RESIDUALS, "no residuals collected"
    worst = max(RESIDUALS, key=lambda r: max(r[1], r[2]))
    bad = [r[0] for r in RESIDUALS if max(r[1], r[2]) > RESID_TOL]
    record(4, not bad, f"{len(RESIDUALS)} solutions, worst {worst[0]}: "
                       f"Pohozaev {worst[1]:.1e}, Nehari {worst[2]:.1e}")
