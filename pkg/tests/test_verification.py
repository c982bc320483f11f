import csv
import json

import numpy as np
import pytest

from massmin.minimizer import SolverConfig, minimize
from massmin.nonlinearity import cubic_quintic, single_power
from massmin.radial import RadialGrid, RadialProfile
from massmin.verification import (FAIL, NA, PASS, TheoremVerdict, compare_baseline, exit_status,
                                  random_profiles, run_suite, summary_table, verify_curve,
                                  verify_lemma31, verify_lemma32, verify_thm14, verify_thm18,
                                  write_verdicts_csv)


@pytest.fixture(scope="module")
def suite():
    return run_suite(single_power(4), 1, 4.0, RadialGrid(1, 20.0, 4000), SolverConfig())


def test_full_suite_cubic_1d_passes(suite):
    assert all(v.verdict == PASS for v in suite), [v.row() for v in suite if not v.passed]
    ids = [v.claim_id for v in suite]
    assert ids == sorted(ids)
    for claim in ("THM14", "THM18-i", "THM18-ii", "THM11-i", "LEM31-a0", "LEM32", "LEM41-i", "RESID"):
        assert claim in ids
    assert exit_status(suite) == 0


def test_partial_suite_selection():
    out = run_suite(single_power(4), 1, 2.0, RadialGrid(1, 20.0, 2000), suite="thm14,lemma32")
    assert {v.claim_id for v in out} == {"THM14", "LEM32", "RESID"}


def test_verdict_csv_and_summary(suite, tmp_path):
    path = tmp_path / "v.csv"
    write_verdicts_csv(suite, path)
    rows = list(csv.DictReader(open(path)))
    assert len(rows) == len(suite)
    assert json.loads(rows[0]["measured"]) == suite[0].measured
    text = summary_table(suite)
    assert text.splitlines()[-1] == f"{len(suite)} verdicts, 0 failed"


def test_exit_status_on_failure():
    vs = [TheoremVerdict("X", "", {}, 0.0, PASS), TheoremVerdict("Y", "", {}, 0.0, FAIL)]
    assert exit_status(vs) == 3
    assert exit_status(vs[:1]) == 0
    assert exit_status([TheoremVerdict("Z", "", {}, 0.0, NA)]) == 0


def test_baseline_drift(suite, tmp_path):
    base = tmp_path / "base.json"
    assert compare_baseline(suite, base) == []
    assert compare_baseline(suite, base) == []
    v = next(v for v in suite if any(isinstance(x, float) for x in v.measured.values()))
    moved = TheoremVerdict(v.claim_id, v.instance, {k: (x + 1.0 if isinstance(x, float) else x)
                                                    for k, x in v.measured.items()},
                           v.tolerance, v.verdict)
    assert compare_baseline([moved], base)


def test_thm14_on_sign_changing_profile(cubic, grid1):
    res = minimize(cubic, 1, 2.0, grid1)
    assert verify_thm14(res).verdict == PASS
    res.profile = RadialProfile.from_function(grid1, lambda r: np.cos(r) * np.exp(-r))
    res.status = "converged"
    assert verify_thm14(res).verdict == FAIL


def test_thm14_not_applicable_without_convergence():
    res = minimize(single_power(4), 1, 2.0, RadialGrid(1, 20.0, 1000), SolverConfig(max_iter=2))
    assert verify_thm14(res).verdict == NA


def test_thm18_below_critical_mass_is_not_applicable():
    v1, v2 = verify_thm18(cubic_quintic(), 3, 100.0, RadialGrid(3, 40.0, 1000), mstar_upper=240.0)
    assert v1.verdict == v2.verdict == NA
    assert "critical-mass" in v1.note


def test_thm18_one_sided_in_2d():
    v1, v2 = verify_thm18(single_power(3), 2, 10.0, RadialGrid(2, 20.0, 4000))
    assert v1.verdict == PASS, v1.measured
    assert "one-sided" in v1.note


def test_lemma31_no_zeta_above_threshold():
    out = verify_lemma31(cubic_quintic(), [0.2])
    assert len(out) == 10 and all(v.verdict == NA for v in out)


def test_lemma31_cubic_quintic_below_threshold():
    out = verify_lemma31(cubic_quintic(), [0.1])
    assert all(v.verdict == PASS for v in out)


def test_lemma32_random_profiles():
    v = verify_lemma32(2, count=30, seed=3)
    assert v.verdict == PASS
    assert v.measured["max_rel_mass_change"] <= 1e-10


def test_random_profiles_are_seeded():
    g = RadialGrid(2, 10.0, 200)
    a = random_profiles(g, 3, seed=5)
    b = random_profiles(g, 3, seed=5)
    assert all(np.array_equal(x.values, y.values) for x, y in zip(a, b))


def test_verify_curve_with_oracle():
    out = verify_curve(single_power(4), 1, [1.0, 2.0, 3.0, 4.0], RadialGrid(1, 20.0, 4000),
                       oracle=lambda m: -m**3 / 96)
    by_id = {v.claim_id: v for v in out}
    assert by_id["CURVE-oracle"].verdict == PASS
    assert all(v.verdict == PASS for v in out)
    with pytest.raises(ValueError):
        verify_curve(single_power(4), 1, [], RadialGrid(1, 20.0, 400))
