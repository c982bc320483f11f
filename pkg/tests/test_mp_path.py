import math

import numpy as np
import pytest

from massmin.mp_path import (PathError, PathSample, Path2DParams, check_path, check_path_result,
                             dilation_path, plateau_bound_ok, plateau_path_1d, segment_pattern,
                             two_param_path_2d, write_path_csv)
from massmin.nonlinearity import single_power
from massmin.radial import RadialGrid, RadialProfile, grad_norm_sq
from massmin.shooting import least_action, reshoot, shoot_1d


@pytest.fixture(scope="module")
def gaussian3():
    return RadialProfile.from_function(RadialGrid(3, 12.0, 2000), lambda r: np.exp(-r**2))


def test_dilation_formula_values(gaussian3):
    # J_formula(t) = (t^(N-2) - (N-2)/N t^N) K/2: K/3 at t=1, -K/3 at t=2 for N=3
    path = dilation_path(single_power(3), gaussian3, 1.0, samples=8, strict=False)
    K = grad_norm_sq(gaussian3)
    by_t = {s.t: s.action_formula for s in path.samples}
    assert by_t[1.0] == pytest.approx(K / 3, rel=1e-12)
    for t, Jf in by_t.items():
        assert Jf == pytest.approx(0.5 * (t - t**3 / 3) * K, rel=1e-12, abs=1e-14)
    masses = [s.mass for s in path.samples]
    assert np.all(np.diff(masses) > 0)


def test_dilation_rejects_non_solution(gaussian3):
    with pytest.raises(PathError):
        dilation_path(single_power(3), gaussian3, 1.0, samples=8)


def test_dilation_needs_N3():
    g = RadialProfile.from_function(RadialGrid(2, 10.0, 500), lambda r: np.exp(-r**2))
    with pytest.raises(ValueError):
        dilation_path(single_power(3), g, 1.0)


@pytest.fixture(scope="module")
def dilation3():
    la = least_action(single_power(3), 3, 1.0)
    assert la.found
    return dilation_path(single_power(3), reshoot(la.witness, 1.25e-4), 1.0, samples=32)


def test_dilation_path_properties(dilation3):
    assert dilation3.max_formula_dev <= 1e-6
    rep = check_path_result(dilation3)
    assert rep.passed, rep.reasons
    assert rep.argmax_t == 1.0


def test_check_path_flags_truncation(dilation3):
    rep = check_path(dilation3.samples[:-3], dilation3.J_w, 0.1, 2 * dilation3.mass_w, dilation3.T)
    assert not rep.item_i
    assert any(r.startswith("(i)") for r in rep.reasons)


def test_check_path_flags_mass_target(dilation3):
    m_T = dilation3.samples[-1].mass
    rep = check_path(dilation3.samples, dilation3.J_w, 0.1, 2 * m_T, dilation3.T)
    assert rep.item_i and not rep.item_iii
    assert any("(iii)" in r for r in rep.reasons)


def test_check_path_separation_failure():
    s = [PathSample(0.0, 0.0, 0.0, 2.0), PathSample(0.5, 1.0, 1.0, 1.0),
         PathSample(1.0, 2.0, 1.0, 0.0), PathSample(2.0, 3.0, -2.0, 1.0)]
    rep = check_path(s, 1.0, 0.5, 2.5, 2.0)
    assert rep.item_i and rep.item_iii and not rep.item_ii
    assert check_path([], 1.0, 0.5, 2.5, 2.0).reasons == ["empty sample list"]


def test_plateau_path_1d():
    w = shoot_1d(single_power(4), 1.0, -1)
    path = plateau_path_1d(single_power(4), w, samples=32)
    assert path.kind == "plateau"
    assert check_path_result(path).passed
    assert plateau_bound_ok(path)
    assert path.params["eps"] > 0


def test_two_param_path_2d(tmp_path):
    la = least_action(single_power(3), 2, 1.0)
    path = two_param_path_2d(single_power(3), reshoot(la.witness, 2.5e-4), 1.0, samples=8)
    assert check_path_result(path).passed
    pat = segment_pattern(path)
    assert [pat[k] for k in (1, 2, 3)] == ["increasing"] * 3
    assert pat[4] == pat[5] == "constant"
    assert pat[6] == pat[7] == "decreasing"
    out = tmp_path / "path.csv"
    write_path_csv(path, out)
    assert out.read_text().splitlines()[0] == "t,mass,action,dist,action_formula,segment"


def test_path2d_params_validation():
    with pytest.raises(ValueError):
        Path2DParams(1.1, 1.5, 0.01, 0.1, 0.5)
    with pytest.raises(ValueError):
        Path2DParams(0.9, 1.1, 0.5, 0.1, 0.5)
    with pytest.raises(ValueError):
        Path2DParams(0.9, 1.1, 0.05, 0.6, 0.5)
    assert math.isclose(Path2DParams(0.9, 1.1, 0.05, 0.1, 0.5).theta_star, 0.05)
