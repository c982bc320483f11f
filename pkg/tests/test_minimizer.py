import numpy as np
import pytest

from massmin.minimizer import (CurveRow, SolverConfig, energy_curve, minimize,
                               sign_monotonicity_check)
from massmin.nonlinearity import cubic_quintic, single_power
from massmin.radial import RadialGrid, RadialProfile

from conftest import sech_soliton


@pytest.fixture(scope="module")
def ground(cubic, grid1):
    return minimize(cubic, 1, 4.0, grid1, SolverConfig())


def test_cubic_ground_state(ground, grid1):
    assert ground.converged and ground.status == "converged"
    assert ground.E == pytest.approx(-2 / 3, abs=1e-4)
    assert ground.mu == pytest.approx(1.0, abs=1e-4)
    exact = sech_soliton(1.0)(grid1.r)
    assert np.abs(ground.profile.values - exact).max() < 1e-3
    assert ground.energy_monotone


def test_mass_constraint_holds(ground):
    assert ground.energy.mass == pytest.approx(4.0, rel=1e-12)


def test_csv_row_fields(ground):
    row = ground.csv_row()
    assert row["converged"] == 1
    assert set(row) == {"m", "E", "mu", "kinetic", "potential", "pohozaev_residual",
                        "nehari_residual", "iterations", "converged"}


@pytest.mark.parametrize("init", ["gaussian", "random-bump"])
def test_initial_guess_independence(cubic, grid1, init):
    res = minimize(cubic, 1, 2.0, grid1, SolverConfig(init=init, restarts=3, seed=7))
    assert res.E == pytest.approx(-8 / 96, abs=1e-4)


def test_seeded_runs_are_reproducible(cubic, grid1):
    cfg = SolverConfig(restarts=3, seed=11, init="random-bump")
    a = minimize(cubic, 1, 3.0, grid1, cfg)
    b = minimize(cubic, 1, 3.0, grid1, cfg)
    assert np.array_equal(a.profile.values, b.profile.values)
    assert [r.E for r in a.restarts] == [r.E for r in b.restarts]


def test_file_initial_guess(cubic, grid1, tmp_path, ground):
    path = tmp_path / "init.csv"
    ground.profile.to_csv(path)
    res = minimize(cubic, 1, 4.0, grid1, SolverConfig(init="file", init_file=str(path)))
    assert res.iterations < 10
    assert res.E == pytest.approx(ground.E, abs=1e-10)


@pytest.mark.parametrize("kw", [dict(dt=0), dict(tol=-1), dict(restarts=0), dict(init="x"),
                                dict(init="file")])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SolverConfig(**kw)


def test_input_validation(cubic, grid1):
    with pytest.raises(ValueError):
        minimize(cubic, 2, 1.0, grid1)
    with pytest.raises(ValueError):
        minimize(cubic, 1, -1.0, grid1)
    with pytest.raises(ValueError):
        minimize(single_power(4), 3, 1.0, RadialGrid(3, 10.0, 200))


def test_small_mass_in_A2_regime_is_not_a_ground_state():
    res = minimize(cubic_quintic(), 3, 5.0, RadialGrid(3, 20.0, 1000), SolverConfig(max_iter=3000))
    assert res.status in ("nonnegative_energy", "not_converged")
    assert not res.converged
    assert not res.certifies_negative(1e-8)


def test_energy_curve_law(cubic, grid1):
    rows = energy_curve(cubic, 1, [1.0, 2.0, 3.0, 4.0], grid1)
    for r in rows:
        assert isinstance(r, CurveRow)
        assert r.E == pytest.approx(-r.m**3 / 96, rel=5e-3)


def test_energy_curve_parallel_matches_serial(cubic):
    g = RadialGrid(1, 20.0, 1000)
    a = energy_curve(cubic, 1, [1.0, 2.0, 3.0], g)
    b = energy_curve(cubic, 1, [1.0, 2.0, 3.0], g, workers=2)
    assert [r.E for r in a] == [r.E for r in b]


def test_energy_curve_warm_start(cubic):
    g = RadialGrid(1, 20.0, 1000)
    rows = energy_curve(cubic, 1, [2.0, 2.5, 3.0], g, SolverConfig(warm_start=True))
    assert all(r.converged for r in rows)


def test_energy_curve_rejects_bad_lists(cubic, grid1):
    with pytest.raises(ValueError):
        energy_curve(cubic, 1, [], grid1)
    with pytest.raises(ValueError):
        energy_curve(cubic, 1, [2.0, 1.0], grid1)


def test_sign_monotonicity(ground, grid1):
    assert sign_monotonicity_check(ground).passed
    bad = RadialProfile.from_function(grid1, lambda r: np.cos(r) * np.exp(-r))
    rep = sign_monotonicity_check(bad)
    assert not rep.constant_sign and not rep.passed
