import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from massmin.nonlinearity import (InadmissibleModel, NonlinearityError, ShiftedNonlinearity,
                                  check_hypotheses, classify_small_mass, cubic_quintic, custom,
                                  find_zeta, mass_critical_exponent, model_from_dict, parse_model,
                                  power_difference, power_sum, single_power, sobolev_exponent)


def test_single_power_values():
    m = single_power(4)
    assert m.f(2.0) == pytest.approx(8.0)
    assert m.F(-2.0) == pytest.approx(4.0)
    assert m.f(-2.0) == pytest.approx(-8.0)


def test_cubic_quintic_closed_form():
    m = cubic_quintic()
    t = np.linspace(-2, 2, 9)
    assert np.allclose(m.f(t), t**3 - t**5)
    assert np.allclose(m.F(t), t**4 / 4 - t**6 / 6)


@pytest.mark.parametrize("bad", [
    lambda: single_power(2.0),
    lambda: power_sum(3.0, 4.0, 1.0),
    lambda: power_difference(4.0, 3.0),
    lambda: single_power(3.0, sign=0.5),
])
def test_invalid_parameters_rejected(bad):
    with pytest.raises(InadmissibleModel):
        bad()


def test_exponents():
    assert mass_critical_exponent(1) == 6.0
    assert mass_critical_exponent(3) == pytest.approx(10 / 3)
    assert math.isinf(sobolev_exponent(2))
    assert sobolev_exponent(3) == 6.0


def test_hypotheses_builtin():
    assert check_hypotheses(single_power(4), 1).all_pass
    assert check_hypotheses(single_power(3), 3).all_pass
    rep = check_hypotheses(single_power(4), 3)
    assert rep.f2 == "fail" and rep.reasons
    assert check_hypotheses(single_power(4, sign=-1), 1).f3 == "fail"
    # the quintic term has a negative sign, so the cubic-quintic model is admissible anywhere
    for N in (1, 2, 3):
        assert check_hypotheses(cubic_quintic(), N).all_pass


def test_small_mass_classification():
    cq = cubic_quintic()
    assert classify_small_mass(cq, 1) == "A1"
    assert classify_small_mass(cq, 2) == "A2"
    assert classify_small_mass(cq, 3) == "A2"
    assert classify_small_mass(single_power(3), 3) == "A1"
    assert classify_small_mass(power_sum(3.5, 2.5, -1.0), 1) == "A2"


def test_parse_model_round_trip():
    for text in ("single-power:p=4", "power-sum:p=3,q=2.5,A=2", "power-difference:p=3,q=5",
                 "cubic-quintic"):
        m = parse_model(text)
        assert m.describe() == text
        assert model_from_dict(m.to_dict()) == m


def test_parse_model_rejects_unknown():
    with pytest.raises(InadmissibleModel):
        parse_model("single-power:p=4,r=1")
    with pytest.raises(InadmissibleModel):
        parse_model("wavelet:p=4")
    with pytest.raises(InadmissibleModel):
        parse_model("single-power:p")


def test_custom_model_primitive_by_quadrature():
    m = custom(lambda t: t**3, exponent_zero=4, exponent_inf=4)
    t = np.linspace(-3, 3, 13)
    assert np.allclose(m.F(t), t**4 / 4, rtol=1e-12, atol=1e-14)
    rep = check_hypotheses(m, 1)
    assert rep.f1 == "sampled" and rep.all_pass


def test_custom_model_error_carries_argument():
    def bad(t):
        if np.any(np.abs(t) > 1):
            raise ArithmeticError("boom")
        return t**3
    m = custom(bad, 4, 4)
    with pytest.raises(NonlinearityError) as exc:
        m.f(np.array([0.5, 2.0]))
    assert "boom" in str(exc.value)


def test_zeta_single_power():
    # G(t) = -t^2/2 + t^4/4 vanishes at t^2 = 2
    sh = ShiftedNonlinearity(single_power(4), 1.0)
    for s in (1, -1):
        z = find_zeta(sh, s)
        assert z.zeta == pytest.approx(s * math.sqrt(2), abs=1e-10)
        assert z.sign_condition


def test_zeta_cubic_quintic_window():
    # s = t^2 solves s^2/6 - s/4 + mu/2 = 0; real roots iff mu <= 3/16
    for mu in (0.05, 0.1, 0.18):
        z = find_zeta(ShiftedNonlinearity(cubic_quintic(), mu), 1)
        s = (0.25 - math.sqrt(0.0625 - mu / 3)) * 3
        assert z.zeta == pytest.approx(math.sqrt(s), abs=1e-9)
    assert find_zeta(ShiftedNonlinearity(cubic_quintic(), 0.2), 1) is None


@given(st.floats(2.1, 8.0), st.floats(0.05, 5.0))
def test_zeta_is_root_of_G(p, mu):
    sh = ShiftedNonlinearity(single_power(p), mu)
    z = find_zeta(sh, 1)
    assert z is not None
    exact = (p * mu / 2) ** (1 / (p - 2))
    assert z.zeta == pytest.approx(exact, rel=1e-9)


@given(st.floats(2.1, 7.0), st.floats(0.01, 3.0))
def test_primitive_matches_derivative(p, t):
    m = single_power(p)
    d = 1e-6 * max(t, 1.0)
    fd = (m.F(t + d) - m.F(t - d)) / (2 * d)
    assert fd == pytest.approx(float(m.f(t)), rel=1e-6, abs=1e-9)


@given(st.floats(2.2, 5.0), st.floats(-4.0, 4.0))
def test_builtin_models_are_odd(p, t):
    m = power_sum(p + 0.5, p, 1.3)
    assert float(m.f(-t)) == pytest.approx(-float(m.f(t)))
    assert float(m.F(-t)) == pytest.approx(float(m.F(t)))
