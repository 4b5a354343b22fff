import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.optimize
import scipy.special
from hypothesis import given
from hypothesis import strategies as st

from khinchin_lab.exactprob import StepLawParams, first_abs_moment, make_step_law
from khinchin_lab.haagerup import (
    CharFn,
    charfn,
    charfn_power_integral,
    concavity_in_zero_mass,
    first_abs_moment_integral,
    haagerup_function,
    l1_l2_verdict,
    power_charfn_period,
    product_charfn_period,
    solve_critical_exponent,
    two_weight_threshold,
    verify_charfn_power_floor,
)

COIN = make_step_law(StepLawParams(Fraction(0), 1))
HALF = make_step_law(StepLawParams(Fraction(1, 2), 1))


# ---------------------------------------------------------------- charfn

def test_charfn_values():
    assert charfn(COIN, 0.0) == pytest.approx(1.0)
    for t in (0.3, 1.7, 4.0):
        assert charfn(COIN, t) == pytest.approx(math.cos(t), rel=1e-12)
        assert charfn(HALF, t) == pytest.approx(0.5 + 0.5 * math.cos(t), rel=1e-12)
    assert charfn(HALF, math.pi) == pytest.approx(0.0, abs=1e-15)


def test_charfn_from_law_filters_sign():
    cf = CharFn.from_law(make_step_law(StepLawParams(Fraction(1, 2), 3)))
    assert list(cf.frequencies) == [1.0, 2.0, 3.0]
    assert cf.zero_mass == pytest.approx(0.5)
    assert cf.lower_bound == pytest.approx(0.0)


@given(rho_num=st.integers(5, 9), t=st.floats(0.0, 50.0))
def test_charfn_floor_above_half(rho_num, t):
    law = make_step_law(StepLawParams(Fraction(rho_num, 10), 2))
    lb = 2 * rho_num / 10 - 1
    assert charfn(law, t) >= lb - 1e-12


def test_charfn_vectorized():
    ts = np.linspace(0.0, 6.0, 11)
    vals = charfn(COIN, ts)
    assert np.allclose(vals, np.cos(ts), atol=1e-14)


# ---------------------------------------------------------------- periods

def test_product_period():
    assert product_charfn_period(COIN, [1, 1]) == pytest.approx(2 * math.pi)
    assert product_charfn_period(COIN, [Fraction(1, 2), Fraction(1, 3)]) == \
        pytest.approx(12 * math.pi)
    assert product_charfn_period(COIN, [1 / math.sqrt(2), 1.0]) is None


def test_power_period():
    assert power_charfn_period(HALF, 4.0) == pytest.approx(4 * math.pi)
    assert power_charfn_period(make_step_law(StepLawParams(Fraction(0), 2)), 1.0) == \
        pytest.approx(2 * math.pi)


# ---------------------------------------------------------------- integrals

def test_first_abs_moment_integral_single_coin():
    res = first_abs_moment_integral([1], COIN)
    assert res.value == pytest.approx(1.0, abs=1e-8)


def test_first_abs_moment_integral_matches_enumeration():
    res = first_abs_moment_integral([1, 1], HALF)
    assert res.value == pytest.approx(0.75, abs=1e-8)
    # three rational weights against the exact convolution value
    w = [Fraction(1), Fraction(1, 3), Fraction(2, 3)]
    law = make_step_law(StepLawParams(Fraction(1, 2), 2))
    res = first_abs_moment_integral(w, law)
    assert res.value == pytest.approx(209 / 192, abs=1e-8)


def test_first_abs_moment_integral_irrational_weights():
    r = 1 / math.sqrt(2)
    res = first_abs_moment_integral([r, r], COIN, tol=1e-5)
    assert res.value == pytest.approx(r, abs=2e-5)


def test_charfn_power_integral_is_first_moment_at_s1():
    for law in (HALF, make_step_law(StepLawParams(Fraction(3, 4), 2))):
        res = charfn_power_integral(law, 1.0)
        assert res.value == pytest.approx(float(first_abs_moment(law)), abs=1e-8)


# ---------------------------------------------------------------- F function

def test_haagerup_function_analytic_points():
    # closed forms via the Fourier series of |cos|: F(1) = 2/pi, F(4) = 3/4
    assert haagerup_function(1.0).value == pytest.approx(2 / math.pi, abs=1e-8)
    assert haagerup_function(2.0).value == pytest.approx(1 / math.sqrt(2), abs=1e-8)
    assert haagerup_function(4.0).value == pytest.approx(0.75, abs=1e-8)


def test_haagerup_function_frozen_values():
    assert haagerup_function(3.0).value == pytest.approx(0.735105193879, abs=1e-8)
    assert haagerup_function(5.0).value == pytest.approx(0.759213379645, abs=1e-8)
    assert haagerup_function(20.0).value == pytest.approx(0.7879771714, abs=1e-7)


def test_haagerup_function_monotone_below_gaussian():
    grid = [1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 13.0, 20.0]
    vals = [haagerup_function(s).value for s in grid]
    assert all(a <= b + 1e-9 for a, b in zip(vals, vals[1:]))
    assert all(v < math.sqrt(2 / math.pi) for v in vals)


# ---------------------------------------------------------------- floor chain

def test_power_floor_half_coin():
    rep = verify_charfn_power_floor(HALF, [1.0, 2.0, 4.0, 8.0])
    assert rep.passed
    rows = rep.witness["rows"]
    assert len(rows) == 4
    for row in rows:
        assert all(v >= -1e-6 for k, v in row.items() if k != "s")


def test_power_floor_deep_law():
    law = make_step_law(StepLawParams(Fraction(3, 4), 3))
    rep = verify_charfn_power_floor(law, [1.0, 3.0])
    assert rep.passed
    assert rep.witness["first_abs_moment"] == pytest.approx(
        float(first_abs_moment(law)), rel=1e-9)


def test_power_floor_needs_half_mass():
    with pytest.raises(ValueError):
        verify_charfn_power_floor(COIN, [1.0])


def test_power_mean_split_unequal_weights():
    # sum a_j^2 = 1, so E|S| >= sum_j a_j^2 F_law(1/a_j^2) by weighted AM-GM
    a = [Fraction(3, 5), Fraction(4, 5)]
    lhs = first_abs_moment_integral(a, HALF).value
    rhs = sum(float(w) ** 2 * charfn_power_integral(HALF, float(1 / w**2)).value
              for w in a)
    assert lhs >= rhs - 1e-6


# ---------------------------------------------------------------- l1 vs l2

def test_l1_l2_equality_single_weight():
    law = make_step_law(StepLawParams(Fraction(1, 2), 3))
    rep = l1_l2_verdict(law, [Fraction(1)])
    assert rep.passed
    assert rep.witness["squared_gap"] == 0


def test_l1_l2_two_weights_exact_gap():
    rep = l1_l2_verdict(HALF, [Fraction(1), Fraction(1)])
    assert rep.passed
    gap = rep.witness["first_abs"] - rep.witness["c1_times_l2"]
    assert gap == pytest.approx(0.75 - 1 / math.sqrt(2), rel=1e-12)
    assert rep.witness["squared_gap"] == Fraction(1, 32)
    assert rep.params["exploratory"] is False


def test_l1_l2_exploratory_below_half():
    rep = l1_l2_verdict(make_step_law(StepLawParams(Fraction(1, 4), 1)),
                        [Fraction(1), Fraction(2)])
    assert rep.params["exploratory"] is True


def test_l1_l2_degenerate_rejected():
    with pytest.raises(ValueError):
        l1_l2_verdict(make_step_law(StepLawParams(Fraction(1), 1)), [Fraction(1)])


# ---------------------------------------------------------------- concavity

def test_concavity_small_grids():
    rep = concavity_in_zero_mass(1, 2.0, [Fraction(1, 2), Fraction(3, 5), Fraction(7, 10)])
    assert rep.passed
    rep = concavity_in_zero_mass(3, 4.0,
                                 [Fraction(k, 10) for k in range(1, 10)])
    assert rep.passed


def test_concavity_grid_validation():
    with pytest.raises(ValueError):
        concavity_in_zero_mass(1, 2.0, [Fraction(1, 2), Fraction(3, 5)])
    with pytest.raises(ValueError):
        concavity_in_zero_mass(1, 2.0, [Fraction(3, 5), Fraction(1, 2), Fraction(7, 10)])


# ---------------------------------------------------------------- exponent

def test_critical_exponent_bracket_and_residual():
    res = solve_critical_exponent()
    assert 1.8469 < res.value < 1.8476
    assert res.residual <= 1e-12
    assert res.sign_changes == 1
    # independent root via scipy
    root = scipy.optimize.brentq(
        lambda p: scipy.special.gamma((p + 1) / 2) - math.sqrt(math.pi) / 2,
        1.5, 1.95, xtol=1e-13)
    assert res.value == pytest.approx(root, abs=1e-10)
    assert res.value == pytest.approx(1.84741633608, abs=1e-9)


# ---------------------------------------------------------------- two weights

def test_two_weight_threshold_l1():
    rep = two_weight_threshold(1)
    assert rep.passed
    assert abs(float(rep.witness["threshold"]) - (math.sqrt(2) - 1)) < 1e-12
    assert "direction" in rep.witness["direction_note"]


def test_two_weight_threshold_l2_closed_form():
    rep = two_weight_threshold(2)
    assert rep.passed
    assert float(rep.witness["closed_form"]) == pytest.approx(
        (6 * math.sqrt(2) - 7) / 5, abs=1e-12)
