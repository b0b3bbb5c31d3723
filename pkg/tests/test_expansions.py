import math

import numpy as np
import pytest

from burrecords import DomainError, Params, UnsupportedMemberError, quantile, tail_quantile
from burrecords.expansions import (
    Frame,
    RemainderKind,
    exact_quantity,
    expand_quantile,
    fit_remainder_order,
    remainder,
    xi_constants,
)

GRID = np.logspace(-3, -7, 9)
DEEP = np.logspace(-6, -14, 9)


# --- worked examples -------------------------------------------------------

def test_burr_i_expansion_is_exact():
    res = expand_quantile("I", Params(), 0.01)
    assert res.frame is Frame.GAP
    assert res.value == 0.01 and res.correction == 0.0
    assert remainder("I", Params(), 0.05) == 0.0
    fit = fit_remainder_order("I", Params(), GRID)
    assert fit.exact and fit.exponent is None


def test_burr_ii_example():
    res = expand_quantile("II", Params(r=1), 1e-4)
    assert res.value == pytest.approx(math.log(1e4) - 1e-4, abs=1e-12)
    assert res.value == pytest.approx(9.2102403, abs=1e-7)
    assert abs(res.value - quantile("II", Params(r=1), 1 - 1e-4)) <= 1e-7


def test_burr_xii_unit_shapes_are_exact():
    P = Params(r=1, c=1)
    res = expand_quantile("XII", P, 1e-3)
    assert res.value == pytest.approx(999.0, abs=1e-9)
    assert abs(remainder("XII", P, 1e-3)) < 1e-40


def test_burr_ii_remainder_bound():
    assert abs(remainder("II", Params(r=2), 1e-3)) <= 10 * 1e-6


def test_value_is_leading_plus_correction():
    for member, kw in [("III", dict(k=2, r=3)), ("V", dict(k=2, r=1)), ("XI", dict(r=2))]:
        res = expand_quantile(member, Params(**kw), 1e-4)
        assert res.value == res.leading + res.correction


@pytest.mark.parametrize("member", ["I", "IV", "V", "XI"])
def test_gap_frame_members(member):
    assert expand_quantile(member, Params(), 1e-3).frame is Frame.GAP


@pytest.mark.parametrize("member", ["II", "III", "VI", "VII", "VIII", "IX", "X", "XII", "Xa"])
def test_direct_frame_members(member):
    assert expand_quantile(member, Params(k=2, c=2, r=2), 1e-3).frame is Frame.DIRECT


# --- exact quantities agree with the float quantile ------------------------

@pytest.mark.parametrize(
    "member, kw",
    [("II", dict(r=2)), ("III", dict(k=2, r=3)), ("VI", dict(k=2, r=2)), ("VII", dict(r=3)),
     ("VIII", dict(r=0.5)), ("IX", dict(k=3, r=2)), ("X", dict(r=2)), ("XII", dict(c=2, r=3)),
     ("Xa", dict(r=0.5))],
)
def test_exact_quantity_matches_quantile(member, kw):
    P = Params(**kw)
    for u in (1e-2, 1e-5):
        assert exact_quantity(member, P, u) == pytest.approx(quantile(member, P, 1 - u), rel=1e-9)


@pytest.mark.parametrize("member, kw", [("I", {}), ("IV", dict(c=2, r=3)), ("V", dict(k=2, r=2)),
                                        ("XI", dict(r=2))])
def test_exact_gap_matches_tail_quantile(member, kw):
    P = Params(**kw)
    for u in (1e-2, 1e-5):
        log_gap = tail_quantile(member, P, math.log(u)).log_gap
        assert exact_quantity(member, P, u) == pytest.approx(math.exp(log_gap), rel=1e-8)


# --- remainder orders ------------------------------------------------------

@pytest.mark.parametrize(
    "member, kw, expected",
    [
        ("II", dict(r=2), 2.0),
        ("III", dict(k=2, r=1), 2.0),
        ("IV", dict(c=3, r=2), 2.0),
        ("VII", dict(r=2), 2.0),
        ("VIII", dict(r=2), 2.0),
        ("IX", dict(k=1, r=0.4), 2.0),
        ("IX", dict(k=1, r=2), 0.5),
        ("XII", dict(c=2, r=2), 1.5),
        ("X", dict(r=2), 2.0),
        ("Xa", dict(r=2), 2.0),
    ],
)
def test_fitted_order_matches_stated(member, kw, expected):
    fit = fit_remainder_order(member, Params(**kw), GRID)
    assert not fit.exact
    assert fit.stated.exponent == pytest.approx(expected)
    assert abs(fit.exponent - expected) <= 0.15


def test_xii_fit_example_is_exact_at_unit_c():
    # with c = 1 the two-term bracket reproduces the quantile identically,
    # so there is no rate to fit
    fit = fit_remainder_order("XII", Params(r=2, c=1), GRID)
    assert fit.exact


def test_burr_iv_order_is_min_of_two_and_c():
    fit = fit_remainder_order("IV", Params(c=0.5, r=2), GRID)
    assert fit.stated.exponent == 0.5
    assert abs(fit.exponent - 0.5) <= 0.05
    # the published order u^2 does not hold for c < 2
    assert fit_remainder_order("IV", Params(c=0.5, r=2), GRID, form="printed").stated.exponent == 2.0


def test_logarithmic_orders_on_deep_grid():
    assert abs(fit_remainder_order("V", Params(k=1, r=1), DEEP).exponent - 5.0) <= 0.15
    fit_vi = fit_remainder_order("VI", Params(k=1, r=1), DEEP)
    assert fit_vi.stated.kind is RemainderKind.POWER_OF_LOG_RECIPROCAL
    assert abs(fit_vi.exponent - 4.0) <= 0.15


def test_burr_v_scaled_residual_bounded():
    P = Params(k=1, r=1)
    grid = np.logspace(-8, -3, 11)
    scaled = [abs(remainder("V", P, u)) * math.log(1 / u) ** 5 for u in grid]
    assert max(scaled) / min(scaled) <= 10
    # settles at the next arctan coefficient 1/5
    assert scaled[0] == pytest.approx(0.2, rel=0.01)


def test_printed_burr_v_coefficient_leaves_cubic_residual():
    P = Params(k=1, r=1)
    grid = np.logspace(-3, -14, 12)
    scaled = [abs(remainder("V", P, u, form="printed")) * math.log(1 / u) ** 3 for u in grid]
    # (1/2 - 1/3) L^-3 survives: the L^3-scaled residual tends to 1/6
    assert scaled[-1] == pytest.approx(1 / 6, rel=0.02)
    fit = fit_remainder_order("V", P, DEEP, form="printed")
    assert abs(fit.exponent - 3.0) <= 0.15


def test_printed_forms_that_disagree_with_exact_inverse():
    # Burr VIII: the printed sign of the u term makes the remainder O(u)
    assert abs(fit_remainder_order("VIII", Params(r=2), GRID, form="printed").exponent - 1.0) <= 0.15
    # Burr X / Xa: dropping log r leaves an O(1/log(1/u)) relative error
    for member in ("X", "Xa"):
        fit = fit_remainder_order(member, Params(r=2), GRID, form="printed")
        assert abs(fit.exponent) <= 0.15
    # at r = 1 there is no log r term and both forms agree
    for member in ("X", "Xa"):
        a = expand_quantile(member, Params(r=1), 1e-5)
        b = expand_quantile(member, Params(r=1), 1e-5, form="printed")
        assert a.value == pytest.approx(b.value, rel=1e-15)


def test_remainder_shrinks_by_decade():
    cases = [("II", dict(r=2)), ("III", dict(k=2, r=1)), ("IV", dict(c=2, r=2)),
             ("VII", dict(r=2)), ("VIII", dict(r=2)), ("IX", dict(k=1, r=2)),
             ("X", dict(r=2)), ("XI", dict(r=2)), ("XII", dict(c=2, r=2)), ("Xa", dict(r=2)),
             ("V", dict(k=1, r=1)), ("VI", dict(k=1, r=1))]
    for member, kw in cases:
        P = Params(**kw)
        rems = [abs(remainder(member, P, u)) for u in np.logspace(-2, -8, 7)]
        assert all(b < a for a, b in zip(rems, rems[1:])), member


def test_gap_frame_is_positive():
    for member, kw in [("IV", dict(c=2, r=2)), ("V", dict(k=1, r=1)), ("XI", dict(r=2))]:
        for u in GRID:
            res = expand_quantile(member, Params(**kw), u)
            assert res.value > 0 and exact_quantity(member, Params(**kw), u) > 0


# --- Burr XI constants -----------------------------------------------------

@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 5.0])
def test_xi_alpha_fit_matches_binomial_constant(r):
    consts = xi_constants(r)
    assert consts.alpha_fit == pytest.approx(r * (2 * math.pi) ** 2 / 6, rel=1e-10)
    assert consts.beta_fit == pytest.approx(-r * (2 * math.pi) ** 4 / 120, rel=1e-6)
    assert consts.alpha_printed == pytest.approx((2 * math.pi) ** 2 / (6 * r))


def test_xi_fitted_order_reported():
    # relative remainder is O(u) from the h^2 term, O(u^{4/3}) when r = 1
    assert abs(fit_remainder_order("XI", Params(r=2), GRID).exponent - 1.0) <= 0.1
    assert abs(fit_remainder_order("XI", Params(r=1), GRID).exponent - 4 / 3) <= 0.1
    assert fit_remainder_order("XI", Params(r=2), GRID).stated.exponent == pytest.approx(4 / 9)


# --- errors ----------------------------------------------------------------

@pytest.mark.parametrize("u", [0.0, 0.1, 0.5, -1e-3, math.nan])
def test_u_outside_validity(u):
    with pytest.raises(DomainError):
        expand_quantile("II", Params(), u)


def test_burr_vi_requires_u_below_inverse_e():
    with pytest.raises(DomainError):
        expand_quantile("VI", Params(), 0.4, u0=0.9)
    with pytest.raises(DomainError):
        expand_quantile("VI", Params(k=1, r=1), 1e-3, form="printed")


def test_bonus_members_have_no_expansion():
    with pytest.raises(UnsupportedMemberError):
        expand_quantile("Dagum", Params(), 1e-3)


def test_fit_needs_five_points():
    with pytest.raises(DomainError):
        fit_remainder_order("II", Params(), [1e-3, 1e-4])


def test_unknown_form_rejected():
    with pytest.raises(DomainError):
        expand_quantile("II", Params(), 1e-3, form="third-order")
