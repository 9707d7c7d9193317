import math
from decimal import Decimal, getcontext
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from budgetmatch.exact import (
    PHI, at_least_inv_phi, at_most_one_minus_inv_phi, format_num, inv_phi_convergent,
    parse_bound, scaled_at_least, scaled_exceeds, to_num,
)

getcontext().prec = 60
SQRT5 = Decimal(5).sqrt()
INV_PHI = (SQRT5 - 1) / 2


def test_to_num_accepts_exact_forms():
    assert to_num("3/5") == F(3, 5)
    assert to_num("0.57") == F(57, 100)
    assert to_num(7) == F(7)
    assert to_num(F(1, 3)) == F(1, 3)


@pytest.mark.parametrize("bad", [0.5, True, None, "x/y", "1/0"])
def test_to_num_rejects(bad):
    with pytest.raises((TypeError, ValueError)):
        to_num(bad)


def test_format_num():
    assert format_num(F(3, 2)) == "3/2"
    assert format_num(F(4)) == "4"
    assert format_num(math.inf) == "inf"
    assert format_num(PHI) == "phi"


def test_phi_orders_against_rationals():
    assert F(161803, 100000) < PHI < F(161804, 100000)
    assert F(144, 89) < PHI < F(233, 144)
    assert PHI < math.inf
    assert PHI > 1
    assert not PHI <= F(3, 2)
    assert abs(float(PHI) - 1.6180339887) < 1e-9


@given(st.fractions(min_value=-2, max_value=2, max_denominator=10**6))
def test_golden_thresholds_agree_with_high_precision(q):
    d = Decimal(q.numerator) / Decimal(q.denominator)
    assert at_least_inv_phi(q) == (d >= INV_PHI)
    if q <= F(3, 2):
        assert at_most_one_minus_inv_phi(q) == (d <= 1 - INV_PHI)
    assert (q < PHI) == (d < (1 + SQRT5) / 2)


def test_inv_phi_convergents():
    assert inv_phi_convergent(F(1, 10**3)) == F(21, 34)
    assert inv_phi_convergent(F(1, 10**4)) == F(55, 89)
    # error budget of (1/10)^2 / 100
    assert inv_phi_convergent(F(1, 10**4)) + 1 == F(144, 89)


@given(st.integers(min_value=1, max_value=12))
def test_convergent_error_is_within_budget(k):
    e = F(1, 10**k)
    q = inv_phi_convergent(e)
    d = Decimal(q.numerator) / Decimal(q.denominator)
    assert abs(d - INV_PHI) < Decimal(e.numerator) / Decimal(e.denominator)


def test_scaled_comparisons():
    assert scaled_at_least(F(3, 2), F(40), F(60))
    assert not scaled_exceeds(F(60), F(3, 2), F(40))
    assert scaled_exceeds(F(194), F(1), F(193))
    assert scaled_at_least(math.inf, F(1), F(10**9))
    assert not scaled_at_least(math.inf, F(0), F(1))
    assert scaled_at_least(PHI, F(1), F(161803, 100000))


def test_parse_bound():
    assert parse_bound("phi") is PHI
    assert parse_bound("3/2") == F(3, 2)
    assert parse_bound("inf") == math.inf
