from fractions import Fraction as F

import pytest

from budgetmatch.errors import InvalidInput
from budgetmatch.market import (
    Contract, Market, MarketBuilder, assignment, is_matching, prefers, validate_market,
)


def tiny():
    b = MarketBuilder(2, 1)
    a = b.add(0, 0, 3, "1/2")
    c = b.add(1, 0, 2, "3/5")
    b.set_prefs(0, [a])
    b.set_prefs(1, [c])
    return b.build()


def test_example_market_shape(ex1):
    assert ex1.n_doctors == 4 and ex1.n_hospitals == 2
    assert len(ex1.contracts) == 8
    assert ex1.s_bar == F(3, 5)
    assert validate_market(ex1) == []
    assert ex1.label(0) == "x^{1,1}"
    u = {ex1.label(c.id): (c.u, c.s) for c in ex1.contracts}
    assert u["x^{1,1}"] == (111, F(57, 100))
    assert u["x^{4,2}"] == (20, F(45, 100))


def test_validate_reports_each_problem():
    m = Market(1, 1, [Contract(0, 0, 0, 1, "3/2"), Contract(1, 2, 0, -1, "1/2")], [(1, 1)])
    problems = " | ".join(validate_market(m))
    assert "outside [0, 1]" in problems
    assert "unknown doctor 2" in problems
    assert "negative utility" in problems
    assert "listed twice" in problems
    assert "belongs to doctor 2" in problems


def test_proportional_flag_is_checked():
    b = MarketBuilder(1, 1)
    b.add(0, 0, 2, "1/2")
    assert any("u == s" in p for p in validate_market(b.build(proportional=True)))


def test_is_matching():
    m = tiny()
    assert is_matching(m, [0])
    assert not is_matching(m, [0, 1])  # 1/2 + 3/5 > 1
    assert is_matching(m, [])
    with pytest.raises(InvalidInput):
        is_matching(m, [5])


def test_prefers_treats_unlisted_as_unacceptable(ex1):
    assert prefers(ex1, 0, 0, 1)
    assert prefers(ex1, 0, 1, None)
    assert not prefers(ex1, 0, None, 1)
    cut = ex1.with_prefs(0, [1])
    assert not prefers(cut, 0, 0, None)
    assert prefers(cut, 0, None, 0)


def test_assignment(ex1):
    assert assignment(ex1, [3, 4, 6]) == [None, 3, 4, 6]


def test_with_prefs_leaves_original_alone(ex1):
    cut = ex1.with_prefs(3, [])
    assert ex1.prefs[3] == (7, 6)
    assert cut.prefs[3] == ()
    assert cut != ex1


def test_zero_size_density():
    assert Contract(0, 0, 0, 5, 0).density == float("inf")
