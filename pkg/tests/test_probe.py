from fractions import Fraction as F

import pytest

from budgetmatch.choice import Policy
from budgetmatch.errors import SearchLimitExceeded
from budgetmatch.instances import GeneratorParams, find_label, prop1_market, random_market
from budgetmatch.market import MarketBuilder, prefers
from budgetmatch.probe import describe, enumerate_reports, find_manipulation, outcome


def test_report_counts():
    assert list(enumerate_reports([])) == [()]
    assert len(list(enumerate_reports([4]))) == 2
    assert len(list(enumerate_reports([1, 2]))) == 5
    assert len(list(enumerate_reports([1, 2, 3]))) == 16
    assert list(enumerate_reports([2, 1]))[:4] == [(), (1,), (2,), (1, 2)]


def test_report_limit():
    with pytest.raises(SearchLimitExceeded):
        list(enumerate_reports(range(7)))
    b = MarketBuilder(1, 7)
    ids = [b.add(0, h, 1, "1/2") for h in range(7)]
    b.set_prefs(0, ids)
    with pytest.raises(SearchLimitExceeded):
        find_manipulation(b.build(), Policy.DENSITY)


def test_density_is_manipulable_on_searched_instance():
    m = prop1_market(F(3, 5))
    man = find_manipulation(m, Policy.DENSITY)
    assert man is not None
    assert man.doctor == 2
    assert man.report == (find_label_like(m, 2, 0),)
    assert man.truthful is None
    assert prefers(m, man.doctor, man.manipulated, man.truthful)
    assert "misreport: x^{3,1}" in describe(m, man)


def find_label_like(m, doctor, hospital):
    return next(c.id for c in m.contracts if c.doctor == doctor and c.hospital == hospital)


def test_truthful_report_reproduces_outcome():
    m = prop1_market(F(3, 5))
    for d in range(m.n_doctors):
        assert outcome(m.with_prefs(d, m.prefs[d]), Policy.DENSITY) == outcome(m, Policy.DENSITY)


@pytest.mark.parametrize("policy", [Policy.MATROID, Policy.SMALLEST_FIRST])
def test_strategyproof_policies_on_random_markets(policy):
    for seed in range(40):
        m = random_market(GeneratorParams(seed=seed, proportional=policy is Policy.SMALLEST_FIRST))
        assert find_manipulation(m, policy) is None, seed


def test_found_manipulations_respect_true_preferences():
    hits = 0
    for seed in range(300):
        m = random_market(GeneratorParams(
            doctors=(2, 4), hospitals=(1, 2), contracts_per_doctor=(1, 2), max_contracts=8,
            s_bar=F(4, 5), size_denominator=10, utility_max=10, seed=seed))
        man = find_manipulation(m, Policy.DENSITY)
        if man is None:
            continue
        hits += 1
        assert man.manipulated is None or man.manipulated in m.prefs[man.doctor]
        assert prefers(m, man.doctor, man.manipulated, man.truthful)
        assert outcome(m, Policy.DENSITY)[man.doctor] == man.truthful
    assert hits > 0
