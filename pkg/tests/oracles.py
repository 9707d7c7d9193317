"""Slow, independent reference computations used only by the tests.

Nothing here calls the verifier or the knapsack search in the package.
"""

import itertools
import math
from fractions import Fraction


def subsets(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def best_feasible(contracts, budget=Fraction(1)):
    """Max utility over subsets with size <= budget and distinct doctors."""
    best = Fraction(0)
    for combo in subsets(list(contracts)):
        if len({c.doctor for c in combo}) < len(combo):
            continue
        if sum((c.s for c in combo), Fraction(0)) > budget:
            continue
        best = max(best, sum((c.u for c in combo), Fraction(0)))
    return best


def _rank(m, d, cid):
    plist = list(m.prefs[d])
    if cid is None:
        return len(plist)
    return plist.index(cid) if cid in plist else math.inf


def alpha_star(m, matching):
    """Smallest alpha with no blocking coalition, by plain enumeration."""
    matching = set(matching)
    current = {m.contracts[c].doctor: c for c in matching}
    worst = Fraction(1)
    for h in range(m.n_hospitals):
        mine = [c for c in m.contracts if c.hospital == h]
        have = sum((c.u for c in mine if c.id in matching), Fraction(0))
        usable = [c for c in mine if c.id in matching
                  or _rank(m, c.doctor, c.id) < _rank(m, c.doctor, current.get(c.doctor))]
        best = best_feasible(usable)
        if best > have:
            worst = max(worst, math.inf if have == 0 else best / have)
    return worst


def all_matchings(m):
    """Every set of acceptable contracts, one per doctor, within budgets."""
    options = [[None] + list(m.prefs[d]) for d in range(m.n_doctors)]
    for pick in itertools.product(*options):
        chosen = [c for c in pick if c is not None]
        load = [Fraction(0)] * m.n_hospitals
        for c in chosen:
            load[m.contracts[c].hospital] += m.contracts[c].s
        if all(x <= 1 for x in load):
            yield frozenset(chosen)
