"""Sequential choice functions for budget-constrained hospitals.

Each hospital runs a stateful acceptor: offers arrive one at a time and the
acceptor returns the set it currently holds.  Four policies are provided:

* ``DENSITY``: keep everything, evict the lowest utility-per-size contract
  while over budget.
* ``MATROID``: keep a maximum-utility independent set of a laminar matroid
  whose independent sets always fit the budget.
* ``PROP_REMOVABLE``: removable-knapsack rule for proportional markets built
  on small/medium/large size classes around the golden ratio.
* ``SMALLEST_FIRST``: ascending-size greedy over everything offered so far.

All ties are broken toward the smallest contract id.
"""

from __future__ import annotations

import bisect
import enum
import itertools
import math
import random
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .errors import DuplicateOffer, ParameterError
from .exact import at_least_inv_phi, at_most_one_minus_inv_phi
from .market import Contract, Market


class Policy(enum.Enum):
    DENSITY = "density"
    MATROID = "matroid"
    PROP_REMOVABLE = "prop-removable"
    SMALLEST_FIRST = "smallest-first"


class SizeClass(enum.Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


def classify_golden(s: Fraction) -> SizeClass:
    """Small: s <= 1 - 1/phi, large: s >= 1/phi, medium otherwise."""
    if at_least_inv_phi(s):
        return SizeClass.LARGE
    if at_most_one_minus_inv_phi(s):
        return SizeClass.SMALL
    return SizeClass.MEDIUM


def _ceil_certified(value_at: Callable[[int], tuple[Fraction, Fraction]]) -> int:
    for digits in (40, 80, 160, 320):
        lo, hi = value_at(digits)
        if math.ceil(lo) == math.ceil(hi):
            return math.ceil(lo)
        if hi - lo < Fraction(1, 10**30):
            raise ArithmeticError(
                f"cannot certify ceiling: value within 1e-30 of integer {math.ceil(lo)}"
            )
    raise ArithmeticError("ceiling did not separate at 320 digits")


def matroid_gamma(n_doctors: int, s_bar: Fraction) -> int:
    """ceil((1 + ln(n_doctors - 1)) / (1 - s_bar)), certified exactly.

    ``Decimal.ln`` is correctly rounded, so widening the result by one unit in
    the last place gives a rigorous enclosure of the logarithm.
    """
    s_bar = Fraction(s_bar)
    if s_bar >= 1:
        raise ParameterError(f"s_bar must be < 1 for the matroid bound, got {s_bar}")
    if n_doctors < 1:
        raise ParameterError("need at least one doctor")
    if n_doctors == 1:
        return 1
    gap = 1 - s_bar
    if n_doctors == 2:
        return math.ceil(1 / gap)

    def enclose(digits: int) -> tuple[Fraction, Fraction]:
        with localcontext() as ctx:
            ctx.prec = digits
            ln = Decimal(n_doctors - 1).ln()
            ulp = Decimal(1).scaleb(ln.adjusted() - digits + 1)
            lo, hi = Fraction(ln) - Fraction(ulp), Fraction(ln) + Fraction(ulp)
        return (1 + lo) / gap, (1 + hi) / gap

    return _ceil_certified(enclose)


def matroid_independent(sizes: Iterable[Fraction], gamma: int, n_doctors: int) -> bool:
    """For t = 1..n_doctors, at most t members may exceed 1/(t*gamma)."""
    ordered = sorted(sizes, reverse=True)
    # the (t+1)-th largest p/q must be <= 1/(t gamma), i.e. p*t*gamma <= q
    for t in range(1, min(n_doctors, len(ordered) - 1) + 1):
        s = ordered[t]
        if s.numerator * t * gamma > s.denominator:
            return False
    return True


class SequentialChoice:
    """Per-hospital acceptor consuming an offer stream.

    ``offer`` appends a contract to the history and returns the ids now held.
    Subclasses implement ``_choose``, which receives the previously held
    contracts (a dict id -> Contract) and the new contract.
    """

    policy: Policy

    def __init__(self, hospital: int):
        self.hospital = hospital
        self.history: list[Contract] = []
        self._held: dict[int, Contract] = {}

    @property
    def held(self) -> frozenset:
        return frozenset(self._held)

    def held_contracts(self) -> list[Contract]:
        return [self._held[k] for k in sorted(self._held)]

    def offer(self, x: Contract) -> frozenset:
        if any(y.id == x.id for y in self.history):
            raise DuplicateOffer(f"contract {x.id} already offered to hospital {self.hospital}")
        self.history.append(x)
        self._held = self._choose(dict(self._held), x)
        return self.held

    def _choose(self, held: dict, x: Contract) -> dict:
        raise NotImplementedError


def _size(held: dict) -> Fraction:
    return sum((c.s for c in held.values()), Fraction(0))


class DensityChoice(SequentialChoice):
    policy = Policy.DENSITY

    @staticmethod
    def _evict_key(c: Contract):
        # lowest density first, then smallest id; zero sizes sort last
        if c.s == 0:
            return (1, 0, c.id)
        return (0, c.u / c.s, c.id)

    def _choose(self, held, x):
        held[x.id] = x
        while _size(held) > 1:
            victim = min(held.values(), key=self._evict_key)
            del held[victim.id]
        return held


class MatroidChoice(SequentialChoice):
    policy = Policy.MATROID

    def __init__(self, hospital: int, gamma: int, n_doctors: int):
        super().__init__(hospital)
        if gamma < 1:
            raise ParameterError("gamma must be >= 1")
        self.gamma = gamma
        self.n_doctors = n_doctors

    def independent(self, contracts: Iterable[Contract]) -> bool:
        return matroid_independent((c.s for c in contracts), self.gamma, self.n_doctors)

    def _choose(self, held, x):
        held[x.id] = x
        if self.independent(held.values()):
            return held
        removable = [
            y for y in held.values()
            if self.independent(c for c in held.values() if c.id != y.id)
        ]
        victim = min(removable, key=lambda c: (c.u, c.id))
        del held[victim.id]
        return held


class PropRemovableChoice(SequentialChoice):
    policy = Policy.PROP_REMOVABLE

    def _choose(self, held, x):
        if at_least_inv_phi(_size(held)):
            return held
        if classify_golden(x.s) is SizeClass.LARGE:
            return {x.id: x}
        held[x.id] = x
        medium = [c for c in held.values() if classify_golden(c.s) is SizeClass.MEDIUM]
        if sum((c.s for c in medium), Fraction(0)) > 1:
            victim = max(medium, key=lambda c: (c.s, -c.id))
            del held[victim.id]
        while _size(held) > 1:
            small = [c for c in held.values() if classify_golden(c.s) is SizeClass.SMALL]
            assert small, "over budget with no small contract to evict"
            victim = min(small, key=lambda c: (c.s, c.id))
            del held[victim.id]
        return held


class SmallestFirstChoice(SequentialChoice):
    policy = Policy.SMALLEST_FIRST

    def __init__(self, hospital: int):
        super().__init__(hospital)
        self._ascending: list[tuple] = []

    def _choose(self, held, x):
        bisect.insort(self._ascending, (x.s, x.id, x))
        chosen = {}
        load = Fraction(0)
        for s, cid, c in self._ascending:
            if load + s > 1:
                break  # everything after is at least as large
            chosen[cid] = c
            load += s
        return chosen


def make_choice(policy: Policy, hospital: int, market: Optional[Market] = None,
                gamma: Optional[int] = None, n_doctors: Optional[int] = None) -> SequentialChoice:
    """Fresh acceptor for one hospital; the matroid policy needs gamma."""
    policy = Policy(policy)
    if policy is Policy.DENSITY:
        return DensityChoice(hospital)
    if policy is Policy.PROP_REMOVABLE:
        return PropRemovableChoice(hospital)
    if policy is Policy.SMALLEST_FIRST:
        return SmallestFirstChoice(hospital)
    if n_doctors is None:
        if market is None:
            raise ParameterError("matroid policy needs the market or n_doctors")
        n_doctors = market.n_doctors
    if gamma is None:
        if market is None:
            raise ParameterError("matroid policy needs the market or gamma")
        gamma = matroid_gamma(n_doctors, market.s_bar)
    return MatroidChoice(hospital, gamma, n_doctors)


def policy_factory(policy: Policy, market: Market) -> Callable[[int], SequentialChoice]:
    """hospital -> fresh acceptor, with gamma computed once per market."""
    policy = Policy(policy)
    if policy is Policy.MATROID:
        gamma = matroid_gamma(market.n_doctors, market.s_bar)
        return lambda h: MatroidChoice(h, gamma, market.n_doctors)
    return lambda h: make_choice(policy, h)


# ---------------------------------------------------------------------------
# property testers
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    passed: bool
    detail: str = ""
    witness: object = None

    def __bool__(self):
        return self.passed


def _replay(factory: Callable[[], SequentialChoice], seq: Sequence[Contract]) -> list[frozenset]:
    state = factory()
    return [state.offer(x) for x in seq]


def check_axioms(factory: Callable[[], SequentialChoice], seq: Sequence[Contract]) -> CheckResult:
    """Replay ``seq`` checking availability, irrevocable rejection, and budget."""
    state = factory()
    offered: set[int] = set()
    rejected: set[int] = set()
    by_id = {x.id: x for x in seq}
    for step, x in enumerate(seq, start=1):
        held = state.offer(x)
        offered.add(x.id)
        if not held <= offered:
            return CheckResult(False, f"step {step}: held contracts never offered", (step, held - offered))
        if held & rejected:
            return CheckResult(False, f"step {step}: rejected contract re-entered", (step, held & rejected))
        if sum((by_id[i].s for i in held), Fraction(0)) > 1:
            return CheckResult(False, f"step {step}: held set over budget", (step, held))
        rejected |= offered - held
    return CheckResult(True)


def _all_or_sampled(items: list, trials: int, rng, exhaustive_limit: int = 6):
    if len(items) <= exhaustive_limit:
        yield from (list(p) for p in itertools.permutations(items))
        return
    for _ in range(trials):
        perm = list(items)
        rng.shuffle(perm)
        yield perm


def check_order_invariance(factory: Callable[[], SequentialChoice], contracts: Sequence[Contract],
                           trials: int = 100, seed: int = 0) -> CheckResult:
    """Held sets must agree whenever two offer prefixes have the same support.

    Small sets are checked over all permutations; larger ones compare each
    prefix of a random permutation against a random reshuffle of that prefix.
    """
    rng = random.Random(seed)
    items = sorted(contracts, key=lambda c: c.id)
    seen: dict[frozenset, tuple[tuple, frozenset]] = {}
    exhaustive = len(items) <= 6
    for perm in _all_or_sampled(items, trials, rng):
        held_seq = _replay(factory, perm)
        for k in range(1, len(perm) + 1):
            support = frozenset(c.id for c in perm[:k])
            order = tuple(c.id for c in perm[:k])
            if not exhaustive:
                other = list(perm[:k])
                rng.shuffle(other)
                other_held = _replay(factory, other)[-1]
                if other_held != held_seq[k - 1]:
                    return CheckResult(False, "order changes the held set",
                                       ((order, held_seq[k - 1]), (tuple(c.id for c in other), other_held)))
                continue
            if support in seen:
                prev_order, prev_held = seen[support]
                if prev_held != held_seq[k - 1]:
                    return CheckResult(False, "order changes the held set",
                                       ((prev_order, prev_held), (order, held_seq[k - 1])))
            else:
                seen[support] = (order, held_seq[k - 1])
    return CheckResult(True)


def check_size_monotonicity(factory: Callable[[], SequentialChoice], contracts: Sequence[Contract],
                            trials: int = 100, seed: int = 0) -> CheckResult:
    """|held| must never shrink along any offer sequence."""
    rng = random.Random(seed)
    items = sorted(contracts, key=lambda c: c.id)
    for perm in _all_or_sampled(items, trials, rng):
        sizes = [len(h) for h in _replay(factory, perm)]
        for i in range(1, len(sizes)):
            if sizes[i] < sizes[i - 1]:
                order = tuple(c.id for c in perm)
                return CheckResult(False, "held set shrank", (order[:i], order[: i + 1]))
    return CheckResult(True)


def check_alpha_approx(factory: Callable[[], SequentialChoice], seq: Sequence[Contract],
                       alpha) -> CheckResult:
    """At each prefix, alpha * u(held) must reach the best feasible subset.

    Prefixes whose held set has two contracts of one doctor are skipped, as
    the approximation guarantee is only stated for the others.
    """
    from .exact import scaled_at_least
    from .verify import best_coalition

    state = factory()
    for k, x in enumerate(seq, start=1):
        state.offer(x)
        held = state.held_contracts()
        if len({c.doctor for c in held}) < len(held):
            continue
        _, opt = best_coalition(seq[:k])
        got = sum((c.u for c in held), Fraction(0))
        if not scaled_at_least(alpha, got, opt):
            return CheckResult(False, f"prefix {k}: alpha*{got} < {opt}",
                               (tuple(c.id for c in seq[:k]), frozenset(c.id for c in held)))
    return CheckResult(True)
