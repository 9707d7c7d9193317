"""Fixture markets and seeded random generators.

The golden-ratio gadgets need 1/phi as a contract size.  Sizes must be
rational, so they use a Fibonacci convergent p/q of 1/phi (see
:func:`budgetmatch.exact.inv_phi_convergent`) and record it in ``meta``.
Every stability check then runs exactly on those perturbed rationals.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ParameterError
from .exact import format_num, inv_phi_convergent, to_num
from .market import Market, MarketBuilder


def find_label(m: Market, label: str) -> int:
    for c in m.contracts:
        if c.label == label:
            return c.id
    raise KeyError(label)


def example1() -> Market:
    """Four doctors, two hospitals, utilities and sizes from the worked example."""
    table = {
        (1, 1): (111, "0.57"), (1, 2): (30, "0.56"),
        (2, 1): (98, "0.50"), (2, 2): (40, "0.55"),
        (3, 1): (83, "0.42"), (3, 2): (10, "0.60"),
        (4, 1): (110, "0.55"), (4, 2): (20, "0.45"),
    }
    b = MarketBuilder(4, 2)
    ids = {}
    for (i, j), (u, s) in table.items():
        ids[i, j] = b.add(i - 1, j - 1, u, s, f"x^{{{i},{j}}}")
    for i in (1, 2, 3):
        b.set_prefs(i - 1, [ids[i, 1], ids[i, 2]])
    b.set_prefs(3, [ids[4, 2], ids[4, 1]])
    return b.build(notes="worked example: density mechanism trace")


def inv_phi_proxy(eps: Fraction) -> Fraction:
    """Convergent of 1/phi used by the golden gadgets for tolerance eps.

    The error is kept below eps**2/100, which is below eps/100 whenever
    eps < 1; for eps = 1/10 this gives 55/89.
    """
    eps = to_num(eps)
    return inv_phi_convergent(min(eps, Fraction(1)) ** 2 / 100)


def thm6_market(eps, inv_phi: Optional[Fraction] = None, x_excess: Optional[Fraction] = None) -> Market:
    """Three-doctor proportional market built to lack (phi - eps)-stable matchings.

    ``x_excess`` is how far x's size sits above 1/phi; it defaults to eps/2.
    """
    eps = to_num(eps)
    if eps <= 0:
        raise ParameterError("eps must be positive")
    q = to_num(inv_phi) if inv_phi is not None else inv_phi_proxy(eps)
    excess = to_num(x_excess) if x_excess is not None else eps / 2
    sizes = {"x": q + excess, "y": 1 - q, "yhat": Fraction(1), "z": q, "zhat": eps}
    if any(not 0 <= v <= 1 for v in sizes.values()):
        raise ParameterError(f"eps={eps} pushes a contract size outside [0, 1]")
    b = MarketBuilder(3, 2)
    x = b.add(0, 0, sizes["x"], sizes["x"], "x")
    y = b.add(1, 0, sizes["y"], sizes["y"], "y")
    yhat = b.add(1, 1, sizes["yhat"], sizes["yhat"], "yhat")
    z = b.add(2, 0, sizes["z"], sizes["z"], "z")
    zhat = b.add(2, 1, sizes["zhat"], sizes["zhat"], "zhat")
    b.set_prefs(0, [x])
    b.set_prefs(1, [y, yhat])
    b.set_prefs(2, [zhat, z])
    return b.build(proportional=True, eps=format_num(eps), inv_phi=format_num(q),
                   phi_proxy=format_num(1 + q), x_excess=format_num(excess))


def thm2_market(s_bar, delta, max_contracts: int = 200_000) -> Market:
    """Lower-bound market for the 1/(1 - s_bar) guarantee.

    The guarantee it demonstrates is asymptotic: the gap closes only as delta
    goes to 0, and the market has about delta**-6 / 2 contracts.
    """
    s_bar, delta = to_num(s_bar), to_num(delta)
    if not Fraction(1, 2) < s_bar < 1:
        raise ParameterError("s_bar must lie in (1/2, 1)")
    if not 0 < delta <= 1:
        raise ParameterError("delta must lie in (0, 1]")
    alpha = 1 / (1 - s_bar)
    n = math.floor(1 / delta**3)
    l = math.floor((1 - s_bar) / delta) + 1
    if n < l + 1:
        raise ParameterError(f"n={n} < l+1={l + 1}: delta too large for this s_bar")
    count = 1 + n + sum(n - max(i, l + 1) + 1 for i in range(1, n + 1))
    if count > max_contracts:
        raise ParameterError(f"{count} contracts exceed max_contracts={max_contracts}")

    # doctor 0 is d*, doctor i is d_i; hospital 0 is h*, hospital j - l is h_j
    b = MarketBuilder(n + 1, n - l + 1)
    xstar = b.add(0, 0, s_bar, s_bar, "x*")
    xs = {i: b.add(i, 0, i * delta**3, delta, f"x^{i}") for i in range(1, n + 1)}
    ys = {}
    for i in range(1, n + 1):
        for j in range(max(i, l + 1), n + 1):
            ys[i, j] = b.add(i, j - l, alpha ** (-i), s_bar, f"y^{{{i},{j}}}")
    b.set_prefs(0, [xstar])
    for i in range(1, n + 1):
        if i <= l:
            order = [xs[i]] + [ys[i, j] for j in range(l + 1, n + 1)]
        else:
            order = [ys[i, i], xs[i]] + [ys[i, j] for j in range(i + 1, n + 1)]
        b.set_prefs(i, order)
    return b.build(s_bar=format_num(s_bar), delta=format_num(delta), n=n, l=l)


def prop1_market(s_bar) -> Market:
    """Three doctors, two hospitals, six contracts; used to probe manipulability."""
    s_bar = to_num(s_bar)
    if not Fraction(1, 2) < s_bar <= 1:
        raise ParameterError("s_bar must lie in (1/2, 1]")
    half = Fraction(1, 2)
    rows = [
        (1, 1, 1, half), (1, 2, 4, s_bar),
        (2, 1, 4, s_bar), (2, 2, 1, s_bar),
        (3, 1, 2, half), (3, 2, 2, s_bar),
    ]
    b = MarketBuilder(3, 2)
    ids = {(i, j): b.add(i - 1, j - 1, u, s) for i, j, u, s in rows}
    b.set_prefs(0, [ids[1, 1], ids[1, 2]])
    b.set_prefs(1, [ids[2, 2], ids[2, 1]])
    b.set_prefs(2, [ids[3, 2], ids[3, 1]])
    return b.build(s_bar=format_num(s_bar))


def _check_subset_sum(a: Sequence[int], t: int) -> int:
    if not a or any(int(v) != v or v <= 0 for v in a):
        raise ParameterError("a must be a nonempty list of positive integers")
    total = sum(a)
    if not total >= t > 0:
        raise ParameterError(f"need sum(a) >= t > 0, got sum={total}, t={t}")
    return total


def _ratio(num: int, den: int):
    """num/den, or None when den is 0 (the contract cannot exist)."""
    return Fraction(num, den) if den else None


def subset_sum_market_additive(a: Sequence[int], t: int, alpha) -> Market:
    """Reduction gadget: 1-stable iff the subset-sum instance (a, t) is solvable.

    Contracts whose size would exceed one budget (a_i > t or a_i > sum - t)
    can never be matched, so they are left out; their labels are listed in
    ``meta["omitted"]``.  With t == sum(a) the second family has no finite
    size at all and is omitted the same way.
    """
    alpha = to_num(alpha)
    if alpha <= 1:
        raise ParameterError("alpha must exceed 1")
    total = _check_subset_sum(a, t)
    n = len(a)
    m = math.ceil(3 * alpha * alpha)

    def doctor(i, j):  # d_i^j, i 1-based, j = 0..m
        return (i - 1) * (m + 1) + j

    def hosp(i, j):  # h_i^j, j = 0..m-1; 0 and 1 are h+ and h-
        return 2 + (i - 1) * m + j

    b = MarketBuilder(n * (m + 1), 2 + n * m)
    omitted = []
    for i in range(1, n + 1):
        ai = a[i - 1]
        r = []
        for k, (h, size) in enumerate([(0, Fraction(ai, t)), (1, _ratio(ai, total - t))], start=1):
            if size is None or size > 1:
                omitted.append(f"r^{{{i},{k}}}")
                continue
            r.append(b.add(doctor(i, 0), h, size, size, f"r^{{{i},{k}}}"))
        r.append(b.add(doctor(i, 0), hosp(i, 0), 1, 1, f"r^{{{i},3}}"))
        b.set_prefs(doctor(i, 0), r)
        x = {j: b.add(doctor(i, j), hosp(i, 0), 2 * alpha / m, Fraction(1, m), f"x^{{{i},{j}}}")
             for j in range(1, m + 1)}
        y = {j: b.add(doctor(i, j), hosp(i, j - 1), 1, 1, f"y^{{{i},{j}}}") for j in range(2, m + 1)}
        z = {j: b.add(doctor(i, j), hosp(i, j), 2 * alpha, 1, f"z^{{{i},{j}}}") for j in range(1, m)}
        # alpha > 1 forces m >= 4
        b.set_prefs(doctor(i, 1), [x[1], z[1]])
        for j in range(2, m):
            b.set_prefs(doctor(i, j), [y[j], x[j], z[j]])
        b.set_prefs(doctor(i, m), [y[m], x[m]])
    return b.build(a=list(a), t=t, alpha=format_num(alpha), m=m, omitted=omitted)


def subset_sum_witness_additive(market: Market, chosen: Sequence[int]) -> frozenset:
    """The 1-stable matching built from a subset-sum solution (1-based indices)."""
    n, m = len(market.meta["a"]), market.meta["m"]
    picked = set(chosen)
    out = set()
    for i in range(1, n + 1):
        out.add(find_label(market, f"r^{{{i},{1 if i in picked else 2}}}"))
        out.add(find_label(market, f"x^{{{i},1}}"))
        out.update(find_label(market, f"y^{{{i},{j}}}") for j in range(2, m + 1))
    return frozenset(out)


def subset_sum_market_proportional(a: Sequence[int], t: int, eps,
                                   inv_phi: Optional[Fraction] = None) -> Market:
    """Proportional reduction gadget built around the three-doctor golden market."""
    eps = to_num(eps)
    if eps <= 0:
        raise ParameterError("eps must be positive")
    total = _check_subset_sum(a, t)
    q = to_num(inv_phi) if inv_phi is not None else inv_phi_proxy(eps)
    if q + eps / 2 > 1 or eps > 1:
        raise ParameterError(f"eps={eps} pushes a contract size above 1")
    n = len(a)
    b = MarketBuilder(n + 2, 4)
    omitted = []
    for i in range(1, n + 1):
        ai = a[i - 1]
        ids = []
        for k, size in ((1, Fraction(ai, t)), (2, _ratio(ai, total - t)), (3, q + eps / 2)):
            if size is None or size > 1:
                omitted.append(f"x^{{{i},{k}}}")
                continue
            ids.append(b.add(i - 1, k - 1, size, size, f"x^{{{i},{k}}}"))
        b.set_prefs(i - 1, ids)
    y = b.add(n, 2, 1 - q, 1 - q, "y")
    yhat = b.add(n, 3, 1, 1, "yhat")
    z = b.add(n + 1, 2, q, q, "z")
    zhat = b.add(n + 1, 3, eps, eps, "zhat")
    b.set_prefs(n, [y, yhat])
    b.set_prefs(n + 1, [zhat, z])
    return b.build(proportional=True, a=list(a), t=t, eps=format_num(eps), inv_phi=format_num(q),
                   phi_proxy=format_num(1 + q), omitted=omitted)


def subset_sum_witness_proportional(market: Market, chosen: Sequence[int]) -> frozenset:
    n = len(market.meta["a"])
    picked = set(chosen)
    out = {find_label(market, f"x^{{{i},{1 if i in picked else 2}}}") for i in range(1, n + 1)}
    out.add(find_label(market, "y"))
    out.add(find_label(market, "zhat"))
    return frozenset(out)


@dataclass
class GeneratorParams:
    doctors: tuple = (2, 6)
    hospitals: tuple = (1, 3)
    contracts_per_doctor: tuple = (1, 3)
    max_contracts: Optional[int] = 12
    s_bar: Fraction = Fraction(3, 5)
    size_denominator: int = 20
    utility_max: int = 100
    proportional: bool = False
    truncate_prob: float = 0.1
    seed: int = 0


def random_market(p: GeneratorParams) -> Market:
    """Seeded random market; sizes are k/q with q = ``size_denominator``."""
    s_cap = to_num(p.s_bar)
    for name in ("doctors", "hospitals", "contracts_per_doctor"):
        lo, hi = getattr(p, name)
        if lo > hi or lo < (1 if name != "contracts_per_doctor" else 0):
            raise ParameterError(f"bad range for {name}: {(lo, hi)}")
    if p.size_denominator < 1 or not 0 < s_cap <= 1:
        raise ParameterError("need size_denominator >= 1 and 0 < s_bar <= 1")
    k_max = math.floor(s_cap * p.size_denominator)
    if k_max < 1:
        raise ParameterError("no positive size k/q fits under s_bar")
    if p.utility_max < 1:
        raise ParameterError("utility_max must be >= 1")

    rng = random.Random(p.seed)
    n_doc = rng.randint(*p.doctors)
    n_hosp = rng.randint(*p.hospitals)
    b = MarketBuilder(n_doc, n_hosp)
    for d in range(n_doc):
        k = rng.randint(*p.contracts_per_doctor)
        if p.max_contracts is not None:
            k = min(k, p.max_contracts - len(b.contracts))
        if k <= 0:
            continue
        if k <= n_hosp:
            hs = rng.sample(range(n_hosp), k)
        else:
            hs = [rng.randrange(n_hosp) for _ in range(k)]
        ids = []
        for h in hs:
            s = Fraction(rng.randint(1, k_max), p.size_denominator)
            u = s if p.proportional else Fraction(rng.randint(1, p.utility_max))
            ids.append(b.add(d, h, u, s))
        rng.shuffle(ids)
        if len(ids) > 1 and rng.random() < p.truncate_prob:
            ids = ids[: rng.randint(1, len(ids) - 1)]
        b.set_prefs(d, ids)
    return b.build(proportional=p.proportional, seed=p.seed)
