"""Exact alpha-stability verification.

A hospital h is blocked at level alpha when some feasible set of its
contracts, each either already held by h or strictly preferred by its doctor
to her current assignment, has utility above alpha * u(X'_h).  The best such
set is a knapsack with at most one contract per doctor, solved exactly here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .errors import InvalidInput, ParameterError, SearchLimitExceeded
from .exact import Bound, format_num, scaled_exceeds
from .market import Contract, Market, assignment, is_matching, prefers

EXACT_SEARCH_LIMIT = 200
EXHAUSTIVE_LIMIT = 25
BRUTEFORCE_LIMIT = 20


def _lcm_den(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = out * v.denominator // math.gcd(out, v.denominator)
    return out


def _key(ids) -> tuple:
    return tuple(sorted(ids))


def best_coalition(candidates: Sequence[Contract], budget: Fraction = Fraction(1),
                   limit: int = EXACT_SEARCH_LIMIT) -> tuple[frozenset, Fraction]:
    """Maximum-utility subset with total size <= budget and one contract per doctor.

    Depth-first branch and bound over contracts in decreasing density, pruned
    by the fractional knapsack relaxation.  Everything is scaled to integers
    first, so the search is exact.  Among optimal sets the lexicographically
    smallest sorted id tuple is returned.
    """
    items = list({c.id: c for c in candidates}.values())
    if len(items) > limit:
        raise SearchLimitExceeded(
            f"{len(items)} candidates exceed the exact-search limit of {limit}; "
            "instance too large for exact verification"
        )
    budget = Fraction(budget)
    if not items:
        return frozenset(), Fraction(0)

    ls = _lcm_den([c.s for c in items] + [budget])
    lu = _lcm_den(c.u for c in items)
    # density order; zero sizes first
    items.sort(key=lambda c: (c.s != 0, -(c.u / c.s) if c.s else 0, c.id))
    n = len(items)
    size = [int(c.s * ls) for c in items]
    util = [int(c.u * lu) for c in items]
    doc = [c.doctor for c in items]
    ident = [c.id for c in items]
    cap0 = int(budget * ls)

    best_u = -1
    best_ids: tuple = ()
    used: set[int] = set()
    chosen: list[int] = []

    def bound_below(k: int, cur: int, cap: int, target: int) -> bool:
        """True when the LP relaxation over items k.. cannot reach target."""
        acc = cur
        for j in range(k, n):
            if doc[j] in used:
                continue
            if size[j] <= cap:
                cap -= size[j]
                acc += util[j]
            else:
                # acc + cap*util/size < target, cross-multiplied
                return acc * size[j] + cap * util[j] < target * size[j]
        return acc < target

    def dfs(k: int, cur: int, cap: int) -> None:
        nonlocal best_u, best_ids
        if k == n:
            if cur > best_u or (cur == best_u and _key(chosen) < best_ids):
                best_u, best_ids = cur, _key(chosen)
            return
        if best_u >= 0 and bound_below(k, cur, cap, best_u):
            return
        if doc[k] not in used and size[k] <= cap:
            used.add(doc[k])
            chosen.append(ident[k])
            dfs(k + 1, cur + util[k], cap - size[k])
            chosen.pop()
            used.discard(doc[k])
        dfs(k + 1, cur, cap)

    dfs(0, 0, cap0)
    return frozenset(best_ids), Fraction(best_u, lu)


def best_coalition_exhaustive(candidates: Sequence[Contract], budget: Fraction = Fraction(1),
                              limit: int = EXHAUSTIVE_LIMIT) -> tuple[frozenset, Fraction]:
    """Plain subset enumeration; the reference for :func:`best_coalition`."""
    items = sorted({c.id: c for c in candidates}.values(), key=lambda c: c.id)
    if len(items) > limit:
        raise SearchLimitExceeded(f"{len(items)} candidates exceed the exhaustive limit of {limit}")
    best: tuple = (Fraction(-1), ())
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            if len({c.doctor for c in combo}) < r:
                continue
            if sum((c.s for c in combo), Fraction(0)) > budget:
                continue
            u = sum((c.u for c in combo), Fraction(0))
            ids = tuple(c.id for c in combo)
            if u > best[0] or (u == best[0] and ids < best[1]):
                best = (u, ids)
    return frozenset(best[1]), best[0]


def _require_matching(m: Market, matching: Iterable[int]) -> frozenset:
    chosen = frozenset(matching)
    if not is_matching(m, chosen):
        raise InvalidInput("the given contract set is not a matching")
    return chosen


def eligible_contracts(m: Market, matching: Iterable[int], h: int) -> frozenset:
    """Contracts of h that could sit in a blocking coalition.

    A contract qualifies when h already holds it, or its doctor strictly
    prefers it to her current contract (the null contract if unmatched).
    """
    chosen = frozenset(matching)
    current = assignment(m, chosen)
    out = set()
    for cid in m.by_hospital[h]:
        if cid in chosen or prefers(m, m.contracts[cid].doctor, cid, current[m.contracts[cid].doctor]):
            out.add(cid)
    return frozenset(out)


@dataclass
class HospitalCertificate:
    hospital: int
    eligible: frozenset
    coalition: frozenset
    best: Fraction
    current: Fraction

    @property
    def ratio(self):
        if self.best <= self.current:
            return Fraction(1) if self.current == 0 else self.best / self.current
        if self.current == 0:
            return math.inf
        return self.best / self.current


@dataclass
class StabilityCertificate:
    hospitals: list = field(default_factory=list)

    @property
    def alpha_star(self):
        worst = Fraction(1)
        for hc in self.hospitals:
            if hc.best > hc.current and hc.ratio > worst:
                worst = hc.ratio
        return worst

    def report(self, m: Market) -> str:
        lines = ["hospital | u(X'_h) | best | ratio | coalition"]
        for hc in self.hospitals:
            names = ",".join(m.label(c) for c in sorted(hc.coalition))
            lines.append(
                f"h_{hc.hospital + 1} | {format_num(hc.current)} | {format_num(hc.best)} | "
                f"{format_num(hc.ratio)} | {{{names}}}"
            )
        lines.append(f"alpha_star = {format_num(self.alpha_star)}")
        return "\n".join(lines)


def certificate(m: Market, matching: Iterable[int], limit: int = EXACT_SEARCH_LIMIT) -> StabilityCertificate:
    """Best blocking candidate for every hospital, with ratios."""
    chosen = _require_matching(m, matching)
    cert = StabilityCertificate()
    for h in range(m.n_hospitals):
        elig = eligible_contracts(m, chosen, h)
        coalition, best = best_coalition([m.contracts[c] for c in sorted(elig)], limit=limit)
        current = sum((m.contracts[c].u for c in chosen
                       if m.contracts[c].hospital == h), Fraction(0))
        cert.hospitals.append(HospitalCertificate(h, elig, coalition, best, current))
    return cert


@dataclass
class StabilityResult:
    stable: bool
    hospital: Optional[int] = None
    coalition: Optional[frozenset] = None

    def __bool__(self):
        return self.stable


def is_alpha_stable(m: Market, matching: Iterable[int], alpha: Bound,
                    limit: int = EXACT_SEARCH_LIMIT) -> StabilityResult:
    """False (with the lowest-index blocked hospital's coalition) iff some
    hospital's best coalition strictly exceeds alpha times its utility."""
    if alpha < 1:
        raise ParameterError(f"alpha must be >= 1, got {alpha}")
    for hc in certificate(m, matching, limit).hospitals:
        if scaled_exceeds(hc.best, alpha, hc.current):
            return StabilityResult(False, hc.hospital, hc.coalition)
    return StabilityResult(True)


def alpha_star(m: Market, matching: Iterable[int], limit: int = EXACT_SEARCH_LIMIT):
    """Smallest alpha at which the matching is alpha-stable (``math.inf`` if none).

    Blocking needs a strict inequality, so the matching is stable exactly for
    alpha >= alpha_star, the boundary included.  ``math.inf`` arises when a
    hospital with zero utility can form a profitable coalition; no alpha,
    not even ``math.inf`` (taking inf * 0 = 0), makes that matching stable.
    """
    return certificate(m, matching, limit).alpha_star


def enumerate_matchings(m: Market, limit: int = BRUTEFORCE_LIMIT) -> Iterator[frozenset]:
    """Every matching built from acceptable contracts, in a fixed order.

    Doctors are assigned in index order, each one trying "unmatched" first and
    then her acceptable contracts by id; budgets prune partial assignments.
    """
    if len(m.contracts) > limit:
        raise SearchLimitExceeded(
            f"{len(m.contracts)} contracts exceed the brute-force limit of {limit}"
        )
    options = [[None] + sorted(m.prefs[d]) for d in range(m.n_doctors)]
    load = [Fraction(0)] * m.n_hospitals
    picked: list[int] = []

    def rec(d: int):
        if d == m.n_doctors:
            yield frozenset(picked)
            return
        for cid in options[d]:
            if cid is None:
                yield from rec(d + 1)
                continue
            c = m.contracts[cid]
            if load[c.hospital] + c.s > 1:
                continue
            load[c.hospital] += c.s
            picked.append(cid)
            yield from rec(d + 1)
            picked.pop()
            load[c.hospital] -= c.s

    yield from rec(0)


def exists_alpha_stable_bruteforce(m: Market, alpha: Bound,
                                   limit: int = BRUTEFORCE_LIMIT) -> Optional[frozenset]:
    """First alpha-stable matching in enumeration order, or None."""
    for matching in enumerate_matchings(m, limit):
        if is_alpha_stable(m, matching, alpha):
            return matching
    return None


def min_alpha_star_bruteforce(m: Market, limit: int = BRUTEFORCE_LIMIT):
    """(smallest alpha_star over all matchings, a matching attaining it)."""
    best = None
    arg = None
    for matching in enumerate_matchings(m, limit):
        a = alpha_star(m, matching)
        if best is None or a < best:
            best, arg = a, matching
    return best, arg
