"""Brute-force search for profitable preference misreports by single doctors."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .choice import Policy
from .errors import SearchLimitExceeded
from .gda import LOWEST_INDEX, PickPolicy, run_gda
from .market import Market, assignment, prefers

REPORT_LIMIT = 6


@dataclass(frozen=True)
class Manipulation:
    doctor: int
    report: tuple
    truthful: Optional[int]
    manipulated: Optional[int]


def enumerate_reports(contracts: Sequence[int], limit: int = REPORT_LIMIT) -> Iterator[tuple]:
    """Every strict order over every subset: shorter lists first, then
    permutations of id-sorted combinations in lexicographic order."""
    ids = sorted(contracts)
    if len(ids) > limit:
        raise SearchLimitExceeded(f"{len(ids)} contracts exceed the report-enumeration limit of {limit}")
    for k in range(len(ids) + 1):
        for combo in itertools.combinations(ids, k):
            yield from itertools.permutations(combo)


def outcome(m: Market, policy: Policy, pick: PickPolicy = LOWEST_INDEX) -> list:
    matching, _ = run_gda(m, policy, pick)
    return assignment(m, matching)


def find_manipulation(m: Market, policy: Policy, pick: PickPolicy = LOWEST_INDEX,
                      limit: int = REPORT_LIMIT) -> Optional[Manipulation]:
    """First (doctor, report) pair, in doctor then report order, under which
    the doctor gets a contract she truly prefers to her truthful outcome.

    The pick policy and all other reports stay fixed between runs.
    """
    policy = Policy(policy)
    for d in range(m.n_doctors):
        if len(m.by_doctor[d]) > limit:
            raise SearchLimitExceeded(
                f"doctor {d} has {len(m.by_doctor[d])} contracts; limit is {limit}"
            )
    truth = outcome(m, policy, pick)
    for d in range(m.n_doctors):
        for report in enumerate_reports(m.by_doctor[d], limit):
            if report == m.prefs[d]:
                continue
            got = outcome(m.with_prefs(d, report), policy, pick)[d]
            if prefers(m, d, got, truth[d]):
                return Manipulation(d, report, truth[d], got)
    return None


def describe(m: Market, man: Optional[Manipulation]) -> str:
    if man is None:
        return "no profitable misreport found"

    def name(c):
        return "∅" if c is None else m.label(c)

    true_list = " > ".join(name(c) for c in m.prefs[man.doctor]) or "∅"
    fake = " > ".join(name(c) for c in man.report) or "∅"
    return "\n".join([
        f"doctor: d_{man.doctor + 1}",
        f"true preference: {true_list}",
        f"misreport: {fake}",
        f"truthful outcome: {name(man.truthful)}",
        f"manipulated outcome: {name(man.manipulated)}",
    ])
