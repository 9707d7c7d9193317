"""Doctor-proposing generalized deferred acceptance with sequential choice.

Doctors with no held contract and at least one acceptable contract they have
not yet proposed keep proposing their best such contract; the receiving
hospital's sequential choice updates what it holds.  Every proposal is added
to the proposed set R at once, so a contract is never proposed twice.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .choice import Policy, SequentialChoice, policy_factory
from .errors import InvalidInput, InvariantViolation
from .market import Market, validate_market


@dataclass(frozen=True)
class PickPolicy:
    """How the next proposing doctor is chosen among the eligible ones."""

    kind: str = "lowest"
    seed: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "PickPolicy":
        t = text.strip().lower()
        if t in ("lowest", "lowest-index", "lowest_index"):
            return cls("lowest")
        if t == "fifo":
            return cls("fifo")
        if t.startswith("random:"):
            try:
                return cls("random", int(t.split(":", 1)[1]))
            except ValueError:
                raise ValueError(f"bad random seed in {text!r}") from None
        raise ValueError(f"unknown pick policy {text!r}")

    def __str__(self):
        return f"random:{self.seed}" if self.kind == "random" else self.kind


LOWEST_INDEX = PickPolicy("lowest")
FIFO = PickPolicy("fifo")


def seeded_random(seed: int) -> PickPolicy:
    return PickPolicy("random", seed)


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    doctor: Optional[int]
    contract: Optional[int]
    offers: tuple  # per hospital, contract ids in offer order
    matching: frozenset
    eligible: frozenset  # doctors still proposing


class _Picker:
    def __init__(self, policy: PickPolicy):
        self.policy = policy
        self.queue: list[int] = []
        self.rng = random.Random(policy.seed)

    def update(self, eligible: frozenset) -> None:
        self.queue = [d for d in self.queue if d in eligible]
        self.queue += sorted(eligible - set(self.queue))

    def pick(self, eligible: frozenset) -> int:
        if self.policy.kind == "lowest":
            return min(eligible)
        if self.policy.kind == "fifo":
            return self.queue.pop(0)
        if self.policy.kind == "random":
            return self.rng.choice(sorted(eligible))
        raise ValueError(f"unknown pick policy {self.policy.kind!r}")


def run_gda(m: Market, factory: Callable[[int], SequentialChoice] | Policy | str,
            pick: PickPolicy = LOWEST_INDEX) -> tuple[frozenset, list[TraceRow]]:
    """Run the mechanism; returns the final matching and one trace row per
    iteration, preceded by the initial state as row 0."""
    problems = validate_market(m)
    if problems:
        raise InvalidInput("; ".join(problems))
    if isinstance(factory, (Policy, str)):
        factory = policy_factory(Policy(factory), m)

    states = [factory(h) for h in range(m.n_hospitals)]
    held: list[frozenset] = [frozenset() for _ in range(m.n_hospitals)]
    rejected: list[set] = [set() for _ in range(m.n_hospitals)]
    proposed: set[int] = set()
    next_slot = [0] * m.n_doctors  # position in the preference list

    def matched_doctors():
        return {m.contracts[c].doctor for h in held for c in h}

    def best_unproposed(d: int) -> Optional[int]:
        plist = m.prefs[d]
        while next_slot[d] < len(plist) and plist[next_slot[d]] in proposed:
            next_slot[d] += 1
        return plist[next_slot[d]] if next_slot[d] < len(plist) else None

    def eligible_set() -> frozenset:
        busy = matched_doctors()
        return frozenset(d for d in range(m.n_doctors)
                         if d not in busy and best_unproposed(d) is not None)

    def row(it, d, x):
        return TraceRow(it, d, x, tuple(tuple(c.id for c in st.history) for st in states),
                        frozenset().union(*held), eligible)

    picker = _Picker(pick)
    eligible = eligible_set()
    picker.update(eligible)
    trace = [row(0, None, None)]
    iteration = 0
    while eligible:
        iteration += 1
        if iteration > len(m.contracts):
            raise InvariantViolation("more iterations than contracts")
        d = picker.pick(eligible)
        x = best_unproposed(d)
        h = m.contracts[x].hospital
        new_held = states[h].offer(m.contracts[x])
        offered = {c.id for c in states[h].history}
        if not new_held <= offered:
            raise InvariantViolation(f"hospital {h} holds contracts never offered")
        if new_held & rejected[h]:
            raise InvariantViolation(f"hospital {h} took back a rejected contract")
        if sum((m.contracts[c].s for c in new_held), Fraction(0)) > 1:
            raise InvariantViolation(f"hospital {h} exceeds its budget")
        rejected[h] |= offered - new_held
        held[h] = new_held
        proposed.add(x)
        eligible = eligible_set()
        picker.update(eligible)
        trace.append(row(iteration, d, x))
    return frozenset().union(*held), trace


def _set(items) -> str:
    return "{" + ",".join(items) + "}" if items else "∅"


def format_trace(m: Market, trace: list[TraceRow]) -> str:
    """Text table with columns iter., X', I, and one offer sequence per hospital."""
    header = ["iter.", "X'", "I"] + [f"a^{{h_{h + 1}}}" for h in range(m.n_hospitals)]
    lines = [" | ".join(header)]
    for r in trace:
        cells = [
            str(r.iteration),
            _set([m.label(c) for c in sorted(r.matching)]),
            _set([f"d_{d + 1}" for d in sorted(r.eligible)]),
        ]
        cells += ["(" + ",".join(m.label(c) for c in seq) + ")" for seq in r.offers]
        lines.append(" | ".join(cells))
    return "\n".join(lines) + "\n"
