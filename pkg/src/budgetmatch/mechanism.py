"""End-to-end runs: generalized DA, exact verification, and the proven bound."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .choice import Policy, matroid_gamma
from .errors import ParameterError
from .exact import PHI, Bound, format_num
from .gda import LOWEST_INDEX, PickPolicy, run_gda
from .market import Market, assignment
from .verify import alpha_star


def proven_bound(m: Market, policy: Policy) -> Bound:
    """Stability factor guaranteed for this mechanism on this market.

    ``math.inf`` means no guarantee applies (s_bar = 1, or smallest-first on
    a market that is not proportional).
    """
    policy = Policy(policy)
    if policy is Policy.PROP_REMOVABLE:
        if not m.is_proportional():
            raise ParameterError("prop-removable needs a proportional market (u == s)")
        return PHI
    if policy is Policy.MATROID:
        return Fraction(matroid_gamma(m.n_doctors, m.s_bar)) if m.n_doctors else Fraction(1)
    if policy is Policy.SMALLEST_FIRST and not m.is_proportional():
        return math.inf
    if m.s_bar >= 1:
        return math.inf
    return 1 / (1 - m.s_bar)


@dataclass
class RunReport:
    mechanism: str
    pick: str
    matching: tuple
    assignment: list
    alpha_star: object
    bound: object
    bound_satisfied: bool
    wall_time: float
    trace: list = field(default_factory=list, repr=False)

    def to_dict(self, m: Market) -> dict:
        return {
            "mechanism": self.mechanism,
            "pick": self.pick,
            "matching": list(self.matching),
            "matching_labels": [m.label(c) for c in self.matching],
            "assignment": {f"d_{d + 1}": (None if c is None else m.label(c))
                           for d, c in enumerate(self.assignment)},
            "alpha_star": format_num(self.alpha_star),
            "bound": format_num(self.bound),
            "bound_float": float(self.bound),
            "bound_satisfied": self.bound_satisfied,
            "wall_time": round(self.wall_time, 6),
        }

    def to_text(self, m: Market) -> str:
        labels = ",".join(m.label(c) for c in self.matching)
        assign = " ".join(f"d_{d + 1}={'∅' if c is None else m.label(c)}"
                          for d, c in enumerate(self.assignment))
        bound = format_num(self.bound)
        if self.bound is PHI:
            bound += f" (~{float(PHI):.6f})"
        return "\n".join([
            f"mechanism: {self.mechanism}",
            f"pick: {self.pick}",
            f"matching: {{{labels}}}" if labels else "matching: ∅",
            f"assignment: {assign}",
            f"alpha_star: {format_num(self.alpha_star)}",
            f"bound: {bound}",
            f"bound_satisfied: {'true' if self.bound_satisfied else 'false'}",
            f"wall_time: {self.wall_time:.4f}s",
        ])


def solve(m: Market, policy: Policy, pick: PickPolicy = LOWEST_INDEX) -> RunReport:
    policy = Policy(policy)
    bound = proven_bound(m, policy)
    start = time.perf_counter()
    matching, trace = run_gda(m, policy, pick)
    star = alpha_star(m, matching)
    elapsed = time.perf_counter() - start
    return RunReport(
        mechanism=policy.value,
        pick=str(pick),
        matching=tuple(sorted(matching)),
        assignment=assignment(m, matching),
        alpha_star=star,
        bound=bound,
        bound_satisfied=bool(star <= bound),
        wall_time=elapsed,
        trace=trace,
    )
