"""Markets, contracts, and matching feasibility.

Doctors and hospitals are dense 0-based integers; contracts are identified by
their position in ``Market.contracts``.  A doctor's preference list is the
ordered prefix of her acceptable contracts: anything she does not list ranks
below the null contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InvalidInput
from .exact import to_num


@dataclass(frozen=True)
class Contract:
    id: int
    doctor: int
    hospital: int
    u: Fraction
    s: Fraction
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "u", to_num(self.u))
        object.__setattr__(self, "s", to_num(self.s))

    @property
    def density(self):
        """Utility per unit of budget; zero-size contracts are infinitely dense."""
        if self.s == 0:
            return float("inf")
        return self.u / self.s


@dataclass(frozen=True, eq=False)
class Market:
    n_doctors: int
    n_hospitals: int
    contracts: tuple
    prefs: tuple
    proportional: bool = False
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "contracts", tuple(self.contracts))
        object.__setattr__(self, "prefs", tuple(tuple(p) for p in self.prefs))
        object.__setattr__(self, "meta", dict(self.meta))

    def __eq__(self, other):
        if not isinstance(other, Market):
            return NotImplemented
        return (
            self.n_doctors == other.n_doctors
            and self.n_hospitals == other.n_hospitals
            and self.contracts == other.contracts
            and self.prefs == other.prefs
            and self.proportional == other.proportional
            and self.meta == other.meta
        )

    __hash__ = None

    @cached_property
    def s_bar(self) -> Fraction:
        """Largest contract size; 0 for a market without contracts."""
        return max((c.s for c in self.contracts), default=Fraction(0))

    @cached_property
    def by_doctor(self) -> tuple:
        out = [[] for _ in range(self.n_doctors)]
        for c in self.contracts:
            if 0 <= c.doctor < self.n_doctors:
                out[c.doctor].append(c.id)
        return tuple(tuple(ids) for ids in out)

    @cached_property
    def by_hospital(self) -> tuple:
        out = [[] for _ in range(self.n_hospitals)]
        for c in self.contracts:
            if 0 <= c.hospital < self.n_hospitals:
                out[c.hospital].append(c.id)
        return tuple(tuple(ids) for ids in out)

    @cached_property
    def rank(self) -> tuple:
        """rank[d][cid] = position of cid in d's list (absent = unacceptable)."""
        return tuple({cid: r for r, cid in enumerate(p)} for p in self.prefs)

    def contract(self, cid: int) -> Contract:
        if not isinstance(cid, int) or not 0 <= cid < len(self.contracts):
            raise InvalidInput(f"unknown contract id {cid!r}")
        return self.contracts[cid]

    def label(self, cid: int) -> str:
        c = self.contract(cid)
        if c.label:
            return c.label
        pair = [x for x in self.by_hospital[c.hospital] if self.contracts[x].doctor == c.doctor]
        if len(pair) == 1:
            return f"x^{{{c.doctor + 1},{c.hospital + 1}}}"
        return f"x{cid}"

    def acceptable(self, cid: int) -> bool:
        c = self.contract(cid)
        return cid in self.rank[c.doctor]

    def with_prefs(self, doctor: int, report: Sequence[int]) -> "Market":
        """Copy of the market with one doctor's preference list replaced."""
        prefs = list(self.prefs)
        prefs[doctor] = tuple(report)
        return Market(
            self.n_doctors, self.n_hospitals, self.contracts, prefs, self.proportional, self.meta
        )

    def is_proportional(self) -> bool:
        return all(c.u == c.s for c in self.contracts)


class MarketBuilder:
    """Incremental construction; contract ids are assigned in insertion order."""

    def __init__(self, n_doctors: int, n_hospitals: int):
        self.n_doctors = n_doctors
        self.n_hospitals = n_hospitals
        self.contracts: list[Contract] = []
        self.prefs: list[list[int]] = [[] for _ in range(n_doctors)]

    def add(self, doctor: int, hospital: int, u, s, label: Optional[str] = None) -> int:
        cid = len(self.contracts)
        self.contracts.append(Contract(cid, doctor, hospital, u, s, label))
        return cid

    def set_prefs(self, doctor: int, ids: Iterable[int]) -> None:
        self.prefs[doctor] = list(ids)

    def build(self, proportional: bool = False, **meta) -> Market:
        return Market(
            self.n_doctors, self.n_hospitals, self.contracts, self.prefs, proportional, meta
        )


def validate_market(m: Market) -> list[str]:
    """Describe every broken invariant; an empty list means the market is valid."""
    problems = []
    if m.n_doctors < 0 or m.n_hospitals < 0:
        problems.append("doctor and hospital counts must be nonnegative")
    for pos, c in enumerate(m.contracts):
        name = f"contract {c.id}"
        if c.id != pos:
            problems.append(f"{name}: id does not match its position {pos}")
        if not 0 <= c.doctor < m.n_doctors:
            problems.append(f"{name}: unknown doctor {c.doctor}")
        if not 0 <= c.hospital < m.n_hospitals:
            problems.append(f"{name}: unknown hospital {c.hospital}")
        if c.u < 0:
            problems.append(f"{name}: negative utility {c.u}")
        if not 0 <= c.s <= 1:
            problems.append(f"{name}: size {c.s} outside [0, 1]")
        if m.proportional and c.u != c.s:
            problems.append(f"{name}: proportional market needs u == s, got u={c.u} s={c.s}")
    if len(m.prefs) != m.n_doctors:
        problems.append(f"expected {m.n_doctors} preference lists, got {len(m.prefs)}")
    for d, plist in enumerate(m.prefs):
        seen = set()
        for cid in plist:
            if not isinstance(cid, int) or not 0 <= cid < len(m.contracts):
                problems.append(f"doctor {d}: unknown contract {cid!r} in preference list")
                continue
            if cid in seen:
                problems.append(f"doctor {d}: contract {cid} listed twice")
            seen.add(cid)
            if m.contracts[cid].doctor != d:
                problems.append(f"doctor {d}: contract {cid} belongs to doctor {m.contracts[cid].doctor}")
    return problems


def _check_ids(m: Market, ids: Iterable[int]) -> list[Contract]:
    return [m.contract(cid) for cid in ids]


def is_matching(m: Market, chosen: Iterable[int]) -> bool:
    """At most one contract per doctor and total size at most 1 per hospital."""
    contracts = _check_ids(m, set(chosen))
    doctors = set()
    load: dict[int, Fraction] = {}
    for c in contracts:
        if c.doctor in doctors:
            return False
        doctors.add(c.doctor)
        load[c.hospital] = load.get(c.hospital, Fraction(0)) + c.s
    return all(v <= 1 for v in load.values())


def _rank_of(m: Market, d: int, cid: Optional[int]) -> float:
    plist = m.prefs[d]
    if cid is None:
        return len(plist)
    if m.contract(cid).doctor != d:
        raise InvalidInput(f"contract {cid} does not belong to doctor {d}")
    return m.rank[d].get(cid, float("inf"))


def prefers(m: Market, d: int, a: Optional[int], b: Optional[int]) -> bool:
    """True iff doctor d strictly prefers a to b (None is the null contract)."""
    ra, rb = _rank_of(m, d, a), _rank_of(m, d, b)
    if ra == float("inf"):
        return False
    return ra < rb


def assignment(m: Market, chosen: Iterable[int]) -> list[Optional[int]]:
    """Per-doctor contract id in the matching, or None."""
    out: list[Optional[int]] = [None] * m.n_doctors
    for cid in chosen:
        out[m.contract(cid).doctor] = cid
    return out


def total(contracts: Iterable[Contract], attr: str = "u") -> Fraction:
    return sum((getattr(c, attr) for c in contracts), Fraction(0))
