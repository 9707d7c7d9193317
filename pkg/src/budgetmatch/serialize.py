"""JSON instance files.

Numbers travel as exact rational strings ("p/q" or integers) so a round trip
never loses precision.  Output is deterministic: sorted keys, two-space
indent, trailing newline.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

from .errors import InvalidInput
from .exact import format_num, to_num
from .market import Contract, Market, validate_market

PathLike = Union[str, Path]


def market_to_dict(m: Market) -> dict:
    contracts = []
    for c in m.contracts:
        entry = {"id": c.id, "doctor": c.doctor, "hospital": c.hospital,
                 "u": format_num(c.u), "s": format_num(c.s)}
        if c.label is not None:
            entry["label"] = c.label
        contracts.append(entry)
    meta = dict(m.meta)
    meta["proportional"] = m.proportional
    return {
        "doctors": m.n_doctors,
        "hospitals": m.n_hospitals,
        "contracts": contracts,
        "prefs": {str(d): list(p) for d, p in enumerate(m.prefs)},
        "meta": _jsonable(meta),
    }


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return format_num(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, float):
        return format_num(value) if value == float("inf") else value
    if value is None or isinstance(value, (bool, int, str)):
        return value
    return str(value)


def dumps(m: Market) -> str:
    return json.dumps(market_to_dict(m), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidInput(f"{what} must be an integer, got {value!r}")
    return value


def _num(value, what: str) -> Fraction:
    if isinstance(value, float):
        raise InvalidInput(f"{what} must be an exact rational string like \"3/5\", got float {value!r}")
    try:
        return to_num(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"{what}: {exc}") from None


def market_from_dict(data: Any) -> Market:
    if not isinstance(data, dict):
        raise InvalidInput("instance must be a JSON object")
    for key in ("doctors", "hospitals", "contracts"):
        if key not in data:
            raise InvalidInput(f"missing key {key!r}")
    n_doc = _int(data["doctors"], "doctors")
    n_hosp = _int(data["hospitals"], "hospitals")
    if n_doc < 0 or n_hosp < 0:
        raise InvalidInput("doctor and hospital counts must be nonnegative")
    raw = data["contracts"]
    if not isinstance(raw, list):
        raise InvalidInput("contracts must be a list")
    contracts = []
    for pos, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise InvalidInput(f"contract #{pos} must be an object")
        for key in ("doctor", "hospital", "u", "s"):
            if key not in entry:
                raise InvalidInput(f"contract #{pos} lacks {key!r}")
        cid = _int(entry.get("id", pos), f"contract #{pos} id")
        label = entry.get("label")
        if label is not None and not isinstance(label, str):
            raise InvalidInput(f"contract #{pos} label must be a string")
        contracts.append(Contract(
            cid,
            _int(entry["doctor"], f"contract {cid} doctor"),
            _int(entry["hospital"], f"contract {cid} hospital"),
            _num(entry["u"], f"contract {cid} u"),
            _num(entry["s"], f"contract {cid} s"),
            label,
        ))
    ids = sorted(c.id for c in contracts)
    if ids != list(range(len(contracts))):
        raise InvalidInput("contract ids must be 0..n-1 without gaps or repeats")
    contracts.sort(key=lambda c: c.id)

    raw_prefs = data.get("prefs", {})
    if not isinstance(raw_prefs, dict):
        raise InvalidInput("prefs must map doctor index to a list of contract ids")
    prefs: list[tuple] = [() for _ in range(n_doc)]
    for key, plist in raw_prefs.items():
        try:
            d = int(key)
        except (TypeError, ValueError):
            raise InvalidInput(f"prefs key {key!r} is not a doctor index") from None
        if not 0 <= d < n_doc:
            raise InvalidInput(f"prefs key {key!r} is out of range")
        if not isinstance(plist, list):
            raise InvalidInput(f"prefs for doctor {d} must be a list")
        prefs[d] = tuple(_int(c, f"prefs[{d}] entry") for c in plist)

    meta = data.get("meta", {})
    if not isinstance(meta, dict):
        raise InvalidInput("meta must be an object")
    meta = dict(meta)
    proportional = meta.pop("proportional", False)
    if not isinstance(proportional, bool):
        raise InvalidInput("meta.proportional must be true or false")

    m = Market(n_doc, n_hosp, tuple(contracts), tuple(prefs), proportional, meta)
    problems = validate_market(m)
    if problems:
        raise InvalidInput("; ".join(problems))
    return m


def loads(text: str) -> Market:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"malformed JSON: {exc}") from None
    return market_from_dict(data)


def load_market(path: PathLike) -> Market:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror or exc}") from None
    return loads(text)


def save_market(m: Market, path: PathLike) -> None:
    Path(path).write_text(dumps(m), encoding="utf-8")


def load_matching(path: PathLike, m: Market | None = None) -> frozenset:
    """A JSON list of contract ids, or an object with a "matching" list.

    With a market, entries may also be contract labels.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"malformed JSON: {exc}") from None
    if isinstance(data, dict):
        data = data.get("matching")
    if not isinstance(data, list):
        raise InvalidInput("matching file must hold a list of contract ids")
    labels = {m.label(c.id): c.id for c in m.contracts} if m is not None else {}
    out = set()
    for item in data:
        if isinstance(item, str) and item in labels:
            out.add(labels[item])
            continue
        cid = _int(item, "matching entry")
        if m is not None and not 0 <= cid < len(m.contracts):
            raise InvalidInput(f"matching refers to unknown contract {cid}")
        out.add(cid)
    return frozenset(out)
