"""Command-line entry point: solve, verify, generate, probe, bench.

Exit codes: 0 success (stable, bound met, no manipulation), 1 a semantic
negative (unstable, bound missed, manipulation found), 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .choice import Policy
from .errors import InvalidInput, ParameterError, SearchLimitExceeded
from .exact import format_num, parse_bound, to_num
from .gda import PickPolicy, format_trace
from .instances import (
    GeneratorParams, example1, prop1_market, random_market, subset_sum_market_additive,
    subset_sum_market_proportional, thm2_market, thm6_market,
)
from .mechanism import solve
from .probe import describe, find_manipulation
from .serialize import dumps, load_market, load_matching
from .verify import certificate, is_alpha_stable

OK, NEGATIVE, BAD_INPUT = 0, 1, 2
BENCH_HEADER = ["mechanism", "n", "m", "s_bar", "alpha_star", "bound", "time"]
GENERATORS = ("example1", "thm2", "thm6", "prop1", "subset-sum", "subset-sum-prop", "random")


class UsageError(Exception):
    pass


def _policy(text: str) -> Policy:
    try:
        return Policy(text)
    except ValueError:
        raise UsageError(f"unknown mechanism {text!r}; choose from "
                         + ", ".join(p.value for p in Policy)) from None


def _pick(text: str) -> PickPolicy:
    try:
        return PickPolicy.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _range(text: str) -> tuple:
    lo, sep, hi = text.partition(":")
    try:
        return (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise UsageError(f"expected N or LO:HI, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _nums(text: str) -> list[Fraction]:
    return [to_num(t.strip()) for t in text.split(",") if t.strip()]


def _require_proportional(m, policy: Policy) -> None:
    if policy is Policy.PROP_REMOVABLE and not m.is_proportional():
        raise UsageError("prop-removable needs a proportional instance (meta.proportional and u == s)")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    m = load_market(args.instance)
    policy = _policy(args.mechanism)
    _require_proportional(m, policy)
    report = solve(m, policy, _pick(args.pick))
    if args.json:
        doc = report.to_dict(m)
        if args.trace:
            doc["trace"] = format_trace(m, report.trace).splitlines()
        print(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        if args.trace:
            sys.stdout.write(format_trace(m, report.trace))
            print()
        print(report.to_text(m))
    return OK if report.bound_satisfied else NEGATIVE


def cmd_verify(args) -> int:
    m = load_market(args.instance)
    matching = load_matching(args.matching, m)
    alpha = parse_bound(args.alpha)
    if alpha < 1:
        raise UsageError("alpha must be >= 1")
    print(certificate(m, matching).report(m))
    result = is_alpha_stable(m, matching, alpha)
    print(f"alpha = {format_num(alpha)}")
    if result:
        print("stable: yes")
        return OK
    names = ",".join(m.label(c) for c in sorted(result.coalition))
    print("stable: no")
    print(f"blocking: h_{result.hospital + 1} via {{{names}}}")
    return NEGATIVE


def _generate(args):
    name = args.name
    if name == "example1":
        return example1()
    if name == "thm2":
        return thm2_market(to_num(args.s_bar), to_num(args.delta))
    if name == "thm6":
        return thm6_market(to_num(args.eps))
    if name == "prop1":
        return prop1_market(to_num(args.s_bar))
    if name in ("subset-sum", "subset-sum-prop"):
        if args.a is None or args.t is None:
            raise UsageError(f"{name} needs --a and --t")
        a = _ints(args.a)
        if name == "subset-sum":
            return subset_sum_market_additive(a, args.t, to_num(args.alpha))
        return subset_sum_market_proportional(a, args.t, to_num(args.eps))
    params = GeneratorParams(
        doctors=_range(args.doctors), hospitals=_range(args.hospitals),
        contracts_per_doctor=_range(args.per_doctor), max_contracts=args.max_contracts,
        s_bar=to_num(args.s_bar), size_denominator=args.size_denominator,
        utility_max=args.utility_max, proportional=args.proportional, seed=args.seed,
    )
    return random_market(params)


def cmd_generate(args) -> int:
    _emit(dumps(_generate(args)), args.output)
    return OK


def cmd_probe(args) -> int:
    m = load_market(args.instance)
    policy = _policy(args.mechanism)
    _require_proportional(m, policy)
    man = find_manipulation(m, policy, _pick(args.pick), limit=args.limit)
    print(f"mechanism: {policy.value}")
    print(describe(m, man))
    return OK if man is None else NEGATIVE


def _bench_one(job) -> list:
    policy, n, h, s_bar, seed, per_doctor, max_contracts, proportional = job
    m = random_market(GeneratorParams(
        doctors=(n, n), hospitals=(h, h), contracts_per_doctor=per_doctor,
        max_contracts=max_contracts, s_bar=s_bar, proportional=proportional, seed=seed,
    ))
    r = solve(m, policy)
    return [policy.value, n, h, format_num(m.s_bar), format_num(r.alpha_star),
            format_num(r.bound), f"{r.wall_time:.6f}", r.bound_satisfied]


def cmd_bench(args) -> int:
    policies = [_policy(t.strip()) for t in args.mechanisms.split(",") if t.strip()]
    if Policy.PROP_REMOVABLE in policies and not args.proportional:
        raise UsageError("prop-removable in a sweep needs --proportional")
    jobs = [
        (p, n, h, s, seed, _range(args.per_doctor), args.max_contracts, args.proportional)
        for p, n, h, s, seed in itertools.product(
            policies, _ints(args.doctors), _ints(args.hospitals), _nums(args.s_bar),
            range(args.seed_start, args.seed_start + args.seeds))
    ]
    if args.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    for row in rows:
        writer.writerow(row[:-1])
    _emit(buf.getvalue(), args.output)
    violated = [r for r in rows if not r[-1]]
    if violated:
        print(f"{len(violated)} run(s) exceeded their proven bound", file=sys.stderr)
        return NEGATIVE
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="budgetmatch",
                                     description="Matching markets with budget constraints.")
    sub = parser.add_subparsers(dest="command", required=True)
    mechanisms = [p.value for p in Policy]

    p = sub.add_parser("solve", help="run generalized DA and verify the outcome")
    p.add_argument("instance")
    p.add_argument("--mechanism", default="density", choices=mechanisms)
    p.add_argument("--pick", default="lowest", help="lowest | fifo | random:SEED")
    p.add_argument("--trace", action="store_true", help="print the iteration table")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check alpha-stability of a matching")
    p.add_argument("instance")
    p.add_argument("matching", help="JSON list of contract ids or labels")
    p.add_argument("--alpha", default="1", help="p/q, integer, or phi")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="write an instance file")
    p.add_argument("name", choices=GENERATORS)
    p.add_argument("-o", "--output")
    p.add_argument("--eps", default="1/10")
    p.add_argument("--s-bar", default="3/5")
    p.add_argument("--delta", default="1/5")
    p.add_argument("--alpha", default="11/10")
    p.add_argument("--a", help="comma-separated subset-sum items")
    p.add_argument("--t", type=int, help="subset-sum target")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--doctors", default="2:6")
    p.add_argument("--hospitals", default="1:3")
    p.add_argument("--per-doctor", default="1:3")
    p.add_argument("--max-contracts", type=int, default=12)
    p.add_argument("--size-denominator", type=int, default=20)
    p.add_argument("--utility-max", type=int, default=100)
    p.add_argument("--proportional", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("probe", help="search for a profitable doctor misreport")
    p.add_argument("instance")
    p.add_argument("--mechanism", default="density", choices=mechanisms)
    p.add_argument("--pick", default="lowest")
    p.add_argument("--limit", type=int, default=6, help="max contracts per doctor")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("bench", help="sweep random markets and write CSV")
    p.add_argument("--mechanisms", default="density,smallest-first")
    p.add_argument("--doctors", default="4")
    p.add_argument("--hospitals", default="2")
    p.add_argument("--s-bar", default="3/5")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--seed-start", type=int, default=0)
    p.add_argument("--per-doctor", default="1:3")
    p.add_argument("--max-contracts", type=int, default=12)
    p.add_argument("--proportional", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        return args.func(args)
    except (InvalidInput, ParameterError, SearchLimitExceeded, UsageError,
            ValueError, ZeroDivisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
