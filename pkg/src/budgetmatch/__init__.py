"""Stable matching with budget constraints: mechanisms, verifier, instances."""

from .choice import Policy, make_choice, matroid_gamma, policy_factory
from .errors import (DuplicateOffer, InvalidInput, InvariantViolation, ParameterError,
                     SearchLimitExceeded)
from .exact import PHI, format_num, to_num
from .gda import FIFO, LOWEST_INDEX, PickPolicy, format_trace, run_gda
from .market import Contract, Market, MarketBuilder, validate_market
from .mechanism import RunReport, proven_bound, solve
from .probe import Manipulation, find_manipulation
from .serialize import dumps, load_market, loads, save_market
from .verify import alpha_star, certificate, is_alpha_stable

__all__ = [
    "Contract", "DuplicateOffer", "FIFO", "InvalidInput", "InvariantViolation", "LOWEST_INDEX",
    "Manipulation", "Market", "MarketBuilder", "PHI", "ParameterError", "PickPolicy", "Policy",
    "RunReport", "SearchLimitExceeded", "alpha_star", "certificate", "dumps", "find_manipulation",
    "format_num", "format_trace", "is_alpha_stable", "load_market", "loads", "make_choice",
    "matroid_gamma", "policy_factory", "proven_bound", "run_gda", "save_market", "solve",
    "to_num", "validate_market",
]
