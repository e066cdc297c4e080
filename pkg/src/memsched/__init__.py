"""Scheduling membership rules for finite-domain constraint propagation."""

from .core import (
    TOP,
    Conclusion,
    Condition,
    DomainStore,
    MembershipRule,
    UsageError,
    ValueUniverse,
    apply_body,
    apply_rule,
    body_noop,
    fails_forever,
    holds,
    rule,
    store_leq,
    witness,
)
from .precompile import CompiledRule, CompiledRuleSet, compile_ruleset, compute_friends_obviated
from .rulegen import ConstraintDef, generate_canonical_rules, hyperarc_closure, is_valid_rule
from .scheduler import Counters, RunResult, gi_fixpoint, r_fixpoint, rgi_fixpoint, update_default
from .solver import CspConstraint, CspInstance, SearchState, propagate, search_bench, split

__version__ = "0.1.0"
