"""Per-rule friends and obviated lists, computed once before solving."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    MembershipRule,
    ValueUniverse,
    apply_body,
    body_noop,
    fails_forever,
    witness,
)
from .scheduler import gi_fixpoint


@dataclass(frozen=True)
class CompiledRule:
    rule: MembershipRule
    friends: tuple[int, ...]
    obviated: tuple[int, ...]
    solving: bool
    never_fires: bool = False
    removed: frozenset[int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "removed", frozenset(self.friends) | frozenset(self.obviated))


@dataclass(frozen=True)
class CompiledRuleSet:
    name: str
    universe: ValueUniverse
    rules: tuple[CompiledRule, ...]

    def __len__(self) -> int:
        return len(self.rules)

    @property
    def plain_rules(self) -> list[MembershipRule]:
        return [cr.rule for cr in self.rules]

    def initial_live(self) -> list[int]:
        """Rules that can fire on some non-TOP store."""
        return [i for i, cr in enumerate(self.rules) if not cr.never_fires]

    @property
    def solving_count(self) -> int:
        return sum(cr.solving for cr in self.rules)

    def removal_sizes(self) -> list[int]:
        """``|friends ∪ obviated|`` per rule."""
        return [len(cr.removed) for cr in self.rules]

    def size_distribution(self) -> list[tuple[int, int]]:
        """``(size, how many rules)`` for the non-solving rules, largest size first."""
        counts = Counter(len(cr.removed) for cr in self.rules if not cr.solving)
        return sorted(counts.items(), reverse=True)

    def average_size(self) -> float:
        sizes = self.removal_sizes()
        return sum(sizes) / len(sizes) if sizes else 0.0


def compute_friends_obviated(
    index: int, rules: Sequence[MembershipRule], universe: ValueUniverse
) -> tuple[list[int], list[int]]:
    """Friends and obviated lists of ``rules[index]`` (rule indices, ascending for obviated).

    The rule's body is applied to the least store satisfying its condition
    and generic iteration over all of ``rules`` is run from there.  Friends
    are the rules that changed the store during that run, in order; every
    other rule whose body is a no-op at the resulting fixpoint, or whose
    condition cannot hold above it, is obviated.
    """
    r = rules[index]
    start = witness(r.conditions, universe)
    if start.is_top:
        return [], [index]
    run = gi_fixpoint(rules, apply_body(r, start))
    friends = run.relevance
    e = run.store
    in_friends = set(friends)
    if e.is_top:
        # every rule is stable above TOP
        obviated = [i for i in range(len(rules)) if i not in in_friends]
    else:
        obviated = [
            i
            for i, other in enumerate(rules)
            if i not in in_friends
            and (body_noop(other, e) or fails_forever(other.conditions, e))
        ]
    return list(friends), obviated


def compile_ruleset(
    rules: Sequence[MembershipRule], universe: ValueUniverse, name: str = "c"
) -> CompiledRuleSet:
    rules = [r.normalized(universe) for r in rules]
    n = len(rules)
    compiled = []
    for i, r in enumerate(rules):
        friends, obviated = compute_friends_obviated(i, rules, universe)
        never = witness(r.conditions, universe).is_top
        solving = len(friends) + len(obviated) == n
        compiled.append(CompiledRule(r, tuple(friends), tuple(obviated), solving, never))
    return CompiledRuleSet(name, universe, tuple(compiled))
