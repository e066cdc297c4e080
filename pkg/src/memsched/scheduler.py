"""Fixpoint schedulers for membership rules.

Three loops share one agenda discipline: a FIFO of rule indices with a
membership flag per rule, so a rule is queued at most once.  ``gi_fixpoint``
is the plain generic iteration, ``rgi_fixpoint`` additionally consumes
friends/obviated providers that may depend on the current store, and
``r_fixpoint`` is the rules loop driven by precompiled lists.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Iterable, Sequence

from .core import (
    DomainStore,
    MembershipRule,
    apply_body,
    apply_rule,
    fails_forever,
    holds,
)

if TYPE_CHECKING:
    from .precompile import CompiledRuleSet

Provider = Callable[[int, DomainStore], Sequence[int]]


class InvariantViolation(AssertionError):
    pass


@dataclass
class Counters:
    condition_tests: int = 0
    body_applications: int = 0
    rules_removed: int = 0
    solving_fired: int = 0

    def __iadd__(self, other: Counters) -> Counters:
        self.condition_tests += other.condition_tests
        self.body_applications += other.body_applications
        self.rules_removed += other.rules_removed
        self.solving_fired += other.solving_fired
        return self


@dataclass
class RunResult:
    store: DomainStore
    live: frozenset[int]
    relevance: list[int] = field(default_factory=list)
    counters: Counters = field(default_factory=Counters)


class SchedulerRun:
    """Mutable state of one scheduler execution: agenda G, live set F, store d."""

    def __init__(self, n: int, live: Iterable[int], store: DomainStore):
        self.live = bytearray(n)
        for i in live:
            self.live[i] = 1
        self.queued = bytearray(n)
        self.agenda: deque[int] = deque()
        self.store = store
        self.counters = Counters()
        self.relevance: list[int] = []
        for i in range(n):
            if self.live[i]:
                self.enqueue(i)

    def enqueue(self, i: int) -> None:
        if not self.queued[i]:
            self.queued[i] = 1
            self.agenda.append(i)

    def pop(self) -> int | None:
        # entries dropped via `discard` stay in the deque and are skipped here
        agenda, queued = self.agenda, self.queued
        while agenda:
            i = agenda.popleft()
            if queued[i]:
                queued[i] = 0
                return i
        return None

    def discard(self, indices: Iterable[int]) -> None:
        """Remove ``indices`` from both F and G."""
        live, queued = self.live, self.queued
        for i in indices:
            if live[i]:
                live[i] = 0
                self.counters.rules_removed += 1
            queued[i] = 0

    def requeue_live(self) -> None:
        """``G := G ∪ (F − G)``, in index order."""
        live, queued, agenda = self.live, self.queued, self.agenda
        for i in range(len(live)):
            if live[i] and not queued[i]:
                queued[i] = 1
                agenda.append(i)

    def live_set(self) -> frozenset[int]:
        return frozenset(i for i, f in enumerate(self.live) if f)

    def result(self) -> RunResult:
        return RunResult(self.store, self.live_set(), self.relevance, self.counters)

    def check_invariant(self, rules: Sequence[MembershipRule]) -> None:
        """Every live rule that is not queued must fix the current store."""
        d = self.store
        for i, r in enumerate(rules):
            if self.live[i] and not self.queued[i] and apply_rule(r, d)[1]:
                raise InvariantViolation(f"rule {i} is live, not queued, and changes {d}")


def update_default(
    live: Iterable[int],
    agenda: Iterable[int],
    rule: MembershipRule,
    d: DomainStore,
    changed: bool,
) -> set[int]:
    """``F − G`` when ``rule``'s condition held on ``d`` and applying it changed ``d``."""
    if changed and holds(rule.conditions, d):
        return set(live) - set(agenda)
    return set()


def gi_fixpoint(
    rules: Sequence[MembershipRule],
    start: DomainStore,
    *,
    live: Iterable[int] | None = None,
    check_invariant: bool = False,
) -> RunResult:
    """Least common fixpoint of ``rules`` above ``start`` by generic iteration.

    ``relevance`` lists, in order, the rules whose application changed the
    store.  ``live`` restricts the scheduled set (default: all rules).
    """
    n = len(rules)
    run = SchedulerRun(n, range(n) if live is None else live, start)
    counters = run.counters
    while run.store.masks is not None:
        g = run.pop()
        if g is None:
            break
        r = rules[g]
        counters.condition_tests += 1
        d = run.store
        if holds(r.conditions, d):
            counters.body_applications += 1
            new = apply_body(r, d)
            if new is not d:
                run.relevance.append(g)
                run.requeue_live()
                run.store = new
        if check_invariant:
            run.check_invariant(rules)
    return run.result()


def rgi_fixpoint(
    rules: Sequence[MembershipRule],
    start: DomainStore,
    friends_of: Provider,
    obviated_of: Provider,
    *,
    live: Iterable[int] | None = None,
    check_invariant: bool = False,
) -> RunResult:
    """Generic iteration that also applies friends and drops friends ∪ obviated.

    The providers are called as ``provider(g, d)`` with the selected rule
    index and the current store; rules are applied with their condition
    tests, friends included.
    """
    n = len(rules)
    run = SchedulerRun(n, range(n) if live is None else live, start)
    counters = run.counters
    while run.store.masks is not None:
        g = run.pop()
        if g is None:
            break
        d = run.store
        friends = list(friends_of(g, d))
        run.discard(friends)
        run.discard(obviated_of(g, d))
        new = d
        for f in (g, *friends):
            counters.condition_tests += 1
            new, changed = apply_rule(rules[f], new)
            if changed:
                counters.body_applications += 1
                run.relevance.append(f)
        if new != d:
            run.requeue_live()
            run.store = new
        if check_invariant:
            run.check_invariant(rules)
    return run.result()


def compiled_providers(compiled: CompiledRuleSet) -> tuple[Provider, Provider]:
    """Store-dependent friends/obviated providers derived from precompiled lists."""
    rules = compiled.rules

    def friends_of(g: int, d: DomainStore) -> Sequence[int]:
        cr = rules[g]
        return cr.friends if holds(cr.rule.conditions, d) else ()

    def obviated_of(g: int, d: DomainStore) -> Sequence[int]:
        cr = rules[g]
        if holds(cr.rule.conditions, d):
            return cr.obviated
        if not d.is_top and fails_forever(cr.rule.conditions, d):
            return (g,)
        return ()

    return friends_of, obviated_of


def r_fixpoint(
    compiled: CompiledRuleSet,
    start: DomainStore,
    live: Iterable[int] | None = None,
    *,
    check_invariant: bool = False,
) -> RunResult:
    """The rules loop driven by precompiled friends/obviated lists.

    On a successful condition test the selected body and then every friend's
    body are applied without further tests, and friends ∪ obviated leave F
    and G.  On a failed test the rule leaves F if its condition can no
    longer hold above the current store.  ``live`` defaults to every rule
    that can fire at all; the final live set is returned in ``RunResult.live``.
    """
    crs = compiled.rules
    n = len(crs)
    run = SchedulerRun(n, compiled.initial_live() if live is None else live, start)
    counters = run.counters
    while run.store.masks is not None:
        g = run.pop()
        if g is None:
            break
        cr = crs[g]
        conds = cr.rule.conditions
        counters.condition_tests += 1
        d = run.store
        if holds(conds, d):
            run.discard(cr.removed)
            if cr.solving:
                counters.solving_fired += 1
            new = apply_body(cr.rule, d)
            counters.body_applications += 1
            if new is not d:
                run.relevance.append(g)
            for f in cr.friends:
                before = new
                new = apply_body(crs[f].rule, new)
                counters.body_applications += 1
                if new is not before:
                    run.relevance.append(f)
            if new != d:
                run.requeue_live()
                run.store = new
        elif run.live[g] and fails_forever(conds, d):
            run.discard((g,))
        if check_invariant:
            run.check_invariant([cr.rule for cr in crs])
    return run.result()
