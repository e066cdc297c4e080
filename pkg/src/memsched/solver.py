"""Propagation over several constraints, splitting, and the randomized benchmark.

Each constraint keeps its own compiled rule set over its local variables and
is scheduled on its own; a constraint is re-activated when another one
shrinks a variable it shares.  Under the R engine every constraint also
keeps its live rule set between propagation rounds of a branch: rules that
left F stay out for every store above the fixpoint where they left.
"""

from __future__ import annotations

import csv
import random
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence, TextIO

from .core import DomainStore, TOP, UsageError, ValueUniverse, bits
from .precompile import CompiledRuleSet, compile_ruleset
from .rulegen import ConstraintDef, generate_canonical_rules
from .scheduler import Counters, gi_fixpoint, r_fixpoint

Engine = Literal["gi", "r"]
ENGINES = ("gi", "r")
CSV_COLUMNS = (
    "seed",
    "engine",
    "csp",
    "nodes",
    "fixpoints",
    "condition_tests",
    "body_applications",
    "rules_removed",
    "wall_clock_ms",
)


@dataclass(frozen=True)
class CspConstraint:
    scope: tuple[int, ...]
    compiled: CompiledRuleSet
    table: ConstraintDef | None = None


@dataclass(frozen=True)
class CspInstance:
    name: str
    universe: ValueUniverse
    constraints: tuple[CspConstraint, ...]
    watchers: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.universe)
        watch: list[list[int]] = [[] for _ in range(n)]
        for ci, con in enumerate(self.constraints):
            if len(con.scope) != len(con.compiled.universe):
                raise UsageError(f"constraint {ci}: scope length differs from its rule set's arity")
            for pos, v in enumerate(con.scope):
                if not 0 <= v < n:
                    raise UsageError(f"constraint {ci}: variable {v} out of range")
                if con.compiled.universe.values[pos] != self.universe.values[v]:
                    raise UsageError(
                        f"constraint {ci}: values of {self.universe.names[v]} differ from the CSP's"
                    )
                watch[v].append(ci)
        object.__setattr__(self, "watchers", tuple(tuple(w) for w in watch))

    @classmethod
    def single(
        cls, compiled: CompiledRuleSet, table: ConstraintDef | None = None
    ) -> CspInstance:
        scope = tuple(range(len(compiled.universe)))
        return cls(compiled.name, compiled.universe, (CspConstraint(scope, compiled, table),))

    @classmethod
    def from_tables(
        cls,
        name: str,
        universe: ValueUniverse,
        constraints: Iterable[tuple[ConstraintDef, Sequence[int]]],
        equality_only: bool = False,
    ) -> CspInstance:
        """Generate and compile canonical rules for every ``(table, scope)`` pair."""
        cons = []
        for table, scope in constraints:
            rules = generate_canonical_rules(table, equality_only)
            compiled = compile_ruleset(rules, table.universe, table.name)
            cons.append(CspConstraint(tuple(scope), compiled, table))
        return cls(name, universe, tuple(cons))

    def satisfied_by(self, d: DomainStore) -> bool:
        """Check a fixed store against every tabulated constraint."""
        if not d.is_fixed():
            return False
        for con in self.constraints:
            if con.table is not None:
                local = DomainStore(tuple(d.masks[v] for v in con.scope))
                if not con.table.contains(local):
                    return False
        return True


@dataclass
class SearchState:
    """Current node of a search plus the trail of pending snapshots."""

    store: DomainStore
    live: list[frozenset[int] | None]
    solved: list[bool]
    rng: random.Random
    trail: list[tuple] = field(default_factory=list)
    visited: set[str] = field(default_factory=set)
    counters: Counters = field(default_factory=Counters)

    @classmethod
    def initial(
        cls, csp: CspInstance, engine: Engine, seed: int = 0, start: DomainStore | None = None
    ) -> SearchState:
        if engine not in ENGINES:
            raise UsageError(f"unknown engine {engine!r}")
        live: list[frozenset[int] | None] = [
            frozenset(con.compiled.initial_live()) if engine == "r" else None
            for con in csp.constraints
        ]
        store = csp.universe.full_store() if start is None else start
        return cls(store, live, [False] * len(csp.constraints), random.Random(seed))

    def snapshot(self, store: DomainStore | None = None, touched=None) -> tuple:
        return (self.store if store is None else store, tuple(self.live), tuple(self.solved), touched)

    def push(self, snap: tuple) -> None:
        self.trail.append(snap)

    def pop(self):
        """Restore the most recent snapshot; returns the variables it marks as touched."""
        store, live, solved, touched = self.trail.pop()
        self.store = store
        self.live = list(live)
        self.solved = list(solved)
        return touched


def _project(d: DomainStore, scope: Sequence[int]) -> DomainStore:
    masks = d.masks
    return DomainStore(tuple(masks[v] for v in scope))


def propagate(
    csp: CspInstance,
    state: SearchState,
    engine: Engine,
    touched: Iterable[int] | None = None,
) -> bool:
    """Run every active constraint to its local fixpoint until none is active.

    Initially active are the constraints on a ``touched`` variable, or all
    of them.  Returns False when the store becomes TOP.
    """
    if state.store.masks is None:
        raise UsageError("propagate needs a non-TOP store")
    n_cons = len(csp.constraints)
    if touched is None:
        order = list(range(n_cons))
    else:
        order = sorted({ci for v in touched for ci in csp.watchers[v]})
    active = deque(order)
    queued = [False] * n_cons
    for ci in order:
        queued[ci] = True

    while active:
        ci = active.popleft()
        queued[ci] = False
        if state.solved[ci]:
            continue
        con = csp.constraints[ci]
        local = _project(state.store, con.scope)
        if engine == "r":
            res = r_fixpoint(con.compiled, local, state.live[ci])
            state.live[ci] = res.live
        else:
            res = gi_fixpoint(con.compiled.plain_rules, local, live=con.compiled.initial_live())
        state.counters += res.counters
        if res.store.masks is None:
            state.store = TOP
            return False
        if res.store != local:
            masks = list(state.store.masks)
            for pos, v in enumerate(con.scope):
                m = res.store.masks[pos]
                if m != masks[v]:
                    masks[v] = m
                    for other in csp.watchers[v]:
                        if other != ci and not queued[other]:
                            queued[other] = True
                            active.append(other)
            state.store = DomainStore(tuple(masks))
        if res.store.is_fixed() or (engine == "r" and not state.live[ci]):
            state.solved[ci] = True
    return True


def split(
    state: SearchState, var: int, value: int, kind: Literal["assign", "remove"] = "assign"
) -> tuple[tuple, tuple]:
    """Snapshots of the two children of ``state`` for ``var``/``value``.

    The child matching ``kind`` comes first.  Both inherit the live sets.
    """
    d = state.store
    if d.masks is None:
        raise UsageError("cannot split TOP")
    m = d.masks[var]
    if m & (m - 1) == 0:
        raise UsageError(f"variable {var} already has a singleton domain")
    bit = 1 << value
    if not m & bit:
        raise UsageError(f"value {value} is not in the domain of variable {var}")
    assigned = state.snapshot(d.replace(var, bit), (var,))
    removed = state.snapshot(d.replace(var, m & ~bit), (var,))
    if kind == "assign":
        return assigned, removed
    if kind == "remove":
        return removed, assigned
    raise UsageError(f"unknown split kind {kind!r}")


@dataclass
class BenchReport:
    csp: str
    engine: str
    seed: int
    mode: str
    nodes: int
    fixpoints: int
    failures: int
    condition_tests: int
    body_applications: int
    rules_removed: int
    solving_fired: int
    wall_clock_ms: float
    solutions: frozenset[tuple[int, ...]]
    visited: frozenset[str]

    def csv_row(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}


def search_bench(
    csp: CspInstance,
    engine: Engine,
    seed: int = 0,
    mode: Literal["randomized_tree", "all_solutions"] = "randomized_tree",
    start: DomainStore | None = None,
) -> BenchReport:
    """Depth-first search with propagation at every node.

    ``randomized_tree`` picks a random unfixed variable, then a random value
    of it, then randomly whether the assigning or the removing child is
    explored first.  Every fixpoint reached is recorded, solutions included,
    and a node whose fixpoint was already recorded is not expanded again.

    ``all_solutions`` labels the first unfixed variable with each of its
    values in order and collects the solutions.
    """
    if mode not in ("randomized_tree", "all_solutions"):
        raise UsageError(f"unknown mode {mode!r}")
    state = SearchState.initial(csp, engine, seed, start)
    state.push(state.snapshot())
    nodes = failures = fixpoints = 0
    solutions = set()
    t0 = time.perf_counter()
    while state.trail:
        touched = state.pop()
        nodes += 1
        if not propagate(csp, state, engine, touched):
            failures += 1
            continue
        d = state.store
        if mode == "randomized_tree":
            key = d.key()
            if key in state.visited:
                continue
            state.visited.add(key)
        fixpoints += 1
        if d.is_fixed():
            if csp.satisfied_by(d):
                solutions.add(tuple(m.bit_length() - 1 for m in d.masks))
            continue
        unfixed = [v for v, m in enumerate(d.masks) if m & (m - 1)]
        if mode == "randomized_tree":
            rng = state.rng
            var = rng.choice(unfixed)
            value = rng.choice(list(bits(d.masks[var])))
            kind = rng.choice(("assign", "remove"))
            first, second = split(state, var, value, kind)
            state.push(second)
            state.push(first)
        else:
            var = unfixed[0]
            for value in reversed(list(bits(d.masks[var]))):
                state.push(state.snapshot(d.replace(var, 1 << value), (var,)))
    elapsed = (time.perf_counter() - t0) * 1000.0
    c = state.counters
    return BenchReport(
        csp=csp.name,
        engine=engine,
        seed=seed,
        mode=mode,
        nodes=nodes,
        fixpoints=fixpoints,
        failures=failures,
        condition_tests=c.condition_tests,
        body_applications=c.body_applications,
        rules_removed=c.rules_removed,
        solving_fired=c.solving_fired,
        wall_clock_ms=round(elapsed, 3),
        solutions=frozenset(solutions),
        visited=frozenset(state.visited),
    )


def write_csv(reports: Iterable[BenchReport], out: TextIO) -> None:
    writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.csv_row())
