"""Valid membership rules from explicit constraint tables.

A rule ``y1 ∈ S1, ..., yk ∈ Sk → z ≠ a`` is valid for a constraint when no
tuple of the constraint that meets every condition has ``a`` at ``z``.

The canonical rule set of a constraint is built as follows:

1. For each conclusion ``z ≠ a`` enumerate condition vectors ``(S_i)`` over
   the variables other than ``z`` (``S_i = D_i`` means no condition on
   ``x_i``), keeping those that give a valid rule and are met by at least
   one tuple of the constraint.
2. Keep only the maximal vectors: a vector is dropped when another kept one
   is componentwise a superset of it.
3. Rules with the same condition vector are merged into one rule carrying
   all of their conclusions.

A condition met by no tuple can only be reached on a store that some other
maximal rule already drives to failure, so such vectors add nothing; the
exception is a constraint with no tuples at all, which gets the single
unconditional rule removing every value.  Conditions on ``z`` itself are not
enumerated: with ``a ∈ S_z`` widening ``S_z`` to ``D_z`` only adds tuples
with ``z ≠ a``, and with ``a ∉ S_z`` the rule is a no-op.

``equality_only`` restricts every condition set to a singleton.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .core import (
    Conclusion,
    Condition,
    DomainStore,
    MembershipRule,
    TOP,
    UsageError,
    ValueUniverse,
    bits,
    nonempty_submasks,
)

MAX_CANDIDATES = 2_000_000


class GenerationTooLarge(UsageError):
    pass


@dataclass(frozen=True)
class ConstraintDef:
    """An explicitly tabulated constraint; tuples hold value indices."""

    name: str
    universe: ValueUniverse
    tuples: frozenset[tuple[int, ...]]

    def __post_init__(self):
        n = len(self.universe)
        tuples = frozenset(tuple(t) for t in self.tuples)
        for t in tuples:
            if len(t) != n:
                raise UsageError(f"{self.name}: tuple {t} does not have arity {n}")
            for i, v in enumerate(t):
                if not 0 <= v < len(self.universe.values[i]):
                    raise UsageError(f"{self.name}: tuple {t} leaves the universe of variable {i}")
        object.__setattr__(self, "tuples", tuples)

    @classmethod
    def from_names(
        cls, name: str, universe: ValueUniverse, rows: Iterable[Sequence[str]]
    ) -> ConstraintDef:
        tuples = []
        for row in rows:
            if len(row) != len(universe):
                raise UsageError(f"{name}: tuple {tuple(row)} does not have arity {len(universe)}")
            tuples.append(tuple(universe.index(i, v) for i, v in enumerate(row)))
        return cls(name, universe, frozenset(tuples))

    @property
    def arity(self) -> int:
        return len(self.universe)

    def named_tuples(self) -> list[tuple[str, ...]]:
        vals = self.universe.values
        return sorted(tuple(vals[i][v] for i, v in enumerate(t)) for t in self.tuples)

    def contains(self, d: DomainStore) -> bool:
        """True when ``d`` is fixed to a tuple of the constraint."""
        if d.masks is None or not d.is_fixed():
            return False
        return tuple(m.bit_length() - 1 for m in d.masks) in self.tuples


def is_valid_rule(r: MembershipRule, c: ConstraintDef) -> bool:
    n = c.arity
    for cond in r.conditions:
        if not 0 <= cond.var < n:
            raise UsageError(f"condition variable {cond.var} out of range for {c.name}")
    for concl in r.conclusions:
        if not 0 <= concl.var < n:
            raise UsageError(f"conclusion variable {concl.var} out of range for {c.name}")
    for t in c.tuples:
        if all(cond.mask >> t[cond.var] & 1 for cond in r.conditions):
            if any(t[concl.var] == concl.value for concl in r.conclusions):
                return False
    return True


def _supported(t: tuple[int, ...], vector: Sequence[int]) -> bool:
    return all(m >> v & 1 for v, m in zip(t, vector))


def generate_canonical_rules(
    c: ConstraintDef, equality_only: bool = False, *, max_candidates: int = MAX_CANDIDATES
) -> list[MembershipRule]:
    u = c.universe
    n = c.arity
    full = [u.full_mask(i) for i in range(n)]

    def choices(i: int) -> list[int]:
        if equality_only:
            return [full[i]] + [1 << v for v in bits(full[i]) if 1 << v != full[i]]
        return nonempty_submasks(full[i])

    per_var = [choices(i) for i in range(n)]
    total = 0
    for z in range(n):
        k = 1
        for i in range(n):
            if i != z:
                k *= len(per_var[i])
        total += k * len(u.values[z])
    if total > max_candidates:
        raise GenerationTooLarge(
            f"{c.name}: {total} candidate condition vectors exceed the limit of {max_candidates} "
            f"(domain sizes {[len(v) for v in u.values]})"
        )

    tuples = sorted(c.tuples)
    # the vectors for conclusion variable z; most general first
    vectors_by_z = []
    for z in range(n):
        axes = [per_var[i] if i != z else [full[z]] for i in range(n)]
        vecs = list(product(*axes))
        vecs.sort(key=lambda v: -sum(m.bit_count() for m in v))
        vectors_by_z.append(vecs)

    merged: dict[tuple[int, ...], list[Conclusion]] = {}
    if not tuples:
        merged[tuple(full)] = [Conclusion(z, a) for z in range(n) for a in bits(full[z])]
    else:
        for z in range(n):
            for a in bits(full[z]):
                bad = [t for t in tuples if t[z] == a]
                good = [t for t in tuples if t[z] != a]
                kept: list[tuple[int, ...]] = []
                for vec in vectors_by_z[z]:
                    if any(_supported(t, vec) for t in bad):
                        continue
                    if not any(_supported(t, vec) for t in good):
                        continue
                    if any(all(k & m == m for k, m in zip(other, vec)) for other in kept):
                        continue
                    kept.append(vec)
                for vec in kept:
                    merged.setdefault(vec, []).append(Conclusion(z, a))

    rules = []
    for vec, concls in merged.items():
        conds = tuple(Condition(i, m) for i, m in enumerate(vec) if m != full[i])
        rules.append(MembershipRule(conds, tuple(concls), f"{c.name}_{len(rules)}"))
    return rules


def hyperarc_closure(c: ConstraintDef, d: DomainStore) -> DomainStore:
    """Remove every value without a supporting tuple inside ``d``."""
    if d.masks is None:
        raise UsageError("hyperarc_closure needs a non-TOP store")
    masks = d.masks
    out = [0] * c.arity
    for t in c.tuples:
        if _supported(t, masks):
            for i, v in enumerate(t):
                out[i] |= 1 << v
    return DomainStore.of(out) if out else d


def brute_force_solutions(
    universe: ValueUniverse,
    constraints: Iterable[tuple[ConstraintDef, Sequence[int]]],
    start: DomainStore | None = None,
) -> set[tuple[int, ...]]:
    """All assignments inside ``start`` satisfying every ``(constraint, scope)``."""
    start = universe.full_store() if start is None else start
    if start is TOP or start.masks is None:
        return set()
    constraints = list(constraints)
    out = set()
    for t in product(*(list(bits(m)) for m in start.masks)):
        if all(tuple(t[v] for v in scope) in c.tuples for c, scope in constraints):
            out.add(t)
    return out
