"""Finite-domain stores and membership rules.

Domains are small, so every value set is an ``int`` bitmask: bit ``i`` of a
component is set when the ``i``-th value of that variable's universe is still
present.  A store with an empty component does not exist as such; it is
collapsed into the single failure element :data:`TOP`, the greatest element of
the ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence


class UsageError(ValueError):
    """Raised when an operation is called outside its contract."""


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def nonempty_submasks(mask: int) -> list[int]:
    """All non-empty submasks of ``mask``, in increasing numeric order."""
    out = []
    sub = mask
    while sub:
        out.append(sub)
        sub = (sub - 1) & mask
    out.reverse()
    return out


@dataclass(frozen=True)
class ValueUniverse:
    """Per-variable ordered value names.

    ``values[i]`` lists the value names of variable ``i``; a value is
    addressed by its position in that list.
    """

    values: tuple[tuple[str, ...], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        values = tuple(tuple(v) for v in self.values)
        object.__setattr__(self, "values", values)
        for i, vs in enumerate(values):
            if not vs:
                raise UsageError(f"variable {i} has an empty universe")
            if len(set(vs)) != len(vs):
                raise UsageError(f"duplicate value names for variable {i}: {vs}")
        names = tuple(self.names) or tuple(f"X{i + 1}" for i in range(len(values)))
        if len(names) != len(values):
            raise UsageError("one name per variable required")
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate variable names: {names}")
        object.__setattr__(self, "names", names)

    @classmethod
    def uniform(cls, n: int, values: Sequence[str], names: Sequence[str] = ()) -> ValueUniverse:
        return cls(tuple(tuple(values) for _ in range(n)), tuple(names))

    def __len__(self) -> int:
        return len(self.values)

    def full_mask(self, var: int) -> int:
        return (1 << len(self.values[var])) - 1

    def index(self, var: int, value: str) -> int:
        try:
            return self.values[var].index(value)
        except ValueError:
            raise UsageError(
                f"value {value!r} not in the universe of {self.names[var]}"
            ) from None

    def mask(self, var: int, values: Iterable[str], *, strict: bool = True) -> int:
        """Bitmask of ``values`` for ``var``; unknown names raise unless ``strict`` is off."""
        m = 0
        for v in values:
            if v in self.values[var]:
                m |= 1 << self.values[var].index(v)
            elif strict:
                self.index(var, v)
        return m

    def value_names(self, var: int, mask: int) -> list[str]:
        return [self.values[var][i] for i in bits(mask)]

    def var_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UsageError(f"unknown variable {name!r}") from None

    def full_store(self) -> DomainStore:
        return DomainStore(tuple(self.full_mask(i) for i in range(len(self))))

    def store(self, *domains: Iterable[str] | None) -> DomainStore:
        """Build a store from value names; ``None`` means the full domain."""
        if len(domains) != len(self):
            raise UsageError(f"expected {len(self)} domains, got {len(domains)}")
        return DomainStore.of(
            self.full_mask(i) if d is None else self.mask(i, d)
            for i, d in enumerate(domains)
        )

    def format_store(self, d: DomainStore) -> str:
        if d.is_top:
            return "TOP"
        parts = (
            f"{name}={{{','.join(self.value_names(i, m))}}}"
            for i, (name, m) in enumerate(zip(self.names, d.masks))
        )
        return " ".join(parts)

    def project(self, scope: Sequence[int]) -> ValueUniverse:
        return ValueUniverse(
            tuple(self.values[v] for v in scope), tuple(self.names[v] for v in scope)
        )


@dataclass(frozen=True)
class DomainStore:
    """Element of the quotient ordering: either TOP or a tuple of non-empty masks.

    Use :meth:`of` to build a store from raw masks; it normalizes any empty
    component to :data:`TOP`.  ``masks`` is ``None`` exactly for TOP.
    """

    masks: tuple[int, ...] | None

    @classmethod
    def of(cls, masks: Iterable[int]) -> DomainStore:
        masks = tuple(masks)
        if not all(masks):
            return TOP
        return cls(masks)

    @property
    def is_top(self) -> bool:
        return self.masks is None

    def __len__(self) -> int:
        if self.masks is None:
            raise UsageError("TOP has no components")
        return len(self.masks)

    def __getitem__(self, var: int) -> int:
        if self.masks is None:
            raise UsageError("TOP has no components")
        return self.masks[var]

    def replace(self, var: int, mask: int) -> DomainStore:
        if self.masks is None:
            return TOP
        if not mask:
            return TOP
        masks = list(self.masks)
        masks[var] = mask
        return DomainStore(tuple(masks))

    def is_fixed(self) -> bool:
        """True when every component is a singleton."""
        return self.masks is not None and all(m & (m - 1) == 0 for m in self.masks)

    def key(self) -> str:
        """Canonical serialized form, used as a set key for revisit detection."""
        if self.masks is None:
            return "TOP"
        return ".".join(format(m, "x") for m in self.masks)

    def __repr__(self) -> str:
        if self.masks is None:
            return "TOP"
        return f"DomainStore({', '.join(bin(m) for m in self.masks)})"


TOP = DomainStore(None)


@dataclass(frozen=True)
class Condition:
    """``var ∈ S`` with ``S`` given as a bitmask over ``var``'s universe."""

    var: int
    mask: int


@dataclass(frozen=True)
class Conclusion:
    """``var ≠ value``."""

    var: int
    value: int


@dataclass(frozen=True)
class MembershipRule:
    conditions: tuple[Condition, ...]
    conclusions: tuple[Conclusion, ...]
    name: str = ""
    # (var, mask of values removed) per conclusion variable, derived
    removals: tuple[tuple[int, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        conds = tuple(self.conditions)
        seen = set()
        for c in conds:
            if c.var in seen:
                raise UsageError(f"rule {self.name or '?'}: variable {c.var} conditioned twice")
            seen.add(c.var)
        concls = tuple(dict.fromkeys(self.conclusions))
        object.__setattr__(self, "conditions", conds)
        object.__setattr__(self, "conclusions", concls)
        removal: dict[int, int] = {}
        for c in concls:
            removal[c.var] = removal.get(c.var, 0) | (1 << c.value)
        object.__setattr__(self, "removals", tuple(removal.items()))

    @property
    def is_equality_rule(self) -> bool:
        return all(c.mask and c.mask & (c.mask - 1) == 0 for c in self.conditions)

    def check(self, universe: ValueUniverse) -> None:
        """Raise :class:`UsageError` unless the rule fits ``universe``."""
        n = len(universe)
        for c in self.conditions:
            if not 0 <= c.var < n:
                raise UsageError(f"rule {self.name}: condition variable {c.var} out of range")
        for c in self.conclusions:
            if not 0 <= c.var < n:
                raise UsageError(f"rule {self.name}: conclusion variable {c.var} out of range")
            if not 0 <= c.value < len(universe.values[c.var]):
                raise UsageError(f"rule {self.name}: value {c.value} not in domain of {c.var}")

    def normalized(self, universe: ValueUniverse) -> MembershipRule:
        """Intersect every condition set with its variable's universe."""
        self.check(universe)
        conds = tuple(Condition(c.var, c.mask & universe.full_mask(c.var)) for c in self.conditions)
        return MembershipRule(conds, self.conclusions, self.name)

    def describe(self, universe: ValueUniverse) -> str:
        conds = ", ".join(
            f"{universe.names[c.var]}∈{{{','.join(universe.value_names(c.var, c.mask))}}}"
            for c in self.conditions
        )
        concls = ", ".join(
            f"{universe.names[c.var]}≠{universe.values[c.var][c.value]}" for c in self.conclusions
        )
        return f"{conds} → {concls}" if conds else f"→ {concls}"


def rule(
    universe: ValueUniverse,
    conditions: dict[str, Iterable[str]],
    conclusions: Iterable[tuple[str, str]],
    name: str = "",
) -> MembershipRule:
    """Build a rule from variable and value names.

    >>> u = ValueUniverse.uniform(2, "ab")
    >>> rule(u, {"X1": "a"}, [("X2", "a")]).describe(u)
    'X1∈{a} → X2≠a'
    """
    conds = tuple(
        Condition(universe.var_index(v), universe.mask(universe.var_index(v), vals, strict=False))
        for v, vals in conditions.items()
    )
    concls = tuple(
        Conclusion(universe.var_index(v), universe.index(universe.var_index(v), a))
        for v, a in conclusions
    )
    return MembershipRule(conds, concls, name)


def store_leq(d: DomainStore, e: DomainStore) -> bool:
    """``d ⊑ e``: ``e`` is TOP or each component of ``e`` is a subset of ``d``'s."""
    if e.masks is None:
        return True
    if d.masks is None:
        return False
    if len(d.masks) != len(e.masks):
        raise UsageError("stores over different numbers of variables")
    return all(em & ~dm == 0 for dm, em in zip(d.masks, e.masks))


def holds(conditions: Sequence[Condition], d: DomainStore) -> bool:
    masks = d.masks
    if masks is None:
        return True
    for c in conditions:
        if masks[c.var] & ~c.mask:
            return False
    return True


def apply_body(r: MembershipRule, d: DomainStore) -> DomainStore:
    """Apply the conclusions of ``r`` without testing its conditions."""
    masks = d.masks
    if masks is None:
        return TOP
    out = None
    for var, rm in r.removals:
        m = masks[var]
        if m & rm:
            if out is None:
                out = list(masks)
            m = out[var] & ~rm
            if not m:
                return TOP
            out[var] = m
    if out is None:
        return d
    return DomainStore(tuple(out))


def apply_rule(r: MembershipRule, d: DomainStore) -> tuple[DomainStore, bool]:
    """Apply ``r`` to ``d``; returns the new store and whether it differs from ``d``."""
    if d.masks is None or not holds(r.conditions, d):
        return d, False
    out = apply_body(r, d)
    return out, out is not d


def body_noop(r: MembershipRule, d: DomainStore) -> bool:
    """True iff none of the values ``r`` removes is still present in ``d``."""
    if d.masks is None:
        raise UsageError("body_noop is undefined on TOP")
    masks = d.masks
    return all(masks[var] & rm == 0 for var, rm in r.removals)


def fails_forever(conditions: Sequence[Condition], d: DomainStore) -> bool:
    """True iff no non-TOP store above ``d`` satisfies ``conditions``."""
    if d.masks is None:
        raise UsageError("fails_forever is undefined on TOP")
    masks = d.masks
    return any(masks[c.var] & c.mask == 0 for c in conditions)


def witness(conditions: Sequence[Condition], universe: ValueUniverse) -> DomainStore:
    """The least store on which ``conditions`` hold (TOP if none is non-TOP)."""
    masks = [universe.full_mask(i) for i in range(len(universe))]
    for c in conditions:
        masks[c.var] &= c.mask
    return DomainStore.of(masks)


def all_stores(universe: ValueUniverse) -> list[DomainStore]:
    """Every non-TOP store over ``universe``; exponential, meant for small cases."""
    choices = [nonempty_submasks(universe.full_mask(i)) for i in range(len(universe))]
    return [DomainStore(ms) for ms in product(*choices)]


def stores_above(d: DomainStore) -> list[DomainStore]:
    """Every non-TOP store ``e`` with ``d ⊑ e``."""
    if d.masks is None:
        return []
    return [DomainStore(ms) for ms in product(*(nonempty_submasks(m) for m in d.masks))]
