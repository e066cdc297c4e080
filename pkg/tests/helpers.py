"""Conversions between package objects and the name-based oracle model."""

from __future__ import annotations

import random
from itertools import product

from memsched.core import DomainStore, MembershipRule, ValueUniverse
from memsched.rulegen import ConstraintDef


def to_named(d: DomainStore, u: ValueUniverse):
    if d.is_top:
        return None
    return tuple(frozenset(u.value_names(i, m)) for i, m in enumerate(d.masks))


def from_named(d, u: ValueUniverse) -> DomainStore:
    if d is None:
        from memsched.core import TOP

        return TOP
    return u.store(*d)


def rule_to_named(r: MembershipRule, u: ValueUniverse):
    conds = {c.var: frozenset(u.value_names(c.var, c.mask)) for c in r.conditions}
    concls = [(c.var, u.values[c.var][c.value]) for c in r.conclusions]
    return conds, concls


def named_tuples(c: ConstraintDef):
    return [tuple(c.universe.values[i][v] for i, v in enumerate(t)) for t in c.tuples]


def random_constraint(
    rng: random.Random,
    max_arity: int = 3,
    max_values: int = 3,
    min_arity: int = 1,
    min_values: int = 1,
) -> ConstraintDef:
    n = rng.randint(min_arity, max_arity)
    sizes = [rng.randint(min_values, max_values) for _ in range(n)]
    u = ValueUniverse(tuple(tuple("abcdef"[:s]) for s in sizes))
    density = rng.random()
    rows = [t for t in product(*(range(s) for s in sizes)) if rng.random() < density]
    return ConstraintDef(f"rand{n}", u, frozenset(rows))


def binary_tables_two_values():
    """Every constraint on two variables over {a, b}: 16 tables."""
    u = ValueUniverse.uniform(2, "ab")
    cells = list(product(range(2), range(2)))
    for mask in range(1 << len(cells)):
        rows = [cells[k] for k in range(len(cells)) if mask >> k & 1]
        yield ConstraintDef(f"bin{mask}", u, frozenset(rows))


def random_table(rng: random.Random, name: str, universe: ValueUniverse) -> ConstraintDef:
    density = rng.random()
    sizes = [len(v) for v in universe.values]
    rows = [t for t in product(*(range(s) for s in sizes)) if rng.random() < density]
    return ConstraintDef(name, universe, frozenset(rows))


def random_csp(rng: random.Random, n_vars: int = 3, n_cons: int = 2, max_values: int = 3):
    """A few random tables over random scopes of ``n_vars`` shared variables.

    Returns the CSP and the ``(table, scope)`` pairs it was built from.
    """
    from memsched.solver import CspInstance

    u = ValueUniverse(tuple(tuple("abc"[: rng.randint(1, max_values)]) for _ in range(n_vars)))
    pairs = []
    for k in range(n_cons):
        scope = tuple(sorted(rng.sample(range(n_vars), rng.randint(1, min(3, n_vars)))))
        pairs.append((random_table(rng, f"c{k}", u.project(scope)), scope))
    return CspInstance.from_tables("rand", u, pairs), pairs


def lift_rule(r: MembershipRule, scope) -> MembershipRule:
    """Rename a constraint-local rule onto the CSP's variables."""
    from memsched.core import Conclusion, Condition

    conds = tuple(sorted((Condition(scope[c.var], c.mask) for c in r.conditions), key=lambda c: c.var))
    concls = tuple(Conclusion(scope[c.var], c.value) for c in r.conclusions)
    return MembershipRule(conds, concls, r.name)


def merged_rules(csp) -> list[MembershipRule]:
    return [lift_rule(cr.rule, con.scope) for con in csp.constraints for cr in con.compiled.rules]
