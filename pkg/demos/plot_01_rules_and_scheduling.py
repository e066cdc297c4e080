"""
Membership rules and the three schedulers
=========================================

Three hand-written rules over four variables with domain {a, b, c}, run
under plain generic iteration (GI), then under the rules algorithm (R) with
precomputed friends and obviated lists.
"""

from memsched import ValueUniverse, compile_ruleset, gi_fixpoint, r_fixpoint, rule

u = ValueUniverse.uniform(4, "abc")
rules = [
    rule(u, {"X1": "ab"}, [("X2", "a"), ("X4", "b")], "r1"),
    rule(u, {"X1": "ab", "X2": "bc"}, [("X3", "a")], "r2"),
    rule(u, {"X2": "b"}, [("X3", "a"), ("X4", "b")], "r3"),
]
for r in rules:
    print(r.name, ":", r.describe(u))

###############################################################################
# A rule fires when every current domain lies inside its condition set.
# Starting from X1 = {a, b}, GI applies r1, which enables r2; r3 never fires.

start = u.store("ab", None, None, None)
gi = gi_fixpoint(rules, start)
print("GI fixpoint:", u.format_store(gi.store))
print("relevant rules:", [rules[i].name for i in gi.relevance])
print("condition tests:", gi.counters.condition_tests)

###############################################################################
# Compilation runs GI once per rule from the least store satisfying that
# rule's condition.  Rules that changed the store become friends, and rules
# that can no longer change anything become obviated.

compiled = compile_ruleset(rules, u)
for cr in compiled.rules:
    print(
        cr.rule.name,
        "friends", [rules[i].name for i in cr.friends],
        "obviated", [rules[i].name for i in cr.obviated],
    )

###############################################################################
# Under R, firing r1 applies r2's body without testing its condition and
# drops all three rules from the live set, so nothing is left to schedule.

res = r_fixpoint(compiled, start)
print("R fixpoint:", u.format_store(res.store))
print("live rules left:", sorted(res.live))
print("condition tests:", res.counters.condition_tests)
