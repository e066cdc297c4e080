"""
Rules for Kleene's three-valued equivalence
===========================================

The bundled table eq3(X, Y, Z) holds when Z is the Kleene equivalence of X
and Y over t, f and u.  We generate its canonical membership rules, compile
them, and look at how many rules each firing removes from consideration.
"""

from memsched import compile_ruleset, generate_canonical_rules, r_fixpoint, rule
from memsched.tables import kleene_equivalence

eq3 = kleene_equivalence()
u = eq3.universe
print("tuples:", eq3.named_tuples())

rules = generate_canonical_rules(eq3)
print(len(rules), "membership rules")

###############################################################################
# A rule is solving when its friends and obviated lists cover the whole set:
# once it fires, propagation on this constraint is over.

compiled = compile_ruleset(rules, u, "eq3")
print("solving rules:", compiled.solving_count, "of", len(compiled))
print("removed per firing (non-solving rules):", compiled.size_distribution())

###############################################################################
# The rule X ∈ {f}, Z ∈ {f,u} → Y ≠ f is non-solving; firing it removes 17
# rules, leaving 9 live ones for the rest of the search below this store.

r = rule(u, {"X": "f", "Z": "fu"}, [("Y", "f")])
index = next(
    i for i, cr in enumerate(compiled.rules) if cr.rule.conditions == r.conditions
    and cr.rule.conclusions == r.conclusions
)
print("rule r:", compiled.rules[index].rule.describe(u))
print("|friends ∪ obviated| =", len(compiled.rules[index].removed))

res = r_fixpoint(compiled, u.store("f", None, "fu"))
print("fixpoint:", u.format_store(res.store))
print("live rules after r fired:", len(res.live))
