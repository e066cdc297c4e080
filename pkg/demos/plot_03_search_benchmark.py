"""
Randomized search benchmark
===========================

The same seeded depth-first search is run twice on the eq3 constraint, once
propagating with GI and once with R.  Both explore exactly the same tree; R
does fewer condition tests because firing a rule discards its friends and
obviated rules.
"""

import io

from memsched import CspInstance, compile_ruleset, generate_canonical_rules, search_bench
from memsched.solver import write_csv
from memsched.tables import kleene_equivalence

eq3 = kleene_equivalence()
compiled = compile_ruleset(generate_canonical_rules(eq3), eq3.universe, "eq3")
csp = CspInstance.single(compiled, eq3)

reports = []
for seed in range(5):
    gi = search_bench(csp, "gi", seed)
    r = search_bench(csp, "r", seed)
    assert gi.visited == r.visited
    reports += [gi, r]
    print(f"seed {seed}: {gi.nodes} nodes, condition tests GI {gi.condition_tests} / R {r.condition_tests}")

###############################################################################
# The reports serialize to CSV, the same format ``memsched bench`` prints.

out = io.StringIO()
write_csv(reports, out)
print(out.getvalue())
