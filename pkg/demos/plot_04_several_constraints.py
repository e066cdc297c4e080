"""
Several constraints sharing variables
=====================================

Each constraint gets its own compiled rule set and its own scheduler.  A
constraint is woken up again when another one shrinks a variable it watches.
"""

from memsched import ConstraintDef, CspInstance, ValueUniverse, search_bench
from memsched.solver import SearchState, propagate

u = ValueUniverse.uniform(3, "abc", ("x", "y", "z"))

# x < y and y < z, with a < b < c
less = [(p, q) for p in "abc" for q in "abc" if p < q]
xy = ConstraintDef.from_names("lt", u.project((0, 1)), less)
yz = ConstraintDef.from_names("lt", u.project((1, 2)), less)
csp = CspInstance.from_tables("chain", u, [(xy, (0, 1)), (yz, (1, 2))])

###############################################################################
# Propagation alone settles this one: y must be b, and that fixes x and z.

state = SearchState.initial(csp, "r")
propagate(csp, state, "r")
print("after propagation:", u.format_store(state.store))

###############################################################################
# Labelling enumerates every solution; here there is only one.

report = search_bench(csp, "r", mode="all_solutions")
for sol in sorted(report.solutions):
    print({name: u.values[i][v] for i, (name, v) in enumerate(zip(u.names, sol))})
