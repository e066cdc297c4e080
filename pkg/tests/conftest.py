import pytest

from memsched.core import ValueUniverse, rule
from memsched.precompile import compile_ruleset
from memsched.rulegen import generate_canonical_rules
from memsched.tables import kleene_equivalence


@pytest.fixture(scope="session")
def abc4():
    return ValueUniverse.uniform(4, "abc")


@pytest.fixture(scope="session")
def paper_rules(abc4):
    """r1, r2, r3 over four variables with domain {a, b, c}."""
    return [
        rule(abc4, {"X1": "ab"}, [("X2", "a"), ("X4", "b")], "r1"),
        rule(abc4, {"X1": "ab", "X2": "bc"}, [("X3", "a")], "r2"),
        rule(abc4, {"X2": "b"}, [("X3", "a"), ("X4", "b")], "r3"),
    ]


@pytest.fixture(scope="session")
def kleene():
    return kleene_equivalence()


@pytest.fixture(scope="session")
def kleene_rules(kleene):
    return generate_canonical_rules(kleene)


@pytest.fixture(scope="session")
def kleene_compiled(kleene, kleene_rules):
    return compile_ruleset(kleene_rules, kleene.universe, kleene.name)


@pytest.fixture(scope="session")
def kleene_r(kleene, kleene_compiled):
    """Index of the rule X ∈ {f}, Z ∈ {f,u} → Y ≠ f."""
    u = kleene.universe
    target = rule(u, {"X": "f", "Z": "fu"}, [("Y", "f")])
    for i, cr in enumerate(kleene_compiled.rules):
        if cr.rule.conditions == target.conditions and cr.rule.conclusions == target.conclusions:
            return i
    raise AssertionError("rule r not generated")


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(test_acceptance.RESULTS):
        terminalreporter.write_line(test_acceptance.RESULTS[key])
