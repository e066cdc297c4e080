import random

import pytest

from memsched.core import (
    TOP,
    ValueUniverse,
    all_stores,
    apply_rule,
    holds,
    rule,
    store_leq,
    stores_above,
    witness,
)
from memsched.precompile import compile_ruleset
from memsched.rulegen import generate_canonical_rules
from memsched.scheduler import (
    InvariantViolation,
    SchedulerRun,
    compiled_providers,
    gi_fixpoint,
    r_fixpoint,
    rgi_fixpoint,
    update_default,
)

from . import oracles
from .helpers import from_named, random_constraint, rule_to_named, to_named


def no_providers(g, d):
    return ()


def generated_cases(count, seed):
    rng = random.Random(seed)
    for _ in range(count):
        c = random_constraint(rng)
        rules = generate_canonical_rules(c)
        yield c, compile_ruleset(rules, c.universe, c.name)


# --- update -----------------------------------------------------------------


def test_update_default_examples(abc4, paper_rules):
    r1 = paper_rules[0]
    fires = abc4.store("ab", None, None, None)
    assert update_default({1, 2, 3}, {2}, r1, fires, True) == {1, 3}
    assert update_default({1, 2, 3}, {2}, r1, abc4.full_store(), False) == set()
    assert update_default({1, 2, 3}, {2}, r1, fires, False) == set()


def test_agenda_is_fifo_without_duplicates():
    run = SchedulerRun(4, [0, 2, 3], TOP)
    run.enqueue(2)
    assert list(run.agenda) == [0, 2, 3]
    run.discard([2])
    assert [run.pop(), run.pop(), run.pop()] == [0, 3, None]
    assert run.live_set() == frozenset({0, 3})


# --- GI ---------------------------------------------------------------------


def test_gi_paper_example(abc4, paper_rules):
    start = abc4.store("ab", None, None, None)
    expected = abc4.store("ab", "bc", "bc", "ac")
    named = [rule_to_named(r, abc4) for r in paper_rules]
    assert from_named(oracles.round_robin_fixpoint(named, to_named(start, abc4)), abc4) == expected

    res = gi_fixpoint(paper_rules, start, check_invariant=True)
    assert res.store == expected
    assert res.relevance == [0, 1]


def test_gi_empty_rule_set(abc4):
    d = abc4.store("a", None, "bc", None)
    assert gi_fixpoint([], d).store == d


def test_gi_exits_early_on_top():
    u = ValueUniverse.uniform(2, "ab")
    rules = [rule(u, {}, [("X1", "a")]), rule(u, {}, [("X2", "a")])]
    res = gi_fixpoint(rules, u.store("a", None))
    assert res.store is TOP
    assert res.counters.condition_tests == 1


def test_gi_relevant_rules_appear_once():
    for c, cs in generated_cases(30, 11):
        for d in all_stores(c.universe)[::5]:
            rel = gi_fixpoint(cs.plain_rules, d).relevance
            assert len(rel) == len(set(rel))


def test_gi_matches_round_robin_oracle():
    for c, cs in generated_cases(30, 12):
        u = c.universe
        named = [rule_to_named(r, u) for r in cs.plain_rules]
        for d in all_stores(u):
            got = gi_fixpoint(cs.plain_rules, d).store
            assert to_named(got, u) == oracles.round_robin_fixpoint(named, to_named(d, u))


def test_gi_is_least_common_fixpoint():
    for c, cs in generated_cases(12, 13):
        rules = cs.plain_rules
        stores = all_stores(c.universe)
        fixpoints = [e for e in stores if not any(apply_rule(r, e)[1] for r in rules)]
        for d in stores:
            res = gi_fixpoint(rules, d).store
            assert res.is_top or res in fixpoints
            for e in fixpoints:
                if store_leq(d, e):
                    assert store_leq(res, e)


def test_invariant_check_catches_a_broken_run(abc4, paper_rules):
    run = SchedulerRun(3, range(3), abc4.store("ab", None, None, None))
    run.pop()
    with pytest.raises(InvariantViolation):
        run.check_invariant(paper_rules)


# --- RGI --------------------------------------------------------------------


def test_rgi_with_empty_providers_is_gi():
    for c, cs in generated_cases(15, 14):
        for d in all_stores(c.universe):
            gi = gi_fixpoint(cs.plain_rules, d)
            rgi = rgi_fixpoint(cs.plain_rules, d, no_providers, no_providers)
            assert rgi.store == gi.store
            assert rgi.counters.condition_tests == gi.counters.condition_tests


def test_rgi_paper_example(abc4, paper_rules):
    cs = compile_ruleset(paper_rules, abc4)
    start = abc4.store("ab", None, None, None)
    friends_of, obviated_of = compiled_providers(cs)
    res = rgi_fixpoint(paper_rules, start, friends_of, obviated_of, check_invariant=True)
    assert res.store == gi_fixpoint(paper_rules, start).store
    assert res.live == frozenset()
    assert res.relevance == [0, 1]


def test_rgi_at_common_fixpoint_keeps_f(abc4, paper_rules):
    cs = compile_ruleset(paper_rules, abc4)
    d = abc4.full_store()
    res = rgi_fixpoint(paper_rules, d, *compiled_providers(cs))
    assert res.store == d
    assert res.live == frozenset(range(3))


def test_rgi_removed_rules_stable_above_result():
    for c, cs in generated_cases(15, 15):
        rules = cs.plain_rules
        for d in all_stores(c.universe)[::3]:
            res = rgi_fixpoint(rules, d, *compiled_providers(cs), check_invariant=True)
            for f in set(range(len(rules))) - res.live:
                assert all(not apply_rule(rules[f], e)[1] for e in stores_above(res.store))


# --- R ----------------------------------------------------------------------


def test_r_kleene_scenario(kleene, kleene_compiled, kleene_r):
    u = kleene.universe
    start = u.store("f", None, "fu")
    res = r_fixpoint(kleene_compiled, start, check_invariant=True)
    assert kleene_r in res.relevance
    assert len(res.live) == 26 - 17 == 9
    assert res.store == gi_fixpoint(kleene_compiled.plain_rules, start).store


def test_r_solving_rule_empties_f(kleene, kleene_compiled):
    u = kleene.universe
    solving = [i for i, cr in enumerate(kleene_compiled.rules) if cr.solving]
    assert len(solving) == 12
    for s in solving:
        res = r_fixpoint(kleene_compiled, witness(kleene_compiled.rules[s].rule.conditions, u))
        if res.counters.solving_fired:
            assert res.live == frozenset()
    first = solving[0]
    res = r_fixpoint(kleene_compiled, witness(kleene_compiled.rules[first].rule.conditions, u))
    assert res.counters.solving_fired == 1
    # G is empty once the solving rule fires: nothing after it is tested
    assert res.counters.condition_tests == first + 1


def test_r_matches_gi_and_rgi_exhaustive():
    for c, cs in generated_cases(25, 16):
        rules = cs.plain_rules
        providers = compiled_providers(cs)
        for d in all_stores(c.universe):
            gi = gi_fixpoint(rules, d).store
            assert r_fixpoint(cs, d, check_invariant=True).store == gi
            assert rgi_fixpoint(rules, d, *providers).store == gi


def test_r_final_live_set_sound():
    for c, cs in generated_cases(20, 17):
        rules = cs.plain_rules
        for d in all_stores(c.universe):
            res = r_fixpoint(cs, d)
            for f in set(range(len(rules))) - res.live:
                assert all(not apply_rule(rules[f], e)[1] for e in stores_above(res.store))


def test_r_runtime_obviation_removes_dead_rule():
    u = ValueUniverse.uniform(2, "ab")
    rules = [rule(u, {"X1": "a"}, [("X2", "a")])]
    cs = compile_ruleset(rules, u)
    res = r_fixpoint(cs, u.store("b", None))
    assert res.live == frozenset()
    assert res.counters.rules_removed == 1


def test_r_does_no_more_condition_tests_than_gi():
    for c, cs in generated_cases(40, 18):
        for d in all_stores(c.universe):
            gi = gi_fixpoint(cs.plain_rules, d)
            if gi.counters.body_applications == 0:
                continue
            assert r_fixpoint(cs, d).counters.condition_tests <= gi.counters.condition_tests


def test_chained_friends_break_literal_condition_two():
    """A friend enabled only by an earlier friend: its condition does not hold
    right after the selected body, yet composing the bodies in order is exact."""
    u = ValueUniverse.uniform(4, "abc", ("x", "y", "z", "w"))
    rules = [
        rule(u, {"x": "a"}, [("y", "a")]),
        rule(u, {"y": "bc"}, [("z", "a")]),
        rule(u, {"z": "bc"}, [("w", "a")]),
    ]
    cs = compile_ruleset(rules, u)
    assert cs.rules[0].friends == (1, 2)
    start = u.store("a", None, None, None)
    after_body = u.store("a", "bc", None, None)
    assert not holds(rules[2].conditions, after_body)
    assert holds(rules[2].conditions, u.store("a", "bc", "bc", None))
    for d in all_stores(u):
        assert r_fixpoint(cs, d).store == gi_fixpoint(rules, d).store
    assert r_fixpoint(cs, start).store == u.store("a", "bc", "bc", "bc")
