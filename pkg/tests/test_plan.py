import random
from itertools import combinations, product

import pytest

from cliquefusion.fusion import ColoredGraph
from cliquefusion.model import ModelError, StateAssignment
from cliquefusion.plan import (
    EMPTY_PLAN,
    ImprovementAction,
    ImprovementPlan,
    PlanInfeasible,
    action_cost,
    apply_plan,
    destruction_plan,
    destruction_targets,
    plan_for_tick,
    recheck,
    step_cost,
    targets_at,
)
from cliquefusion.reveal import StructureSpec, oracle, reveal
from cliquefusion.stream import tick_graph

from conftest import BASE_STATES, random_graph

SPEC = StructureSpec(threshold=1, min_size=3)


def brute_force_plans(graph, targets, spec):
    """Every cheapest level assignment (step cost) that kills all targets."""
    pool = sorted({v for t in targets for v in t.vertices})
    best, winners = None, []
    L = graph.scale_levels
    for new in product(*(range(graph.colors[v], L + 1) for v in pool)):
        cost = sum(n - graph.colors[v] for v, n in zip(pool, new))
        if best is not None and cost > best:
            continue
        g = graph.recolor(dict(zip(pool, new)))
        alive = [s for s in oracle(g, spec)
                 if any(set(s.vertices) <= set(t.vertices) for t in targets)]
        if alive:
            continue
        acts = frozenset((v, n) for v, n in zip(pool, new) if n != graph.colors[v])
        if best is None or cost < best:
            best, winners = cost, []
        winners.append(acts)
    return best, set(winners)


def as_sets(plan: ImprovementPlan):
    return {frozenset((a.component, a.to_level) for a in alt) for alt in plan.alternatives}


def test_worked_example_tick3(example_model, example_scenario):
    g, targets, plan = plan_for_tick(example_model, example_scenario, 3, SPEC)
    assert [t.canonical_id for t in targets] == ["Clique/1/s3,s5,s6"]
    assert plan.total_cost == 1
    assert plan.actions == (ImprovementAction("s3", 1, 2),)
    assert plan.alternatives == ((ImprovementAction("s3", 1, 2),),
                                 (ImprovementAction("s5", 1, 2),),
                                 (ImprovementAction("s6", 1, 2),))
    for alt in plan.alternatives:
        assert recheck(example_model, example_scenario, 3, SPEC, alt) == []


def test_worked_example_tick3_matches_brute_force(example_model, example_scenario):
    g, targets = targets_at(example_model, example_scenario, 3, SPEC)
    best, winners = brute_force_plans(g, targets, SPEC)
    plan = destruction_plan(g, targets, SPEC)
    assert best == plan.total_cost == 1
    assert winners == as_sets(plan)


def test_no_structures_means_empty_plan(example_model, example_scenario):
    _, targets, plan = plan_for_tick(example_model, example_scenario, 0, SPEC)
    assert targets == [] and plan == EMPTY_PLAN and plan.total_cost == 0


def test_tick_out_of_range(example_model, example_scenario):
    with pytest.raises(ModelError):
        targets_at(example_model, example_scenario, 99, SPEC)


def test_quasi_target(example_model, example_scenario):
    g = tick_graph(example_model, example_scenario, 1)
    spec = StructureSpec(threshold=2, min_size=4, max_missing_edges=1)
    ids = [t.canonical_id for t in destruction_targets(g, spec)]
    assert "QuasiEdge/2/s1,s3,s5,s6" in ids
    plan = destruction_plan(g, destruction_targets(g, spec), spec)
    best, winners = brute_force_plans(g, destruction_targets(g, spec), spec)
    assert plan.total_cost == best and as_sets(plan) == winners


def test_two_triangles_sharing_a_vertex():
    colors = {"v": 1, "a": 1, "b": 1, "c": 1, "d": 1, "e": 4, "f": 4}
    edges = [("v", "a"), ("v", "b"), ("a", "b"), ("v", "c"), ("v", "d"), ("c", "d"),
             ("e", "f"), ("a", "e")]
    g = ColoredGraph.build(colors, edges)
    targets = reveal(g, SPEC)
    assert len(targets) == 2
    best, winners = brute_force_plans(g, targets, SPEC)
    assert best == 1 and winners == {frozenset({("v", 2)})}
    plan = destruction_plan(g, targets, SPEC)
    assert plan.actions == (ImprovementAction("v", 1, 2),) and plan.total_cost == 1


def test_apply_plan():
    states = StateAssignment(BASE_STATES)
    after = apply_plan(states, [ImprovementAction("s5", 1, 3)])
    assert after.levels["s5"] == 3
    assert {c: v for c, v in after.levels.items() if c != "s5"} == \
        {c: v for c, v in BASE_STATES.items() if c != "s5"}
    assert states.levels["s5"] == 1
    assert apply_plan(states, EMPTY_PLAN) == states
    with pytest.raises(ValueError):
        apply_plan(states, [ImprovementAction("s5", 2, 3)])


def test_apply_plan_lifts_overrides():
    states = StateAssignment({"s1": 3}, {("s1", "f1"): 1})
    after = apply_plan(states, [ImprovementAction("s1", 1, 2)])
    assert after.level("s1", "f1") == 2 and after.level("s1") == 3


def test_infeasible_when_threshold_is_top():
    g = ColoredGraph.build({"a": 4, "b": 4}, [("a", "b")])
    spec = StructureSpec(threshold=4, min_size=2)
    with pytest.raises(PlanInfeasible):
        destruction_plan(g, reveal(g, spec), spec)


def test_uniform_cost_model():
    colors = {"a": 1, "b": 1, "c": 2}
    g = ColoredGraph.build(colors, [("a", "b"), ("b", "c"), ("a", "c")])
    spec = StructureSpec(threshold=2, min_size=3)
    plan = destruction_plan(g, reveal(g, spec), spec, action_cost)
    assert plan.total_cost == 1
    assert {alt[0].component for alt in plan.alternatives} == {"a", "b", "c"}
    step = destruction_plan(g, reveal(g, spec), spec, step_cost)
    assert step.actions == (ImprovementAction("c", 2, 3),)


def random_instances(seed, count, max_n=7):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        g = random_graph(rng, rng.randint(3, max_n), p=0.6, levels=4)
        spec = StructureSpec(threshold=rng.randint(1, 2), min_size=rng.randint(2, 3),
                             max_missing_edges=rng.choice([0, 0, 1]),
                             max_offending_vertices=rng.choice([0, 0, 1]))
        targets = reveal(g, spec)
        if targets:
            out.append((g, spec, targets))
    return out


def test_plans_are_optimal_verified_and_irreducible():
    for g, spec, targets in random_instances(21, 40):
        plan = destruction_plan(g, targets, spec)
        best, winners = brute_force_plans(g, targets, spec)
        assert plan.total_cost == best
        assert as_sets(plan) == winners
        for alt in plan.alternatives:
            improved = g.recolor({a.component: a.to_level for a in alt})
            assert reveal(improved, spec) == []
            for drop in alt:
                rest = [a for a in alt if a is not drop]
                partial = g.recolor({a.component: a.to_level for a in rest})
                assert reveal(partial, spec) != []


def test_more_targets_never_cheaper():
    for g, spec, targets in random_instances(5, 30):
        full = destruction_plan(g, targets, spec).total_cost
        for k in range(1, len(targets)):
            for subset in combinations(targets, k):
                assert destruction_plan(g, list(subset), spec).total_cost <= full


def test_plan_json():
    plan = ImprovementPlan((ImprovementAction("s3", 1, 2),), 1,
                           ((ImprovementAction("s3", 1, 2),),))
    assert plan.to_dict() == {"actions": [{"component": "s3", "from": 1, "to": 2}], "cost": 1,
                              "alternatives": [[{"component": "s3", "from": 1, "to": 2}]]}


def test_action_must_raise():
    with pytest.raises(ValueError):
        ImprovementAction("s1", 2, 2)
