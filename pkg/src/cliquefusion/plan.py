"""Minimum-cost component improvements that destroy critical structures."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Any, Callable, Sequence

from .fusion import ColoredGraph, empty_graph, integrated_graph
from .model import INVALID, ModelError, Scenario, StateAssignment, SystemModel
from .reveal import RevealedStructure, StructureSpec, reveal
from .stream import tick_graph


class PlanInfeasible(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class ImprovementAction:
    component: str
    from_level: int
    to_level: int

    def __post_init__(self):
        if self.to_level <= self.from_level:
            raise ValueError(f"{self.component}: improvement must raise the level "
                             f"({self.from_level} -> {self.to_level})")

    def to_dict(self) -> dict[str, Any]:
        return {"component": self.component, "from": self.from_level, "to": self.to_level}

    def __str__(self) -> str:
        return f"{self.component} {self.from_level}->{self.to_level}"


CostModel = Callable[[ImprovementAction], float]


def step_cost(action: ImprovementAction) -> float:
    """One unit per level gained."""
    return action.to_level - action.from_level


def action_cost(action: ImprovementAction) -> float:
    """One unit per improved component, whatever the gain."""
    return 1


COST_MODELS: dict[str, CostModel] = {"step": step_cost, "uniform": action_cost}


@dataclass(frozen=True)
class ImprovementPlan:
    actions: tuple[ImprovementAction, ...]
    total_cost: float
    alternatives: tuple[tuple[ImprovementAction, ...], ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "actions": [a.to_dict() for a in self.actions],
            "cost": self.total_cost,
            "alternatives": [[a.to_dict() for a in alt] for alt in self.alternatives],
        }


EMPTY_PLAN = ImprovementPlan((), 0, ((),))


def destruction_targets(graph: ColoredGraph, spec: StructureSpec) -> list[RevealedStructure]:
    return reveal(graph, spec)


def targets_at(model: SystemModel, scenario: Scenario, tick: int,
               spec: StructureSpec) -> tuple[ColoredGraph, list[RevealedStructure]]:
    if not 0 <= tick < scenario.ticks:
        raise ModelError(INVALID, f"tick {tick} outside 0..{scenario.ticks - 1}", str(tick))
    g = tick_graph(model, scenario, tick)
    return g, destruction_targets(g, spec)


def survivors(graph: ColoredGraph, structures: Sequence[RevealedStructure],
              spec: StructureSpec) -> list[RevealedStructure]:
    """Qualifying sets that still live inside the vertex set of some target."""
    spec = spec.resolve(graph)
    out: dict[tuple[str, ...], RevealedStructure] = {}
    for s in structures:
        for r in reveal(graph.subgraph(s.vertices), spec):
            out.setdefault(r.vertices, r)
    return list(out.values())


def _options(level: int, spec: StructureSpec, levels: int) -> list[int]:
    """Target levels worth considering; anything in between buys nothing."""
    l, l2 = spec.threshold, spec.secondary_threshold
    opts = []
    if level <= l and l + 1 <= levels:
        opts.append(l + 1)
    if spec.max_offending_vertices and level <= l2 and l2 + 1 <= levels and l2 + 1 not in opts:
        opts.append(l2 + 1)
    return opts


def destruction_plan(graph: ColoredGraph, structures: Sequence[RevealedStructure],
                     spec: StructureSpec, cost_model: CostModel = step_cost) -> ImprovementPlan:
    """Cheapest set of improvements after which no target structure survives.

    Exact search: subsets of the components appearing in the targets are
    tried by growing size, each component raised just past one of the two
    thresholds, until no larger subset can beat the best cost found.  All
    optimal action sets are returned in ``alternatives`` ordered by
    (size, component ids, levels); the first is the chosen plan.
    """
    spec = spec.resolve(graph)
    if not structures:
        return EMPTY_PLAN
    pool = sorted({v for s in structures for v in s.vertices})
    choices = {v: [ImprovementAction(v, graph.colors[v], t)
                   for t in _options(graph.colors[v], spec, graph.scale_levels)]
               for v in pool}
    pool = [v for v in pool if choices[v]]

    def destroyed(actions: Sequence[ImprovementAction]) -> bool:
        g = graph.recolor({a.component: a.to_level for a in actions})
        return not survivors(g, structures, spec)

    if destroyed(()):
        return EMPTY_PLAN
    if not destroyed([choices[v][-1] for v in pool]):
        raise PlanInfeasible("targets survive even with every component raised")

    costs = {a: cost_model(a) for v in pool for a in choices[v]}
    if any(c <= 0 for c in costs.values()):
        raise ValueError("cost model must assign positive costs")
    cheapest = min(costs.values())

    best = float("inf")
    winners: list[tuple[ImprovementAction, ...]] = []
    for size in range(1, len(pool) + 1):
        if size * cheapest > best:
            break
        for comps in combinations(pool, size):
            for acts in product(*(choices[v] for v in comps)):
                cost = sum(costs[a] for a in acts)
                if cost > best or not destroyed(acts):
                    continue
                if cost < best:
                    best, winners = cost, []
                winners.append(acts)
    winners.sort(key=lambda acts: (len(acts), [a.component for a in acts],
                                   [a.to_level for a in acts]))
    return ImprovementPlan(winners[0], best, tuple(winners))


def apply_plan(states: StateAssignment, plan: ImprovementPlan | Sequence[ImprovementAction]) -> StateAssignment:
    """Raise each planned component everywhere it is rated below the target.

    ``from_level`` must equal the worst level recorded for the component
    (global or per-function).
    """
    actions = plan.actions if isinstance(plan, ImprovementPlan) else tuple(plan)
    levels = dict(states.levels)
    over = dict(states.overrides)
    for a in actions:
        if a.component not in levels:
            raise ModelError(INVALID, f"no state for component {a.component!r}", a.component)
        worst = min([levels[a.component]] +
                    [lvl for (c, _), lvl in over.items() if c == a.component])
        if worst != a.from_level:
            raise ValueError(f"{a.component}: plan expects level {a.from_level}, state has {worst}")
        levels[a.component] = max(levels[a.component], a.to_level)
        for key, lvl in over.items():
            if key[0] == a.component:
                over[key] = max(lvl, a.to_level)
    return StateAssignment(levels, over)


def plan_for_tick(model: SystemModel, scenario: Scenario, tick: int, spec: StructureSpec,
                  cost_model: CostModel = step_cost) -> tuple[ColoredGraph, list[RevealedStructure], ImprovementPlan]:
    g, targets = targets_at(model, scenario, tick, spec)
    return g, targets, destruction_plan(g, targets, spec, cost_model)


def recheck(model: SystemModel, scenario: Scenario, tick: int, spec: StructureSpec,
            actions: Sequence[ImprovementAction]) -> list[RevealedStructure]:
    """Re-run detection at ``tick`` after applying ``actions`` to its states."""
    cluster = scenario.chain[tick]
    if cluster is None:
        return reveal(empty_graph(model.scale.levels), spec)
    improved = apply_plan(scenario.assignment(tick), actions)
    return reveal(integrated_graph(model, cluster, improved), spec)

