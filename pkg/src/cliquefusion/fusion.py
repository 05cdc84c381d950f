"""Colored graphs for single functions and their fusion per cluster."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .model import INVALID, UNKNOWN_ID, ModelError, StateAssignment, SystemModel


def edge(u: str, v: str) -> tuple[str, str]:
    """Normalized unordered pair."""
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class ColoredGraph:
    """Undirected simple graph whose vertices carry ordinal levels.

    ``functions`` records which system functions were fused into the graph
    (empty for hand-built graphs); it lets a detection spec resolve its
    minimum structure size to the cluster size.
    """

    vertices: tuple[str, ...]
    colors: Mapping[str, int]
    edges: frozenset[tuple[str, str]]
    scale_levels: int = 4
    functions: tuple[str, ...] = field(default=())

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertex")
        if set(self.colors) != vs:
            raise ValueError("colors must cover exactly the vertex set")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if u not in vs or v not in vs:
                raise ValueError(f"edge {(u, v)!r} references an unknown vertex")
            if u > v:
                raise ValueError(f"edge {(u, v)!r} is not normalized")
        for v, c in self.colors.items():
            if not 1 <= c <= self.scale_levels:
                raise ValueError(f"color {c!r} of {v!r} outside 1..{self.scale_levels}")

    @classmethod
    def build(cls, colors: Mapping[str, int], edges: Iterable[tuple[str, str]],
              scale_levels: int = 4, order: Sequence[str] | None = None,
              functions: Iterable[str] = ()) -> "ColoredGraph":
        vertices = tuple(order) if order is not None else tuple(colors)
        return cls(vertices, dict(colors), frozenset(edge(u, v) for u, v in edges),
                   scale_levels, tuple(sorted(set(functions))))

    @cached_property
    def adjacency(self) -> dict[str, frozenset[str]]:
        nbrs: dict[str, set[str]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return {v: frozenset(n) for v, n in nbrs.items()}

    def has_edge(self, u: str, v: str) -> bool:
        return edge(u, v) in self.edges

    def __len__(self) -> int:
        return len(self.vertices)

    def subgraph(self, keep: Iterable[str]) -> "ColoredGraph":
        keep = set(keep)
        verts = tuple(v for v in self.vertices if v in keep)
        return ColoredGraph(verts, {v: self.colors[v] for v in verts},
                            frozenset(e for e in self.edges if e[0] in keep and e[1] in keep),
                            self.scale_levels, self.functions)

    def recolor(self, changes: Mapping[str, int]) -> "ColoredGraph":
        colors = dict(self.colors)
        for v, c in changes.items():
            if v not in colors:
                raise KeyError(v)
            colors[v] = c
        return replace(self, colors=colors)

    def summary(self) -> dict:
        return {"vertices": len(self.vertices), "edges": len(self.edges)}


def empty_graph(scale_levels: int = 4) -> ColoredGraph:
    return ColoredGraph((), {}, frozenset(), scale_levels)


def merge_color(levels: Sequence[int]) -> int:
    """The worst (lowest) of several levels for one component."""
    if not levels:
        raise ValueError("merge_color needs at least one level")
    return min(levels)


def function_graph(model: SystemModel, function: str, states: StateAssignment) -> ColoredGraph:
    try:
        comps = model.functions[function]
    except KeyError:
        raise ModelError(UNKNOWN_ID, f"unknown function id {function!r}", function) from None
    colors = {c: states.level(c, function) for c in comps}
    order = [c for c in model.components if c in colors]
    return ColoredGraph.build(colors, combinations(order, 2), model.scale.levels,
                              order=order, functions=[function])


def fuse(graphs: Sequence[ColoredGraph], order: Sequence[str] | None = None) -> ColoredGraph:
    """Union of vertices and edges; a vertex takes the worst color it has anywhere."""
    if not graphs:
        raise ValueError("nothing to fuse")
    levels: dict[str, list[int]] = {}
    edges: set[tuple[str, str]] = set()
    funcs: set[str] = set()
    for g in graphs:
        for v in g.vertices:
            levels.setdefault(v, []).append(g.colors[v])
        edges |= g.edges
        funcs.update(g.functions)
    if order is None:
        order = sorted(levels)
    else:
        missing = set(levels) - set(order)
        if missing:
            raise ValueError(f"order does not cover {sorted(missing)}")
        order = [v for v in order if v in levels]
    colors = {v: merge_color(levels[v]) for v in order}
    scale = max(g.scale_levels for g in graphs)
    return ColoredGraph.build(colors, edges, scale, order=order, functions=funcs)


def integrated_graph(model: SystemModel, cluster: str, states: StateAssignment) -> ColoredGraph:
    """Fused colored graph of all functions in ``cluster``."""
    try:
        funcs = model.clusters[cluster]
    except KeyError:
        raise ModelError(UNKNOWN_ID, f"unknown cluster id {cluster!r}", cluster) from None
    if not funcs:
        raise ModelError(INVALID, f"cluster {cluster!r} has no functions", cluster)
    return fuse([function_graph(model, f, states) for f in funcs], order=model.components)


def _fill(level: int, levels: int) -> str:
    # darker fill for worse states
    pct = 25 + round(70 * (level - 1) / max(levels - 1, 1))
    return f"gray{pct}"


def to_dot(graph: ColoredGraph, name: str = "G") -> str:
    lines = [f'graph "{name}" {{', "  node [style=filled];"]
    for v in graph.vertices:
        c = graph.colors[v]
        font = "white" if c <= (graph.scale_levels + 1) // 2 else "black"
        lines.append(f'  "{v}" [label="{v} ({c})", fillcolor={_fill(c, graph.scale_levels)}, '
                     f"fontcolor={font}];")
    for u, v in sorted(graph.edges):
        lines.append(f'  "{u}" -- "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
