"""Detection of cliques and quasi-cliques among badly rated components.

A vertex set qualifies under a :class:`StructureSpec` when

* at most ``max_missing_edges`` of its vertex pairs are non-adjacent,
* at most ``max_offending_vertices`` of its vertices have a level above
  ``threshold``, and none above ``secondary_threshold``,
* it has at least ``sub_min_size`` (default ``min_size``) vertices.

Both conditions on pairs and on vertices are hereditary, so the maximal
qualifying sets can be enumerated with a Bron-Kerbosch style search in which
the candidate and excluded lists are re-filtered after every extension.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from enum import Enum
from itertools import combinations
from typing import Any, Iterable, Mapping

import numpy as np

from .fusion import ColoredGraph, edge

ORACLE_LIMIT = 20


class Kind(str, Enum):
    CLIQUE = "Clique"
    QUASI_EDGE = "QuasiEdge"
    QUASI_VERTEX = "QuasiVertex"
    QUASI_BOTH = "QuasiBoth"
    SUB_CLIQUE = "SubClique"
    QUASI_SUB_CLIQUE = "QuasiSubClique"

    def __str__(self) -> str:
        return self.value


def kind_for(size: int, n_missing: int, n_offending: int, min_size: int) -> Kind:
    deficient = n_missing > 0 or n_offending > 0
    if size < min_size:
        return Kind.QUASI_SUB_CLIQUE if deficient else Kind.SUB_CLIQUE
    if n_missing and n_offending:
        return Kind.QUASI_BOTH
    if n_missing:
        return Kind.QUASI_EDGE
    if n_offending:
        return Kind.QUASI_VERTEX
    return Kind.CLIQUE


@dataclass(frozen=True)
class StructureSpec:
    """Detection parameters.

    ``min_size`` may be the string ``"cluster"``, meaning the number of
    functions fused into the graph.  ``secondary_threshold`` defaults to one
    level above ``threshold``.  Sets smaller than ``min_size`` but at least
    ``sub_min_size`` are reported as sub-cliques.
    """

    threshold: int = 1
    min_size: int | str = "cluster"
    max_missing_edges: int = 0
    max_offending_vertices: int = 0
    secondary_threshold: int | None = None
    maximal_only: bool = True
    sub_min_size: int | None = None

    @property
    def floor(self) -> int:
        return self.sub_min_size if self.sub_min_size is not None else self.min_size

    @property
    def quasi(self) -> bool:
        return self.max_missing_edges + self.max_offending_vertices > 0

    def resolve(self, graph: ColoredGraph) -> "StructureSpec":
        """Concrete copy of the spec for ``graph`` (integers everywhere)."""
        levels = graph.scale_levels
        min_size = self.min_size
        if min_size == "cluster":
            if graph.functions:
                min_size = len(graph.functions)
            elif not graph.vertices:
                min_size = 1
            else:
                raise ValueError('min_size="cluster" needs a graph fused from a cluster')
        second = self.secondary_threshold
        if second is None:
            second = min(self.threshold + 1, levels)
        spec = replace(self, min_size=min_size, secondary_threshold=second)
        spec.check(levels)
        return spec

    def check(self, levels: int) -> None:
        l, l2 = self.threshold, self.secondary_threshold
        if not 1 <= l <= levels:
            raise ValueError(f"threshold {l} outside 1..{levels}")
        if l2 is not None and not l <= l2 <= levels:
            raise ValueError(f"secondary threshold {l2} outside {l}..{levels}")
        if self.max_missing_edges < 0 or self.max_offending_vertices < 0:
            raise ValueError("deficiency budgets must be non-negative")
        if self.min_size != "cluster" and (not isinstance(self.min_size, int) or self.min_size < 1):
            raise ValueError(f"min_size must be a positive integer or 'cluster', got {self.min_size!r}")
        if self.sub_min_size is not None:
            if self.sub_min_size < 1:
                raise ValueError("sub_min_size must be positive")
            if isinstance(self.min_size, int) and self.sub_min_size > self.min_size:
                raise ValueError("sub_min_size cannot exceed min_size")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "StructureSpec":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown detection keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class RevealedStructure:
    vertices: tuple[str, ...]
    kind: Kind
    missing_edges: tuple[tuple[str, str], ...]
    offending_vertices: tuple[str, ...]
    spec: StructureSpec

    @property
    def canonical_id(self) -> str:
        return canonical_id(self)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.canonical_id,
            "kind": self.kind.value,
            "vertices": list(self.vertices),
            "missing_edges": [list(e) for e in self.missing_edges],
            "offending_vertices": list(self.offending_vertices),
            "threshold": self.spec.threshold,
        }


def canonical_id(structure: RevealedStructure) -> str:
    return f"{structure.kind.value}/{structure.spec.threshold}/{','.join(sorted(structure.vertices))}"


def _structure(vertices: Iterable[str], graph: ColoredGraph, spec: StructureSpec) -> RevealedStructure:
    vs = tuple(sorted(vertices))
    missing = tuple(sorted(edge(u, v) for u, v in combinations(vs, 2) if not graph.has_edge(u, v)))
    offending = tuple(v for v in vs if graph.colors[v] > spec.threshold)
    kind = kind_for(len(vs), len(missing), len(offending), spec.min_size)
    return RevealedStructure(vs, kind, missing, offending, spec)


def _ordered(found: Iterable[RevealedStructure]) -> list[RevealedStructure]:
    return sorted(found, key=lambda s: (-len(s.vertices), s.vertices))


def classify(vertices: Iterable[str], graph: ColoredGraph, spec: StructureSpec) -> Kind:
    vs = list(vertices)
    for v in vs:
        if v not in graph.colors:
            raise KeyError(f"vertex {v!r} not in graph")
    return _structure(vs, graph, spec.resolve(graph)).kind


# -- cliques -------------------------------------------------------------------

def find_cliques(graph: ColoredGraph, spec: StructureSpec) -> list[RevealedStructure]:
    """Maximal cliques among vertices with level <= threshold.

    Only ``threshold``, ``min_size``/``sub_min_size`` and ``maximal_only`` of
    the spec are used; deficiency budgets are ignored here.
    """
    spec = spec.resolve(graph)
    floor = spec.floor
    keep = [v for v in graph.vertices if graph.colors[v] <= spec.threshold]
    kept = set(keep)
    adj = {v: graph.adjacency[v] & kept for v in keep}
    found: list[list[str]] = []

    if spec.maximal_only:
        def expand(r: list[str], p: set[str], x: set[str]) -> None:
            if len(r) + len(p) < floor:
                return
            if not p:
                if not x:
                    found.append(r)
                return
            # Tomita pivot: the vertex covering most of p
            pivot = max(sorted(p | x), key=lambda u: len(adj[u] & p))
            for v in sorted(p - adj[pivot]):
                expand(r + [v], p & adj[v], x & adj[v])
                p = p - {v}
                x = x | {v}

        expand([], set(keep), set())
    else:
        def grow(r: list[str], cands: list[str]) -> None:
            if len(r) >= floor:
                found.append(r)
            for i, v in enumerate(cands):
                grow(r + [v], [u for u in cands[i + 1:] if u in adj[v]])

        grow([], keep)
    return _ordered(_structure(r, graph, spec) for r in found)


# -- quasi-cliques -------------------------------------------------------------

def find_quasi(graph: ColoredGraph, spec: StructureSpec) -> list[RevealedStructure]:
    """Maximal (or all) vertex sets within the spec's deficiency budgets."""
    spec = spec.resolve(graph)
    if not spec.quasi:
        return find_cliques(graph, spec)
    l, l2 = spec.threshold, spec.secondary_threshold
    d_e, d_v, floor = spec.max_missing_edges, spec.max_offending_vertices, spec.floor
    limit = l2 if d_v else l
    cands = [v for v in graph.vertices if graph.colors[v] <= limit]
    adj = graph.adjacency
    bright = {v for v in cands if graph.colors[v] > l}

    def step(r: list[str], miss: int, off: int, u: str) -> tuple[int, int] | None:
        m = miss + sum(1 for w in r if w not in adj[u])
        o = off + (u in bright)
        if m > d_e or o > d_v:
            return None
        return m, o

    found: list[list[str]] = []

    if spec.maximal_only:
        def expand(r, miss, off, p, x):
            if len(r) + len(p) < floor:
                return
            if not p:
                if not x:
                    found.append(r)
                return
            for i, v in enumerate(p):
                miss2, off2 = step(r, miss, off, v)
                r2 = r + [v]
                p2 = [u for u in p[i + 1:] if step(r2, miss2, off2, u)]
                x2 = [u for u in x + p[:i] if step(r2, miss2, off2, u)]
                expand(r2, miss2, off2, p2, x2)

        expand([], 0, 0, [v for v in cands if step([], 0, 0, v)], [])
    else:
        def grow(r, miss, off, start):
            if len(r) >= floor:
                found.append(r)
            for i in range(start, len(cands)):
                nxt = step(r, miss, off, cands[i])
                if nxt:
                    grow(r + [cands[i]], nxt[0], nxt[1], i + 1)

        grow([], 0, 0, 0)
    return _ordered(_structure(r, graph, spec) for r in found)


def reveal(graph: ColoredGraph, spec: StructureSpec) -> list[RevealedStructure]:
    """Dispatch to :func:`find_quasi` or :func:`find_cliques`."""
    return find_quasi(graph, spec) if spec.quasi else find_cliques(graph, spec)


def qualifies(vertices: Iterable[str], graph: ColoredGraph, spec: StructureSpec) -> bool:
    """Direct check of the qualifying conditions for one vertex set."""
    spec = spec.resolve(graph)
    vs = list(vertices)
    if len(vs) < spec.floor:
        return False
    limit = spec.secondary_threshold if spec.max_offending_vertices else spec.threshold
    if any(graph.colors[v] > limit for v in vs):
        return False
    off = sum(1 for v in vs if graph.colors[v] > spec.threshold)
    miss = sum(1 for u, v in combinations(vs, 2) if not graph.has_edge(u, v))
    return off <= spec.max_offending_vertices and miss <= spec.max_missing_edges


# -- exhaustive oracle ---------------------------------------------------------

def oracle(graph: ColoredGraph, spec: StructureSpec) -> list[RevealedStructure]:
    """Same contract as :func:`reveal`, by scanning every vertex subset."""
    n = len(graph.vertices)
    if n > ORACLE_LIMIT:
        raise ValueError(f"oracle limited to {ORACLE_LIMIT} vertices, graph has {n}")
    spec = spec.resolve(graph)
    if n == 0:
        return []
    verts = graph.vertices
    masks = np.arange(1 << n, dtype=np.int64)
    member = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    size = member.sum(axis=1)

    colors = np.array([graph.colors[v] for v in verts])
    offending = member[:, colors > spec.threshold].sum(axis=1)
    if spec.max_offending_vertices:
        too_bright = member[:, colors > spec.secondary_threshold].any(axis=1)
    else:
        too_bright = np.zeros(len(masks), dtype=bool)
    missing = np.zeros(len(masks), dtype=np.int64)
    for i, j in combinations(range(n), 2):
        if not graph.has_edge(verts[i], verts[j]):
            missing += member[:, i] & member[:, j]

    ok = (missing <= spec.max_missing_edges) & (offending <= spec.max_offending_vertices) & ~too_bright
    if spec.maximal_only:
        # sup[m]: some qualifying set contains m (superset-sum transform)
        sup = ok.copy()
        for b in range(n):
            lo = masks[(masks >> b) & 1 == 0]
            sup[lo] |= sup[lo | (1 << b)]
        bigger = np.zeros(len(masks), dtype=bool)
        for b in range(n):
            lo = masks[(masks >> b) & 1 == 0]
            bigger[lo] |= sup[lo | (1 << b)]
        ok &= ~bigger
    ok &= size >= spec.floor

    out = []
    for m in masks[ok]:
        vs = tuple(sorted(verts[i] for i in range(n) if m >> i & 1))
        miss = tuple(sorted(
            (a, b) for a, b in combinations(vs, 2) if (a, b) not in graph.edges
        ))
        off = tuple(v for v in vs if graph.colors[v] > spec.threshold)
        if len(vs) < spec.min_size:
            kind = Kind.QUASI_SUB_CLIQUE if miss or off else Kind.SUB_CLIQUE
        else:
            kind = {(False, False): Kind.CLIQUE, (True, False): Kind.QUASI_EDGE,
                    (False, True): Kind.QUASI_VERTEX, (True, True): Kind.QUASI_BOTH}[
                (bool(miss), bool(off))]
        out.append(RevealedStructure(vs, kind, miss, off, spec))
    out.sort(key=lambda s: (-len(s.vertices), s.vertices))
    return out

