"""Scenario replay: fuse the active cluster per tick, reveal, then track.

Fusion happens first at every tick and the windowed k-of-m rule is applied
afterwards to the per-tick detections of each structure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

from .fusion import ColoredGraph, empty_graph, integrated_graph
from .model import INVALID, ModelError, Scenario, SystemModel
from .reveal import RevealedStructure, StructureSpec, reveal


class Status(str, Enum):
    ABSENT = "Absent"
    CANDIDATE = "Candidate"
    ACTIVE = "Active"


@dataclass(frozen=True)
class TrackConfig:
    k: int = 2
    m: int = 3

    def __post_init__(self):
        if not (isinstance(self.k, int) and isinstance(self.m, int) and 1 <= self.k <= self.m):
            raise ValueError(f"need 1 <= k <= m, got k={self.k!r} m={self.m!r}")


def window_hits(hits: Sequence[bool], tick: int, m: int) -> int:
    return sum(1 for h in hits[max(0, tick - m + 1):tick + 1] if h)


def k_of_m(hits: Sequence[bool], tick: int, cfg: TrackConfig) -> bool:
    """True when at least k of the last m ticks (ending at ``tick``) are hits.

    Ticks before the start of the sequence count as misses.
    """
    if not 0 <= tick < len(hits):
        raise IndexError(f"tick {tick} outside hit sequence of length {len(hits)}")
    return window_hits(hits, tick, cfg.m) >= cfg.k


@dataclass(frozen=True)
class Track:
    id: str
    structure: RevealedStructure
    hits: tuple[bool, ...]
    status: tuple[Status, ...]

    @property
    def initiated_at(self) -> int | None:
        for t, s in enumerate(self.status):
            if s is Status.ACTIVE:
                return t
        return None

    @property
    def active_ticks(self) -> tuple[int, ...]:
        return tuple(t for t, s in enumerate(self.status) if s is Status.ACTIVE)

    @property
    def hit_ticks(self) -> tuple[int, ...]:
        return tuple(t for t, h in enumerate(self.hits) if h)

    def to_dict(self) -> dict[str, Any]:
        return {
            "hits": [int(h) for h in self.hits],
            "status": [s.value for s in self.status],
            "initiated_at": self.initiated_at,
        }


@dataclass(frozen=True)
class TickRecord:
    tick: int
    cluster: str | None
    graph: dict
    revealed: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"tick": self.tick, "cluster": self.cluster, "graph": dict(self.graph),
                "revealed": list(self.revealed)}


@dataclass(frozen=True)
class TrackLog:
    records: tuple[TickRecord, ...]
    tracks: dict[str, Track] = field(default_factory=dict)
    config: TrackConfig = TrackConfig()

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.config.k,
            "m": self.config.m,
            "ticks": [r.to_dict() for r in self.records],
            "tracks": {i: t.to_dict() for i, t in self.tracks.items()},
        }


def tick_graph(model: SystemModel, scenario: Scenario, tick: int) -> ColoredGraph:
    if not 0 <= tick < scenario.ticks:
        raise ModelError(INVALID, f"tick {tick} outside 0..{scenario.ticks - 1}", str(tick))
    cluster = scenario.chain[tick]
    if cluster is None:
        return empty_graph(model.scale.levels)
    return integrated_graph(model, cluster, scenario.assignment(tick))


def reveal_tick(model: SystemModel, scenario: Scenario, tick: int,
                spec: StructureSpec) -> tuple[ColoredGraph, list[RevealedStructure]]:
    g = tick_graph(model, scenario, tick)
    return g, reveal(g, spec)


def track_status(hits: Sequence[bool], cfg: TrackConfig) -> tuple[Status, ...]:
    out = []
    for t in range(len(hits)):
        n = window_hits(hits, t, cfg.m)
        if n >= cfg.k:
            out.append(Status.ACTIVE)
        elif n:
            out.append(Status.CANDIDATE)
        else:
            out.append(Status.ABSENT)
    return tuple(out)


def run(model: SystemModel, scenario: Scenario, spec: StructureSpec,
        cfg: TrackConfig = TrackConfig()) -> TrackLog:
    """Replay ``scenario`` and build one track per revealed structure id."""
    records = []
    first_seen: dict[str, RevealedStructure] = {}
    hit_ticks: dict[str, set[int]] = {}
    for t in range(scenario.ticks):
        g, found = reveal_tick(model, scenario, t, spec)
        ids = []
        for s in found:
            sid = s.canonical_id
            first_seen.setdefault(sid, s)
            hit_ticks.setdefault(sid, set()).add(t)
            ids.append(sid)
        records.append(TickRecord(t, scenario.chain[t], g.summary(), tuple(ids)))

    tracks = {}
    for sid, s in first_seen.items():
        hits = tuple(t in hit_ticks[sid] for t in range(scenario.ticks))
        tracks[sid] = Track(sid, s, hits, track_status(hits, cfg))
    return TrackLog(tuple(records), tracks, cfg)
