"""System model, scenario description and the JSON document format.

A document holds the components of a system, the functions that use them,
the clusters of functions executed together, an ordinal health scale and an
optional scenario (a chain of active clusters over discrete ticks together
with per-component state streams).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

IDLE = None

# error / violation codes
SYNTAX = "syntax"
UNKNOWN_ID = "unknown_id"
LEVEL_RANGE = "level_range"
LENGTH_MISMATCH = "length_mismatch"
INVALID = "invalid"


class ModelError(ValueError):
    """Raised when a document cannot be turned into a valid model."""

    def __init__(self, code: str, message: str, entity: str | None = None):
        super().__init__(message)
        self.code = code
        self.entity = entity


@dataclass(frozen=True)
class Violation:
    code: str
    entity: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.entity}: {self.message}"


@dataclass(frozen=True)
class OrdinalScale:
    """Levels 1..levels; 1 is the worst state, ``levels`` the best."""

    levels: int = 4
    labels: Mapping[int, str] = field(default_factory=dict)

    def __contains__(self, level: object) -> bool:
        return isinstance(level, int) and not isinstance(level, bool) and 1 <= level <= self.levels


@dataclass(frozen=True)
class SystemModel:
    scale: OrdinalScale
    components: tuple[str, ...]
    functions: Mapping[str, tuple[str, ...]]
    clusters: Mapping[str, tuple[str, ...]]

    def component_index(self, component: str) -> int:
        return self.components.index(component)


@dataclass(frozen=True)
class StateAssignment:
    """Component levels at one moment.

    ``overrides`` maps ``(component, function)`` to a level that replaces the
    global level when that component is seen through that function.
    """

    levels: Mapping[str, int]
    overrides: Mapping[tuple[str, str], int] = field(default_factory=dict)

    def level(self, component: str, function: str | None = None) -> int:
        if function is not None and (component, function) in self.overrides:
            return self.overrides[(component, function)]
        try:
            return self.levels[component]
        except KeyError:
            raise ModelError(INVALID, f"no state for component {component!r}", component) from None


@dataclass(frozen=True)
class Override:
    component: str
    function: str
    level: int
    tick: int | None = None  # None: every tick


@dataclass(frozen=True)
class Scenario:
    ticks: int
    chain: tuple[str | None, ...]
    states: Mapping[str, tuple[int, ...]]
    overrides: tuple[Override, ...] = ()

    def assignment(self, tick: int) -> StateAssignment:
        if not 0 <= tick < self.ticks:
            raise ModelError(INVALID, f"tick {tick} outside 0..{self.ticks - 1}", str(tick))
        levels = {c: stream[tick] for c, stream in self.states.items()}
        over = {(o.component, o.function): o.level
                for o in self.overrides if o.tick is None or o.tick == tick}
        return StateAssignment(levels, over)


@dataclass(frozen=True)
class Document:
    model: SystemModel
    scenario: Scenario | None = None
    detection: Mapping[str, Any] = field(default_factory=dict)
    track: Mapping[str, Any] = field(default_factory=dict)


def cluster_components(model: SystemModel, cluster: str) -> tuple[str, ...]:
    """Union of the component sets of a cluster's functions, in model order."""
    try:
        funcs = model.clusters[cluster]
    except KeyError:
        raise ModelError(UNKNOWN_ID, f"unknown cluster id {cluster!r}", cluster) from None
    used: set[str] = set()
    for f in funcs:
        used.update(model.functions[f])
    return tuple(c for c in model.components if c in used)


def validate(model: SystemModel, scenario: Scenario | None = None) -> list[Violation]:
    out: list[Violation] = []

    def bad(code, entity, msg):
        out.append(Violation(code, entity, msg))

    scale = model.scale
    if not isinstance(scale.levels, int) or scale.levels < 2:
        bad(INVALID, "scale", f"scale needs at least 2 levels, got {scale.levels!r}")
    for lvl in scale.labels:
        if lvl not in scale:
            bad(LEVEL_RANGE, f"scale.labels[{lvl}]", "label for a level outside the scale")

    seen: set[str] = set()
    for c in model.components:
        if not isinstance(c, str) or not c:
            bad(INVALID, repr(c), "component id must be a non-empty string")
        elif c in seen:
            bad(INVALID, c, "duplicate component id")
        seen.add(c)

    for f, comps in model.functions.items():
        if not f:
            bad(INVALID, repr(f), "function id must be a non-empty string")
        if not comps:
            bad(INVALID, f, "function uses no components")
        for c in comps:
            if c not in seen:
                bad(UNKNOWN_ID, f, f"unknown component id {c!r}")
        if len(set(comps)) != len(comps):
            bad(INVALID, f, "component listed twice")

    for r, funcs in model.clusters.items():
        if not r:
            bad(INVALID, repr(r), "cluster id must be a non-empty string")
        if not funcs:
            bad(INVALID, r, "cluster has no functions")
        for f in funcs:
            if f not in model.functions:
                bad(UNKNOWN_ID, r, f"unknown function id {f!r}")

    if scenario is None:
        return out

    if not isinstance(scenario.ticks, int) or scenario.ticks < 1:
        bad(INVALID, "scenario.ticks", f"need at least one tick, got {scenario.ticks!r}")
    if len(scenario.chain) != scenario.ticks:
        bad(LENGTH_MISMATCH, "scenario.chain",
            f"chain length {len(scenario.chain)} != ticks {scenario.ticks}")
    for t, r in enumerate(scenario.chain):
        if r is not IDLE and r not in model.clusters:
            bad(UNKNOWN_ID, f"scenario.chain[{t}]", f"unknown cluster id {r!r}")

    for c in model.components:
        if c not in scenario.states:
            bad(INVALID, c, "no state stream for component")
    for c, stream in scenario.states.items():
        if c not in seen:
            bad(UNKNOWN_ID, f"scenario.states.{c}", f"unknown component id {c!r}")
        if len(stream) != scenario.ticks:
            bad(LENGTH_MISMATCH, f"scenario.states.{c}",
                f"stream length {len(stream)} != ticks {scenario.ticks}")
        for t, lvl in enumerate(stream):
            if lvl not in scale:
                bad(LEVEL_RANGE, f"scenario.states.{c}[{t}]",
                    f"level {lvl!r} outside 1..{scale.levels}")

    for i, o in enumerate(scenario.overrides):
        where = f"scenario.overrides[{i}]"
        if o.function not in model.functions:
            bad(UNKNOWN_ID, where, f"unknown function id {o.function!r}")
        elif o.component not in model.functions[o.function]:
            bad(UNKNOWN_ID, where, f"component {o.component!r} is not used by {o.function!r}")
        if o.level not in scale:
            bad(LEVEL_RANGE, where, f"level {o.level!r} outside 1..{scale.levels}")
        if o.tick is not None and not (isinstance(o.tick, int) and 0 <= o.tick < scenario.ticks):
            bad(INVALID, where, f"tick {o.tick!r} outside the time axis")
    return out


# -- document I/O --------------------------------------------------------------

def _expect(cond: bool, where: str, what: str) -> None:
    if not cond:
        raise ModelError(SYNTAX, f"{where}: expected {what}", where)


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _str_list(x: Any, where: str) -> tuple[str, ...]:
    _expect(isinstance(x, list) and all(isinstance(i, str) for i in x), where, "array of strings")
    return tuple(x)


def build_document(data: Mapping[str, Any]) -> Document:
    """Turn decoded JSON into a :class:`Document` without semantic checks."""
    _expect(isinstance(data, dict), "document", "object")
    scale_raw = data.get("scale", {"levels": 4})
    _expect(isinstance(scale_raw, dict), "scale", "object")
    levels = scale_raw.get("levels", 4)
    _expect(_is_int(levels), "scale.levels", "integer")
    labels_raw = scale_raw.get("labels", {}) or {}
    _expect(isinstance(labels_raw, dict), "scale.labels", "object")
    try:
        labels = {int(k): str(v) for k, v in labels_raw.items()}
    except ValueError:
        raise ModelError(SYNTAX, "scale.labels: keys must be integers", "scale.labels") from None

    _expect("components" in data, "components", "array of component ids")
    components = _str_list(data["components"], "components")
    funcs_raw = data.get("functions", {})
    _expect(isinstance(funcs_raw, dict), "functions", "object")
    functions = {f: _str_list(v, f"functions.{f}") for f, v in funcs_raw.items()}
    clusters_raw = data.get("clusters", {})
    _expect(isinstance(clusters_raw, dict), "clusters", "object")
    clusters = {r: _str_list(v, f"clusters.{r}") for r, v in clusters_raw.items()}
    model = SystemModel(OrdinalScale(levels, labels), components, functions, clusters)

    scenario = None
    if data.get("scenario") is not None:
        scenario = _build_scenario(data["scenario"])

    detection = data.get("detection") or {}
    track = data.get("track") or {}
    _expect(isinstance(detection, dict), "detection", "object")
    _expect(isinstance(track, dict), "track", "object")
    return Document(model, scenario, detection, track)


def _build_scenario(raw: Any) -> Scenario:
    _expect(isinstance(raw, dict), "scenario", "object")
    ticks = raw.get("ticks")
    _expect(_is_int(ticks), "scenario.ticks", "integer")
    chain = raw.get("chain")
    _expect(isinstance(chain, list) and all(c is None or isinstance(c, str) for c in chain),
            "scenario.chain", "array of cluster ids or null")
    states_raw = raw.get("states", {})
    _expect(isinstance(states_raw, dict), "scenario.states", "object")
    states = {}
    for c, s in states_raw.items():
        where = f"scenario.states.{c}"
        if _is_int(s):
            states[c] = (s,) * max(ticks, 0)
        else:
            _expect(isinstance(s, list) and all(_is_int(x) for x in s), where,
                    "integer or array of integers")
            states[c] = tuple(s)
    overrides = []
    over_raw = raw.get("overrides", []) or []
    _expect(isinstance(over_raw, list), "scenario.overrides", "array")
    for i, o in enumerate(over_raw):
        where = f"scenario.overrides[{i}]"
        _expect(isinstance(o, dict) and isinstance(o.get("component"), str)
                and isinstance(o.get("function"), str) and _is_int(o.get("level"))
                and (o.get("tick") is None or _is_int(o.get("tick"))),
                where, "object with component, function, level and optional tick")
        overrides.append(Override(o["component"], o["function"], o["level"], o.get("tick")))
    return Scenario(ticks, tuple(chain), states, tuple(overrides))


def load_document(text: str, strict: bool = True) -> Document:
    """Parse a JSON document.

    With ``strict`` the first validation problem is raised as a
    :class:`ModelError`; otherwise the unchecked document is returned and
    callers can run :func:`validate` themselves.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(SYNTAX, f"line {exc.lineno} column {exc.colno}: {exc.msg}",
                         f"{exc.lineno}:{exc.colno}") from None
    doc = build_document(data)
    if strict:
        problems = validate(doc.model, doc.scenario)
        if problems:
            p = problems[0]
            raise ModelError(p.code, str(p), p.entity)
    return doc


def parse_model(text: str) -> tuple[SystemModel, Scenario | None]:
    doc = load_document(text)
    return doc.model, doc.scenario


def document_to_dict(doc: Document) -> dict[str, Any]:
    m = doc.model
    scale: dict[str, Any] = {"levels": m.scale.levels}
    if m.scale.labels:
        scale["labels"] = {str(k): v for k, v in sorted(m.scale.labels.items())}
    out: dict[str, Any] = {
        "scale": scale,
        "components": list(m.components),
        "functions": {f: list(c) for f, c in m.functions.items()},
        "clusters": {r: list(f) for r, f in m.clusters.items()},
    }
    if doc.scenario is not None:
        out["scenario"] = scenario_to_dict(doc.scenario)
    if doc.detection:
        out["detection"] = dict(doc.detection)
    if doc.track:
        out["track"] = dict(doc.track)
    return out


def scenario_to_dict(sc: Scenario) -> dict[str, Any]:
    out: dict[str, Any] = {
        "ticks": sc.ticks,
        "chain": list(sc.chain),
        "states": {c: states_json(s) for c, s in sc.states.items()},
    }
    if sc.overrides:
        out["overrides"] = [
            {k: v for k, v in (("component", o.component), ("function", o.function),
                               ("level", o.level), ("tick", o.tick)) if v is not None}
            for o in sc.overrides
        ]
    return out


def states_json(stream: Sequence[int]) -> int | list[int]:
    """Constant streams collapse to a single integer."""
    if stream and all(x == stream[0] for x in stream):
        return stream[0]
    return list(stream)


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dump_document(doc: Document) -> str:
    return dumps(document_to_dict(doc))
