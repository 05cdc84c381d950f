"""Clique-like fault structures in fused multi-function system graphs."""

__version__ = "0.1.0"

from .fusion import ColoredGraph, fuse, function_graph, integrated_graph, merge_color, to_dot
from .gen import StreamModel, empirical_marginals, generate_streams
from .model import (
    Document,
    ModelError,
    OrdinalScale,
    Scenario,
    StateAssignment,
    SystemModel,
    cluster_components,
    load_document,
    parse_model,
    validate,
)
from .plan import (
    ImprovementAction,
    ImprovementPlan,
    PlanInfeasible,
    apply_plan,
    destruction_plan,
    destruction_targets,
)
from .reveal import (
    Kind,
    RevealedStructure,
    StructureSpec,
    canonical_id,
    classify,
    find_cliques,
    find_quasi,
    oracle,
    reveal,
)
from .stream import Status, Track, TrackConfig, TrackLog, k_of_m, run, tick_graph
