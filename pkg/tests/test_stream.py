import json
import random

import pytest

from cliquefusion.model import ModelError, Scenario
from cliquefusion.reveal import StructureSpec, reveal
from cliquefusion.stream import (
    Status,
    TrackConfig,
    k_of_m,
    run,
    tick_graph,
    track_status,
)
from cliquefusion.model import dumps

Q3 = "Clique/1/s3,s5,s6"
SPEC = StructureSpec(threshold=1, min_size=3)


def rescan(hits, t, k, m):
    window = [hits[i] if i >= 0 else 0 for i in range(t - m + 1, t + 1)]
    return sum(window) >= k


def test_tick_graphs(example_model, example_scenario):
    g1 = tick_graph(example_model, example_scenario, 1)
    assert (len(g1.vertices), len(g1.edges)) == (8, 15)
    g2 = tick_graph(example_model, example_scenario, 2)
    assert g2.vertices == ("s5", "s6", "s7", "s8") and len(g2.edges) == 5
    with pytest.raises(ModelError):
        tick_graph(example_model, example_scenario, 6)


def test_idle_tick_is_empty(example_model, example_scenario):
    sc = Scenario(6, ("F1", None, "F1", None, None, None), example_scenario.states)
    g = tick_graph(example_model, sc, 1)
    assert not g.vertices and not g.edges


@pytest.mark.parametrize("hits, tick, k, m, expected", [
    ([0, 1, 0, 1, 1, 0], 3, 2, 3, True),
    ([0, 1, 0, 1, 1, 0], 2, 2, 3, False),
    ([1], 0, 1, 3, True),
])
def test_k_of_m(hits, tick, k, m, expected):
    assert k_of_m([bool(h) for h in hits], tick, TrackConfig(k, m)) is expected


def test_k_of_m_bounds():
    with pytest.raises(IndexError):
        k_of_m([True], 1, TrackConfig(1, 1))
    with pytest.raises(ValueError):
        TrackConfig(3, 2)
    with pytest.raises(ValueError):
        TrackConfig(0, 2)


def test_k_of_m_matches_window_rescan():
    rng = random.Random(1)
    for _ in range(2000):
        m = rng.randint(1, 8)
        k = rng.randint(1, m)
        hits = [rng.random() < 0.4 for _ in range(rng.randint(1, 20))]
        status = track_status(hits, TrackConfig(k, m))
        for t in range(len(hits)):
            want = rescan(hits, t, k, m)
            assert k_of_m(hits, t, TrackConfig(k, m)) is want
            assert (status[t] is Status.ACTIVE) is want


def test_worked_example_run(example_model, example_scenario):
    log = run(example_model, example_scenario, SPEC, TrackConfig(2, 3))
    assert list(log.tracks) == [Q3]
    tr = log.tracks[Q3]
    assert tr.hit_ticks == (1, 3, 4)
    assert tr.active_ticks == (3, 4, 5)
    assert tr.initiated_at == 3
    assert tr.status == (Status.ABSENT, Status.CANDIDATE, Status.CANDIDATE,
                         Status.ACTIVE, Status.ACTIVE, Status.ACTIVE)
    assert [r.revealed for r in log.records] == [(), (Q3,), (), (Q3,), (Q3,), ()]


def test_degenerate_window(example_model, example_scenario):
    log = run(example_model, example_scenario, SPEC, TrackConfig(1, 1))
    for tr in log.tracks.values():
        assert tr.active_ticks == tr.hit_ticks


def test_all_idle_has_no_tracks(example_model, example_scenario):
    sc = Scenario(6, (None,) * 6, example_scenario.states)
    log = run(example_model, sc, SPEC, TrackConfig(2, 3))
    assert log.tracks == {}
    assert all(r.revealed == () for r in log.records)


def test_cluster_sized_min_size(example_model, example_scenario):
    # at F3 ticks the cluster has two functions, so {s5,s6} qualifies as a clique
    log = run(example_model, example_scenario, StructureSpec(threshold=1), TrackConfig(2, 3))
    assert log.tracks["Clique/1/s5,s6"].hit_ticks == (2,)
    assert log.tracks[Q3].hit_ticks == (1, 3, 4)


def test_every_logged_id_has_a_track_and_hits(example_model, example_scenario):
    log = run(example_model, example_scenario, StructureSpec(threshold=2, min_size=2),
              TrackConfig(2, 3))
    for r in log.records:
        for sid in r.revealed:
            assert log.tracks[sid].hits[r.tick]
    for tr in log.tracks.values():
        assert any(tr.hits)


def test_ticks_are_independent_of_history(example_model, example_scenario):
    log = run(example_model, example_scenario, SPEC, TrackConfig(2, 3))
    for t in range(example_scenario.ticks):
        alone = tuple(s.canonical_id for s in reveal(tick_graph(example_model, example_scenario, t), SPEC))
        assert alone == log.records[t].revealed


def test_q3_never_seen_at_f2_or_f3(example_model, example_scenario):
    sc = Scenario(4, ("F2", "F3", "F2", "F3"),
                  {c: s[:4] for c, s in example_scenario.states.items()})
    log = run(example_model, sc, StructureSpec(threshold=1, min_size=2), TrackConfig(1, 1))
    assert Q3 not in log.tracks


def test_serialization_is_deterministic(example_model, example_scenario):
    a = dumps(run(example_model, example_scenario, SPEC, TrackConfig(2, 3)).to_dict())
    b = dumps(run(example_model, example_scenario, SPEC, TrackConfig(2, 3)).to_dict())
    assert a == b
    payload = json.loads(a)
    assert payload["tracks"][Q3] == {"hits": [0, 1, 0, 1, 1, 0],
                                     "status": ["Absent", "Candidate", "Candidate",
                                                "Active", "Active", "Active"],
                                     "initiated_at": 3}
    assert payload["ticks"][1] == {"tick": 1, "cluster": "F1",
                                   "graph": {"vertices": 8, "edges": 15}, "revealed": [Q3]}
