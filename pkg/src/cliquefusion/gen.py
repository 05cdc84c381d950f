"""Monte-Carlo component state streams.

Randomness comes from numpy's Philox counter-based generator.  The seed is
expanded with ``SeedSequence(seed).spawn(n)`` so that component ``i`` (in
model order) always gets the same independent child stream, regardless of
how many other components exist after it.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .model import SystemModel

KINDS = ("constant", "iid", "markov")


@dataclass(frozen=True)
class StreamModel:
    """How to draw level sequences.

    ``initial`` is a distribution over levels 1..L (uniform when omitted).
    ``transition[i][j]`` is the probability of moving from level i+1 to
    level j+1.  For ``constant`` streams, ``values`` pins the level of
    chosen components; the others draw once from ``initial``.
    """

    kind: str = "iid"
    initial: tuple[float, ...] | None = None
    transition: tuple[tuple[float, ...], ...] | None = None
    seed: int = 0
    values: Mapping[str, int] | None = None

    def check(self, levels: int) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown stream kind {self.kind!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.initial is not None:
            _check_dist(self.initial, levels, "initial distribution")
        if self.kind == "markov":
            if self.transition is None or len(self.transition) != levels:
                raise ValueError(f"markov streams need a {levels}x{levels} transition matrix")
            for i, row in enumerate(self.transition):
                _check_dist(row, levels, f"transition row {i + 1}")
        for c, v in (self.values or {}).items():
            if not 1 <= v <= levels:
                raise ValueError(f"{c}: level {v} outside 1..{levels}")


def _check_dist(p: Sequence[float], levels: int, what: str) -> None:
    if len(p) != levels:
        raise ValueError(f"{what} has {len(p)} entries, scale has {levels} levels")
    if any(x < 0 for x in p) or abs(sum(p) - 1.0) > 1e-9:
        raise ValueError(f"{what} must be non-negative and sum to 1")


def _rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(seed).spawn(n)]


def generate_streams(model: SystemModel, ticks: int,
                     stream_model: StreamModel) -> dict[str, tuple[int, ...]]:
    L = model.scale.levels
    stream_model.check(L)
    if ticks < 1:
        raise ValueError("ticks must be positive")
    levels = np.arange(1, L + 1)
    init = np.full(L, 1.0 / L) if stream_model.initial is None else np.asarray(stream_model.initial)
    values = stream_model.values or {}
    out: dict[str, tuple[int, ...]] = {}
    for comp, rng in zip(model.components, _rngs(stream_model.seed, len(model.components))):
        if stream_model.kind == "constant":
            lvl = values[comp] if comp in values else int(rng.choice(levels, p=init))
            seq = [lvl] * ticks
        elif stream_model.kind == "iid":
            seq = rng.choice(levels, size=ticks, p=init).tolist()
        else:
            P = np.asarray(stream_model.transition)
            seq = [int(rng.choice(levels, p=init))]
            for _ in range(ticks - 1):
                seq.append(int(rng.choice(levels, p=P[seq[-1] - 1])))
        out[comp] = tuple(int(x) for x in seq)
    return out


def empirical_marginals(streams: Mapping[str, Sequence[int]],
                        levels: int | None = None) -> dict[int, float]:
    """Share of each level over all components and ticks."""
    counts = Counter(x for s in streams.values() for x in s)
    total = sum(counts.values())
    if total == 0:
        raise ValueError("no samples")
    keys = range(1, levels + 1) if levels else sorted(counts)
    return {k: counts.get(k, 0) / total for k in keys}
