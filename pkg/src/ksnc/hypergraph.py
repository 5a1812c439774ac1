"""Contextuality hypergraphs: measurement events, equivalence classes, incidence.

Nodes are equivalence classes of measurement events, numbered from 1.
Contexts are ordered lists of node ids, one per measurement, so the
position of a node inside a context is the outcome index that produced it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np


@dataclass(frozen=True, order=True)
class MeasurementEvent:
    """The event [k|M_i]: outcome ``outcome`` of measurement ``measurement`` (both 1-based)."""

    measurement: int
    outcome: int

    def __str__(self) -> str:
        return f"[{self.outcome}|M{self.measurement}]"


@dataclass(frozen=True)
class EquivalenceClass:
    id: int
    members: frozenset[MeasurementEvent]


@dataclass(frozen=True)
class KSHypergraph:
    node_count: int
    contexts: tuple[tuple[int, ...], ...]
    node_labels: Mapping[int, EquivalenceClass] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "contexts", tuple(tuple(int(v) for v in c) for c in self.contexts))

    @property
    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    @property
    def context_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.contexts)

    def contexts_of(self, node: int) -> list[int]:
        """0-based indices of the contexts containing ``node``."""
        return [i for i, c in enumerate(self.contexts) if node in c]

    def event_of(self, context: int, position: int) -> MeasurementEvent:
        return MeasurementEvent(context + 1, position + 1)

    def relabel(self, perm: Mapping[int, int], context_order: Sequence[int] | None = None) -> "KSHypergraph":
        """Apply a node permutation (old id -> new id) and optionally reorder contexts."""
        order = range(len(self.contexts)) if context_order is None else context_order
        contexts = tuple(tuple(perm[v] for v in self.contexts[i]) for i in order)
        return KSHypergraph(self.node_count, contexts)


def quotient_by_equivalences(
    measurements: Sequence[int],
    equivalences: Iterable[Iterable[MeasurementEvent | Sequence[int]]] = (),
) -> KSHypergraph:
    """Identify operationally equivalent events and return the resulting hypergraph.

    ``measurements[i]`` is the outcome count of measurement i+1.  Each
    equivalence set lists events as :class:`MeasurementEvent` or ``(i, k)``
    pairs.  Node ids are assigned by first appearance, scanning measurements
    in order and outcomes within each measurement in order, so the numbering
    depends only on the events and never on how the equivalence sets are
    listed.
    """
    counts = [int(m) for m in measurements]
    for i, m in enumerate(counts, start=1):
        if m < 1:
            raise ValueError(f"measurement M{i} must have at least one outcome, got {m}")

    owner: dict[MeasurementEvent, int] = {}
    groups: list[list[MeasurementEvent]] = []
    for raw in equivalences:
        group = [_as_event(e) for e in raw]
        for ev in group:
            if not 1 <= ev.measurement <= len(counts):
                raise ValueError(f"{ev} refers to an undeclared measurement")
            if not 1 <= ev.outcome <= counts[ev.measurement - 1]:
                raise ValueError(f"{ev} exceeds the outcome count of M{ev.measurement}")
        seen_measurements: set[int] = set()
        for ev in group:
            if ev.measurement in seen_measurements:
                raise ValueError(
                    f"two outcomes of M{ev.measurement} declared equivalent in {sorted(map(str, group))}"
                )
            seen_measurements.add(ev.measurement)
            if ev in owner:
                raise ValueError(f"{ev} appears in more than one equivalence set")
            owner[ev] = len(groups)
        groups.append(group)

    group_id: dict[int, int] = {}
    event_node: dict[MeasurementEvent, int] = {}
    next_id = 1
    contexts = []
    for i, m in enumerate(counts, start=1):
        ctx = []
        for k in range(1, m + 1):
            ev = MeasurementEvent(i, k)
            g = owner.get(ev)
            if g is None:
                node = next_id
                next_id += 1
            elif g in group_id:
                node = group_id[g]
            else:
                node = group_id[g] = next_id
                next_id += 1
            event_node[ev] = node
            ctx.append(node)
        contexts.append(tuple(ctx))

    members: dict[int, set[MeasurementEvent]] = {}
    for ev, node in event_node.items():
        members.setdefault(node, set()).add(ev)
    labels = {node: EquivalenceClass(node, frozenset(evs)) for node, evs in members.items()}
    return KSHypergraph(next_id - 1, tuple(contexts), labels)


def _as_event(e: MeasurementEvent | Sequence[int]) -> MeasurementEvent:
    if isinstance(e, MeasurementEvent):
        return e
    i, k = e
    return MeasurementEvent(int(i), int(k))


def incidence_matrix(h: KSHypergraph) -> np.ndarray:
    """The {0,1} matrix Z with Z[i, kappa-1] = 1 iff node kappa lies in context i."""
    z = np.zeros((len(h.contexts), h.node_count), dtype=np.int64)
    for i, ctx in enumerate(h.contexts):
        for v in ctx:
            z[i, v - 1] = 1
    return z


def validate(h: KSHypergraph) -> list[str]:
    """Return one diagnostic per violated structural invariant (empty if valid)."""
    problems = []
    if h.node_count < 0:
        problems.append(f"negative node count {h.node_count}")
    if not h.contexts:
        problems.append("hypergraph has no contexts")
    covered: set[int] = set()
    for i, ctx in enumerate(h.contexts, start=1):
        if not ctx:
            problems.append(f"context {i} is empty")
        seen: set[int] = set()
        for v in ctx:
            if not 1 <= v <= h.node_count:
                problems.append(f"context {i} refers to node {v} outside 1..{h.node_count}")
            elif v in seen:
                problems.append(f"context {i} repeats node {v}")
            seen.add(v)
        covered |= seen
    for v in h.nodes:
        if v not in covered:
            problems.append(f"node {v} belongs to no context")
    return problems


def require_valid(h: KSHypergraph) -> None:
    problems = validate(h)
    if problems:
        raise ValueError("invalid hypergraph: " + "; ".join(problems))


def single_context(size: int = 4) -> KSHypergraph:
    return quotient_by_equivalences([size])


def ceg18() -> KSHypergraph:
    """The 18-node, 9-context hypergraph built from the bundled event data."""
    doc = json.loads(resources.files("ksnc.data").joinpath("ceg18.json").read_text())
    return quotient_by_equivalences(doc["measurements"], doc["equivalences"])
