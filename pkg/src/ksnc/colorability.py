"""Deterministic noncontextual {0,1} assignments and uncolourability proofs.

Assignments are ordered by the sorted tuple of nodes that receive value 1,
compared lexicographically.  Under that order the empty support comes first,
and ``(1, 0, 0, 0)`` precedes ``(0, 0, 0, 1)``.  The search walks the subset
tree in exactly this order: a state is a support ``S`` whose largest element
is ``last``, every node up to ``last`` is decided, and children add one node
greater than ``last``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator

from .hypergraph import KSHypergraph

DEFAULT_ENUMERATION_LIMIT = 24

DeterministicAssignment = tuple[int, ...]


class NormalizationMode(enum.Enum):
    EXACTLY_ONE = "exactly-one"
    AT_MOST_ONE = "at-most-one"
    UNRESTRICTED = "unrestricted"


@dataclass(frozen=True)
class UncolourabilityCertificate:
    mode: NormalizationMode
    nodes_explored: int
    conclusion: bool
    max_extendable: DeterministicAssignment
    """Values for nodes 1..len(max_extendable): the longest node prefix that
    admits an assignment violating no constraint lying entirely inside it."""

    @property
    def max_extendable_size(self) -> int:
        return len(self.max_extendable)


class EnumerationLimitError(ValueError):
    pass


class _Search:
    def __init__(self, h: KSHypergraph, mode: NormalizationMode):
        self.h = h
        self.mode = mode
        self.n = h.node_count
        self.member = [[] for _ in range(self.n + 1)]
        for i, ctx in enumerate(h.contexts):
            for v in ctx:
                self.member[v].append(i)
        self.ctx_max = [max(c) for c in h.contexts]
        self.counts = [0] * len(h.contexts)
        self.explored = 0
        self.best_prefix = -1
        self.best_support: tuple[int, ...] = ()

    def _zero_horizon(self) -> int:
        # First node at which some context would be fully decided with no 1.
        horizon = self.n + 1
        for i, c in enumerate(self.counts):
            if c == 0 and self.ctx_max[i] < horizon:
                horizon = self.ctx_max[i]
        return horizon

    def _can_add(self, v: int, last: int) -> bool:
        if self.mode is NormalizationMode.UNRESTRICTED:
            return True
        for i in self.member[v]:
            if self.counts[i] >= 1:
                return False
        if self.mode is NormalizationMode.EXACTLY_ONE:
            # Contexts finished by nodes last+1..v with no 1 would be dead.
            for i, c in enumerate(self.counts):
                if c == 0 and self.ctx_max[i] <= v and v not in self.h.contexts[i]:
                    return False
        return True

    def _complete(self) -> bool:
        if self.mode is NormalizationMode.EXACTLY_ONE:
            return all(c == 1 for c in self.counts)
        return True

    def run(self, support: list[int], last: int) -> Iterator[tuple[int, ...]]:
        self.explored += 1
        if self.mode is NormalizationMode.EXACTLY_ONE:
            prefix = min(self._zero_horizon() - 1, self.n)
        else:
            prefix = self.n
        if prefix > self.best_prefix:
            self.best_prefix = prefix
            self.best_support = tuple(support)
        if self._complete():
            yield tuple(support)
        for v in range(last + 1, self.n + 1):
            if not self._can_add(v, last):
                continue
            support.append(v)
            for i in self.member[v]:
                self.counts[i] += 1
            yield from self.run(support, v)
            for i in self.member[v]:
                self.counts[i] -= 1
            support.pop()

    def to_vector(self, support: tuple[int, ...], length: int | None = None) -> DeterministicAssignment:
        length = self.n if length is None else length
        chosen = set(support)
        return tuple(1 if v in chosen else 0 for v in range(1, length + 1))


def satisfies(h: KSHypergraph, values: DeterministicAssignment, mode: NormalizationMode) -> bool:
    if len(values) != h.node_count:
        return False
    for ctx in h.contexts:
        total = sum(values[v - 1] for v in ctx)
        if mode is NormalizationMode.EXACTLY_ONE and total != 1:
            return False
        if mode is NormalizationMode.AT_MOST_ONE and total > 1:
            return False
    return True


def enumerate_assignments(
    h: KSHypergraph,
    mode: NormalizationMode,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> Iterator[DeterministicAssignment]:
    """Yield every assignment satisfying ``mode`` exactly once, in support-lexicographic order.

    UNRESTRICTED enumeration is refused above ``limit`` nodes since it
    produces 2**n vectors.
    """
    if mode is NormalizationMode.UNRESTRICTED and h.node_count > limit:
        raise EnumerationLimitError(
            f"unrestricted enumeration of {h.node_count} nodes would yield 2^{h.node_count} "
            f"assignments; the limit is {limit} nodes"
        )
    search = _Search(h, mode)
    for support in search.run([], 0):
        yield search.to_vector(support)


def find_coloring(h: KSHypergraph, mode: NormalizationMode = NormalizationMode.EXACTLY_ONE) -> DeterministicAssignment | None:
    search = _Search(h, mode)
    for support in search.run([], 0):
        return search.to_vector(support)
    return None


def prove_uncolourable(h: KSHypergraph, mode: NormalizationMode = NormalizationMode.EXACTLY_ONE) -> UncolourabilityCertificate:
    """Exhaustively search for an assignment, stopping at the first one found.

    ``conclusion`` is True when the whole tree was explored without success.
    """
    search = _Search(h, mode)
    found = None
    for support in search.run([], 0):
        found = support
        break
    if found is not None:
        return UncolourabilityCertificate(mode, search.explored, False, search.to_vector(found))
    prefix = search.to_vector(search.best_support, search.best_prefix)
    return UncolourabilityCertificate(mode, search.explored, True, prefix)
