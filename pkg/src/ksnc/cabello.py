"""Parity functionals over deterministic assignments and the five-outcome extensions.

With {0,1} variables the parity functional is
``alpha' = sum over contexts of XOR(values in the context)``; the
{-1,+1} form is recovered by ``alpha = 2 alpha' - (number of terms)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .colorability import (
    DEFAULT_ENUMERATION_LIMIT,
    DeterministicAssignment,
    EnumerationLimitError,
    NormalizationMode,
    enumerate_assignments,
)
from .hypergraph import KSHypergraph


@dataclass(frozen=True)
class ParityFunctional:
    terms: tuple[tuple[int, ...], ...]

    @classmethod
    def from_hypergraph(cls, h: KSHypergraph) -> "ParityFunctional":
        return cls(tuple(tuple(c) for c in h.contexts))

    @property
    def node_count(self) -> int:
        return max((v for t in self.terms for v in t), default=0)


def alpha_prime(assignment: DeterministicAssignment, f: ParityFunctional) -> int:
    if len(assignment) < f.node_count:
        raise ValueError(f"assignment of length {len(assignment)} for a functional over {f.node_count} nodes")
    total = 0
    for term in f.terms:
        parity = 0
        for v in term:
            parity ^= assignment[v - 1]
        total += parity
    return total


def alpha(assignment: DeterministicAssignment, f: ParityFunctional) -> int:
    return 2 * alpha_prime(assignment, f) - len(f.terms)


def alpha_from_spins(spins: Sequence[int], f: ParityFunctional) -> int:
    """The {-1,+1} form: minus the sum over terms of the product of the spins."""
    total = 0
    for term in f.terms:
        prod = 1
        for v in term:
            prod *= spins[v - 1]
        total -= prod
    return total


def alpha_prime_operational(statistics: Sequence[Sequence], f: ParityFunctional) -> Fraction:
    """alpha'(P) from per-context outcome distributions.

    Outcome k of context i sets the k-th node of that context to 1 and its
    other nodes to 0; each term's expectation is the probability-weighted
    parity of those values.
    """
    if len(statistics) != len(f.terms):
        raise ValueError(f"{len(statistics)} distributions for {len(f.terms)} terms")
    total = Fraction(0)
    for i, (term, dist) in enumerate(zip(f.terms, statistics), start=1):
        dist = [Fraction(p) for p in dist]
        if len(dist) != len(term):
            raise ValueError(f"context {i}: {len(dist)} probabilities for {len(term)} outcomes")
        if any(p < 0 for p in dist) or sum(dist) != 1:
            raise ValueError(f"context {i}: distribution {dist} is not normalized")
        for k, p in enumerate(dist):
            values = [int(j == k) for j in range(len(term))]
            parity = 0
            for x in values:
                parity ^= x
            total += p * parity
    return total


def scan(h: KSHypergraph, f: ParityFunctional | None = None, limit: int = DEFAULT_ENUMERATION_LIMIT) -> dict:
    """Exhaustive scan of all 2^n assignments: maxima and maximizers of alpha'."""
    f = f or ParityFunctional.from_hypergraph(h)
    best = -1
    maximizers: list[DeterministicAssignment] = []
    identity_holds = True
    for w in enumerate_assignments(h, NormalizationMode.UNRESTRICTED, limit):
        ap = alpha_prime(w, f)
        if alpha_from_spins([2 * x - 1 for x in w], f) != alpha(w, f):
            identity_holds = False
        if ap > best:
            best, maximizers = ap, [w]
        elif ap == best:
            maximizers.append(w)
    return {
        "max_alpha_prime": best,
        "max_alpha": 2 * best - len(f.terms),
        "maximizers": maximizers,
        "identity_holds": identity_holds,
    }


@dataclass(frozen=True)
class ExtendedHypergraph:
    base: KSHypergraph
    extra_nodes: tuple[int, ...]
    merged: bool
    hypergraph: KSHypergraph


def extend_hypergraph(h: KSHypergraph, merged: bool) -> ExtendedHypergraph:
    """Append a fifth-outcome style extra node to every context.

    Unmerged: one fresh node per context.  Merged: a single shared node.
    """
    n = h.node_count
    if merged:
        extras = tuple(n + 1 for _ in h.contexts)
        count = n + 1
    else:
        extras = tuple(n + 1 + i for i in range(len(h.contexts)))
        count = n + len(h.contexts)
    contexts = tuple(tuple(c) + (x,) for c, x in zip(h.contexts, extras))
    return ExtendedHypergraph(h, extras, merged, KSHypergraph(count, contexts))


@dataclass(frozen=True)
class ExtensionSummary:
    merged: bool
    count: int
    assignments: tuple[DeterministicAssignment, ...]
    base_subnormalized_count: int | None = None
    lift_is_bijection: bool | None = None


def lift(h: KSHypergraph, e: ExtendedHypergraph, base: DeterministicAssignment) -> DeterministicAssignment:
    """Extend a subnormalized base assignment by switching on the extra node of every empty context."""
    values = list(base) + [0] * (e.hypergraph.node_count - h.node_count)
    for ctx, x in zip(h.contexts, e.extra_nodes):
        if sum(base[v - 1] for v in ctx) == 0:
            values[x - 1] = 1
    return tuple(values)


def analyze_extension(e: ExtendedHypergraph, limit: int = DEFAULT_ENUMERATION_LIMIT) -> ExtensionSummary:
    # Extra nodes are determined by the base values, so only base nodes count against the limit.
    h = e.hypergraph
    if e.base.node_count > limit:
        raise EnumerationLimitError(f"base hypergraph has {e.base.node_count} nodes; the limit is {limit}")
    found = tuple(enumerate_assignments(h, NormalizationMode.EXACTLY_ONE))
    if e.merged:
        return ExtensionSummary(True, len(found), found)
    base = list(enumerate_assignments(e.base, NormalizationMode.AT_MOST_ONE))
    lifted = {lift(e.base, e, w) for w in base}
    restricted = [w[: e.base.node_count] for w in found]
    bijective = (
        lifted == set(found)
        and len(set(restricted)) == len(restricted)
        and set(restricted) == set(base)
    )
    return ExtensionSummary(False, len(found), found, len(base), bijective)


def trivial_statistics(sizes: Iterable[int]) -> list[list[Fraction]]:
    """Uniform outcome distributions, one per context."""
    return [[Fraction(1, m)] * m for m in sizes]
