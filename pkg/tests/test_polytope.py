from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ksnc.colorability import NormalizationMode, find_coloring
from ksnc.hypergraph import KSHypergraph, incidence_matrix, quotient_by_equivalences, single_context
from ksnc.polytope import (
    EmptyPolytopeError,
    bound_by_selection_oracle,
    enumerate_vertices,
    evaluate_A,
    noncontextual_bound,
    objective,
)

from .oracles import basis_enumeration_vertices
from .strategies import node_permutations, small_hypergraphs

HALF = Fraction(1, 2)
EMPTY = KSHypergraph(5, ((1, 2), (3, 4), (1, 2, 3, 4, 5)))


def in_polytope(h, w):
    z = incidence_matrix(h)
    return all(0 <= x <= 1 for x in w) and all(sum(Fraction(int(z[i, j])) * w[j] for j in range(h.node_count)) == 1 for i in range(len(h.contexts)))


def test_vertex_count_matches_fixture(vertices18, oracle18):
    assert vertices18.complete
    assert len(vertices18) == oracle18["vertex_count"] == 146


def test_vertices_match_basis_enumeration(h18, vertices18):
    assert set(vertices18.vertices) == basis_enumeration_vertices(h18)


def test_vertices_are_feasible_and_sorted(h18, vertices18):
    assert list(vertices18.vertices) == sorted(vertices18.vertices)
    assert all(in_polytope(h18, w) for w in vertices18)


def test_no_deterministic_vertex(vertices18):
    assert all(any(0 < x < 1 for x in w) for w in vertices18)


def test_vertex_set_closed_under_rotation(h18, vertices18):
    # kappa -> kappa + 3 (mod 18) maps contexts to contexts
    shift = {v: (v + 2) % 18 + 1 for v in h18.nodes}
    assert {frozenset(shift[v] for v in c) for c in h18.contexts} == {frozenset(c) for c in h18.contexts}
    vs = set(vertices18.vertices)
    for w in vs:
        moved = [None] * 18
        for v in h18.nodes:
            moved[shift[v] - 1] = w[v - 1]
        assert tuple(moved) in vs


def test_bound_and_witness(h18, vertices18):
    rep = noncontextual_bound(h18, vertices18)
    assert rep.bound == Fraction(5, 6)
    assert rep.vertex_count == 146
    assert in_polytope(h18, rep.witness)
    assert sorted(rep.per_context_max) == sorted((1, 1, HALF, HALF, 1, 1, HALF, 1, 1))
    assert objective(h18, rep.witness) == rep.bound


def test_printed_vertex_attains_bound(h18, vertices18):
    w = (1, 0, 0, 0, 1, 0, 0, 0, HALF, HALF, HALF, 0, 0, 0, 1, 0, 0, 0)
    w = tuple(Fraction(x) for x in w)
    assert w in set(vertices18.vertices)
    assert objective(h18, w) == Fraction(5, 6)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_objective_convexity(h18, vertices18, data):
    vs = vertices18.vertices
    picks = data.draw(st.lists(st.integers(0, len(vs) - 1), min_size=2, max_size=5))
    weights = data.draw(st.lists(st.integers(1, 9), min_size=len(picks), max_size=len(picks)))
    total = sum(weights)
    lam = [Fraction(x, total) for x in weights]
    point = tuple(sum(l * vs[p][j] for l, p in zip(lam, picks)) for j in range(18))
    assert in_polytope(h18, point)
    assert objective(h18, point) <= sum(l * objective(h18, vs[p]) for l, p in zip(lam, picks))
    assert objective(h18, point) <= Fraction(5, 6)


@settings(max_examples=15, deadline=None)
@given(st.data())
def test_bound_invariant_under_relabelling(h18, data):
    perm = data.draw(node_permutations(18))
    order = data.draw(st.permutations(range(9)))
    g = h18.relabel(perm, order)
    vs = enumerate_vertices(g)
    assert len(vs) == 146
    assert noncontextual_bound(g, vs).bound == Fraction(5, 6)


@settings(max_examples=80, deadline=None)
@given(small_hypergraphs())
def test_small_hypergraphs(h):
    vs = enumerate_vertices(h)
    assert set(vs.vertices) == basis_enumeration_vertices(h)
    colourable = find_coloring(h, NormalizationMode.EXACTLY_ONE) is not None
    if not vs.vertices:
        assert not colourable
        with pytest.raises(EmptyPolytopeError):
            noncontextual_bound(h, vs)
        return
    bound = noncontextual_bound(h, vs).bound
    assert (bound == 1) == colourable
    total = 1
    for c in h.contexts:
        total *= len(c)
    if total <= 500:
        assert bound_by_selection_oracle(h) == bound


def test_single_context_bound():
    h = single_context()
    rep = noncontextual_bound(h)
    assert rep.bound == 1
    assert rep.vertex_count == 4
    assert bound_by_selection_oracle(h) == 1


def test_three_node_toy():
    h = quotient_by_equivalences([2, 2], [[(1, 1), (2, 1)]])
    vs = enumerate_vertices(h)
    assert set(vs.vertices) == {(1, 0, 0), (0, 1, 1)}
    assert noncontextual_bound(h).bound == 1


def test_empty_polytope():
    assert enumerate_vertices(EMPTY).vertices == ()
    assert enumerate_vertices(EMPTY).complete
    with pytest.raises(EmptyPolytopeError):
        noncontextual_bound(EMPTY)
    with pytest.raises(EmptyPolytopeError):
        bound_by_selection_oracle(EMPTY)


def test_zero_dimensional_polytope():
    h = KSHypergraph(2, ((1,), (1, 2)))
    assert enumerate_vertices(h).vertices == ((1, 0),)


def test_oracle_limit(h18):
    with pytest.raises(ValueError, match="exceed"):
        bound_by_selection_oracle(h18, limit=1000)


def test_oracle_workers_agree():
    h = quotient_by_equivalences([3, 3, 3], [[(1, 1), (2, 1)], [(2, 2), (3, 1)], [(3, 2), (1, 2)]])
    assert bound_by_selection_oracle(h, workers=2) == bound_by_selection_oracle(h)


def test_evaluate_A():
    assert evaluate_A([[1, 1], [0, Fraction(1, 2)]]) == Fraction(5, 8)
    # contexts weigh equally regardless of size
    assert evaluate_A([[1], [0, 0, 0]]) == Fraction(1, 2)
    with pytest.raises(ValueError):
        evaluate_A([[Fraction(3, 2)]])
    with pytest.raises(ValueError):
        evaluate_A([[1, 1]], single_context())
