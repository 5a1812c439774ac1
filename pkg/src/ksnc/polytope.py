"""The polytope of probabilistic noncontextual assignments and its noncontextual bound.

The polytope is ``{w : Z w = u, 0 <= w <= 1}`` where ``Z`` is the incidence
matrix.  Vertices are enumerated exactly: the affine hull of ``Z w = u`` is
parameterized by its free coordinates ``t``, the box facets become
inequalities ``a . (t, s) >= 0`` in homogenized coordinates, and the double
description method builds the extreme rays of that cone one facet at a time.
Rays are kept as primitive integer vectors and each ray carries the set of
processed facets it lies on as a bitmask.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .hypergraph import KSHypergraph
from .linalg import integer_inverse_columns, integer_row, primitive, rank, solve_affine
from .lp import ExactLP

Assignment = tuple[Fraction, ...]

DEFAULT_SELECTION_LIMIT = 10**6


class EmptyPolytopeError(ValueError):
    pass


@dataclass(frozen=True)
class VertexSet:
    vertices: tuple[Assignment, ...]
    complete: bool

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)


@dataclass(frozen=True)
class BoundReport:
    bound: Fraction
    witness: Assignment
    per_context_max: tuple[Fraction, ...]
    vertex_count: int


@dataclass(frozen=True)
class _Parameterization:
    particular: list[Fraction]
    basis: list[list[Fraction]]  # one null-space vector per free coordinate

    @property
    def dim(self) -> int:
        return len(self.basis)

    def point(self, t: Sequence[Fraction]) -> Assignment:
        w = list(self.particular)
        for tj, v in zip(t, self.basis):
            if tj:
                for k, x in enumerate(v):
                    if x:
                        w[k] += tj * x
        return tuple(w)


def _parameterize(h: KSHypergraph) -> _Parameterization | None:
    n = h.node_count
    z = [[1 if v in ctx else 0 for v in range(1, n + 1)] for ctx in h.contexts]
    solved = solve_affine(z, [1] * len(z))
    if solved is None:
        return None
    return _Parameterization(*solved)


def _box_rows(par: _Parameterization) -> list[tuple[int, ...]]:
    """Homogenized facet rows over (t_1..t_d, s): w_k >= 0 then 1 - w_k >= 0, for each node k."""
    rows = []
    for k, p in enumerate(par.particular):
        coeff = [v[k] for v in par.basis]
        rows.append(integer_row(coeff + [p]))
        rows.append(integer_row([-c for c in coeff] + [1 - p]))
    return rows


def _dot(a: Sequence[int], r: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, r) if x)


def _double_description(rows: list[tuple[int, ...]], dim: int) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone ``{x : row . x >= 0 for all rows}`` in ``Z^dim``.

    The first row must be ``s >= 0`` and the rows must span ``Q^dim``.
    """
    chosen: list[int] = []
    for idx, row in enumerate(rows):
        if rank([rows[j] for j in chosen] + [row]) == len(chosen) + 1:
            chosen.append(idx)
            if len(chosen) == dim:
                break
    if len(chosen) < dim:
        raise ValueError("facet rows do not span the ambient space")

    generators = integer_inverse_columns([rows[j] for j in chosen])
    rays: list[tuple[int, ...]] = []
    zeros: list[int] = []
    for j, g in enumerate(generators):
        rays.append(g)
        zeros.append(sum(1 << chosen[i] for i in range(dim) if i != j))

    done = set(chosen)
    for idx, row in enumerate(rows):
        if idx in done:
            continue
        bit = 1 << idx
        vals = [_dot(row, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        new_rays = []
        new_zeros = []
        if pos and neg:
            need = dim - 2
            for p in pos:
                zp = zeros[p]
                for q in neg:
                    common = zp & zeros[q]
                    if common.bit_count() < need:
                        continue
                    if not _adjacent(common, p, q, zeros):
                        continue
                    vp, vq = vals[p], -vals[q]
                    r = primitive([vp * a + vq * b for a, b in zip(rays[q], rays[p])])
                    new_rays.append(r)
                    new_zeros.append(common | bit)
        kept = [i for i, v in enumerate(vals) if v >= 0]
        rays = [rays[i] for i in kept] + new_rays
        zeros = [zeros[i] | (bit if vals[i] == 0 else 0) for i in kept] + new_zeros
        done.add(idx)
    return rays


def _adjacent(common: int, p: int, q: int, zeros: list[int]) -> bool:
    for i, z in enumerate(zeros):
        if i != p and i != q and common & z == common:
            return False
    return True


def enumerate_vertices(h: KSHypergraph) -> VertexSet:
    """All vertices of the assignment polytope, exact, in lexicographic order.

    An empty polytope yields an empty, complete vertex set.
    """
    par = _parameterize(h)
    if par is None:
        return VertexSet((), True)
    if par.dim == 0:
        w = tuple(par.particular)
        ok = all(0 <= x <= 1 for x in w)
        return VertexSet((w,) if ok else (), True)

    d = par.dim
    rows = [tuple([0] * d + [1])] + _box_rows(par)
    rays = _double_description(rows, d + 1)
    vertices = set()
    for r in rays:
        s = r[-1]
        if s <= 0:
            # Bounded polytope: a ray with s = 0 only survives if the cone is degenerate.
            raise AssertionError(f"unexpected recession direction {r}")
        vertices.add(par.point([Fraction(x, s) for x in r[:-1]]))
    return VertexSet(tuple(sorted(vertices)), True)


def objective(h: KSHypergraph, w: Sequence[Fraction]) -> Fraction:
    """Average over contexts of the largest value assigned inside the context."""
    return sum((max(w[v - 1] for v in ctx) for ctx in h.contexts), Fraction(0)) / len(h.contexts)


def noncontextual_bound(h: KSHypergraph, vertices: VertexSet | None = None) -> BoundReport:
    """Maximize the average max-predictability over the polytope.

    The objective is convex, so its maximum is attained at a vertex; ties go
    to the lexicographically smallest vertex.
    """
    vs = enumerate_vertices(h) if vertices is None else vertices
    if not vs.vertices:
        raise EmptyPolytopeError("the assignment polytope is empty")
    best = None
    best_val = None
    for w in vs.vertices:
        val = objective(h, w)
        if best_val is None or val > best_val:
            best, best_val = w, val
    per_context = tuple(max(best[v - 1] for v in ctx) for ctx in h.contexts)
    return BoundReport(best_val, best, per_context, len(vs.vertices))


def _selection_objectives(h: KSHypergraph) -> list[tuple[int, ...]]:
    n = h.node_count
    seen: dict[tuple[int, ...], None] = {}
    for selection in product(*h.contexts):
        c = [0] * n
        for v in selection:
            c[v - 1] += 1
        seen.setdefault(tuple(c), None)
    return list(seen)


def _max_over(lp: ExactLP, objectives: Sequence[Sequence[int]]) -> Fraction | None:
    best = None
    for c in objectives:
        value = lp.maximize(c)
        if best is None or value > best:
            best = value
    return best


def _oracle_worker(args) -> Fraction | None:
    z, n, objectives = args
    return _max_over(ExactLP(z, [1] * len(z), [1] * n), objectives)


def bound_by_selection_oracle(h: KSHypergraph, limit: int = DEFAULT_SELECTION_LIMIT, workers: int = 1) -> Fraction:
    """Noncontextual bound via one exact LP per choice of a distinguished node in every context.

    For a fixed selection the objective is linear, and the maximum of the
    max-based objective is the maximum over selections of these LP optima.
    Selections that induce the same objective vector are solved once.  With
    ``workers > 1`` the distinct objectives are split across processes; the
    result does not depend on the split.
    """
    total = 1
    for c in h.contexts:
        total *= len(c)
    if total > limit:
        raise ValueError(f"{total} selections exceed the limit of {limit}")

    n = h.node_count
    z = [[1 if v in ctx else 0 for v in range(1, n + 1)] for ctx in h.contexts]
    lp = ExactLP(z, [1] * len(z), [1] * n)
    if not lp.feasible:
        raise EmptyPolytopeError("the assignment polytope is empty")

    objectives = _selection_objectives(h)
    if workers <= 1 or len(objectives) < 2:
        best = _max_over(lp, objectives)
    else:
        from concurrent.futures import ProcessPoolExecutor

        chunks = [objectives[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_oracle_worker, [(z, n, chunk) for chunk in chunks if chunk])
            best = max(r for r in results if r is not None)
    return best / len(h.contexts)


def evaluate_A(statistics: Sequence[Sequence], h: KSHypergraph | None = None):
    """Average source-measurement correlation.

    ``statistics[i][k]`` is the probability of outcome k of measurement i on
    the preparation that targets that outcome.  Contexts are weighted
    equally and outcomes equally within a context; for equal context sizes
    this is the plain mean of all entries.
    """
    rows = [list(r) for r in statistics]
    if not rows or any(not r for r in rows):
        raise ValueError("statistics must have at least one outcome per measurement")
    if h is not None:
        if len(rows) != len(h.contexts) or [len(r) for r in rows] != list(h.context_sizes):
            raise ValueError(
                f"statistics shape {[len(r) for r in rows]} does not match context sizes {list(h.context_sizes)}"
            )
    for i, r in enumerate(rows):
        for k, p in enumerate(r):
            if not 0 <= p <= 1:
                raise ValueError(f"p({k + 1}|M{i + 1}) = {p} is not a probability")
    per_context = [sum(r[1:], r[0]) / len(r) for r in rows]
    return sum(per_context[1:], per_context[0]) / len(per_context)
