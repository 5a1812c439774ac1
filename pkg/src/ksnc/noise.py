"""Depolarizing and biased noise: closed forms, violation thresholds, seeded sampling.

Preparations are ``rho_{i,k} = p1 Pi_{i,k} + (1 - p1) rho_noise`` and
measurement effects are ``E_{k|M_i} = p2 Pi_{i,k} + (1 - p2) s(k|i) I``.
Closed forms accept floats or Fractions and keep Fractions exact.

Sampling uses numpy's PCG64.  The stream for preparation (i, k) is seeded
with ``SeedSequence([seed, i, k])`` (0-based i and k), so counts for any one
pair do not depend on which other pairs are simulated.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from .hypergraph import KSHypergraph
from .polytope import evaluate_A
from .quantum import RayRealization, born_probability, validate_realization

CSV_COLUMNS = ("p1", "p2", "A_closed_form", "A_empirical", "trials", "seed")


def _check_probability(name: str, p) -> None:
    if not 0 <= p <= 1:
        raise ValueError(f"{name} = {p} is outside [0, 1]")


@dataclass(frozen=True)
class DepolarizingParams:
    p1: float | Fraction
    p2: float | Fraction

    def __post_init__(self) -> None:
        _check_probability("p1", self.p1)
        _check_probability("p2", self.p2)


@dataclass(frozen=True)
class BiasedNoiseParams:
    """Per-context channel weights and the distributions s(.|i) of the biased noise."""

    weights: tuple[tuple[float | Fraction, float | Fraction], ...]
    bias: tuple[tuple[float | Fraction, ...], ...]

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.bias):
            raise ValueError(f"{len(self.weights)} weight pairs for {len(self.bias)} bias distributions")
        for i, (p1, p2) in enumerate(self.weights, start=1):
            _check_probability(f"p1 of context {i}", p1)
            _check_probability(f"p2 of context {i}", p2)
        for i, s in enumerate(self.bias, start=1):
            for x in s:
                _check_probability(f"s(k|{i})", x)
            if not math.isclose(float(sum(s)), 1.0, abs_tol=1e-12):
                raise ValueError(f"bias distribution of context {i} sums to {sum(s)}")

    @classmethod
    def uniform(cls, p1, p2, contexts: int, outcomes: int) -> "BiasedNoiseParams":
        s = tuple(Fraction(1, outcomes) for _ in range(outcomes))
        return cls(tuple((p1, p2) for _ in range(contexts)), tuple(s for _ in range(contexts)))


def a_depolarizing(params: DepolarizingParams, d: int, outcomes_per_context: int):
    """A = 1/m + (1 - 1/m) p1 p2 for maximal measurements (m = d outcomes)."""
    m = outcomes_per_context
    if m != d:
        raise ValueError(f"depolarizing closed form needs maximal measurements: {m} outcomes in dimension {d}")
    inv = Fraction(1, m)
    product = params.p1 * params.p2
    if isinstance(product, float):
        inv = 1.0 / m
    return inv + (1 - inv) * product


def a_biased(params: BiasedNoiseParams, h: KSHypergraph | None = None):
    """A under context-dependent, biased noise.

    The diagonal probability for preparation (i, k) is
    ``p1 p2 + (1 - p1 p2) s(k|i)``; averaging over k the bias drops out.
    """
    if h is not None:
        if len(params.weights) != len(h.contexts):
            raise ValueError(f"{len(params.weights)} noise parameters for {len(h.contexts)} contexts")
        if [len(s) for s in params.bias] != list(h.context_sizes):
            raise ValueError("bias distributions do not match the context sizes")
    stats = []
    for (p1, p2), s in zip(params.weights, params.bias):
        q = p1 * p2
        stats.append([q + (1 - q) * sk for sk in s])
    return evaluate_A(stats)


def violation_threshold(bound, outcomes_per_context: int):
    """Smallest mean p1*p2 that must be exceeded for A to exceed ``bound``."""
    m = outcomes_per_context
    inv = Fraction(1, m) if not isinstance(bound, float) else 1.0 / m
    if bound <= inv:
        raise ValueError(f"bound {bound} <= 1/{m}: this noise family can never violate it")
    if bound > 1:
        raise ValueError(f"bound {bound} exceeds the logical limit 1")
    return (bound - inv) / (1 - inv)


def outcome_distribution(
    h: KSHypergraph, r: RayRealization, params: DepolarizingParams, context: int, target: int
) -> np.ndarray:
    """Outcome probabilities of measurement ``context`` on the noisy preparation ``target`` (0-based)."""
    ctx = h.contexts[context]
    d = r.dimension
    m = len(ctx)
    p1, p2 = float(params.p1), float(params.p2)
    state = r.rays[ctx[target]]
    probs = np.array(
        [p2 * (p1 * float(born_probability(state, r.rays[v])) + (1 - p1) / d) + (1 - p2) / m for v in ctx]
    )
    return probs / probs.sum()


def noisy_statistics(h: KSHypergraph, r: RayRealization, params: DepolarizingParams) -> list[list[float]]:
    """p(k|M_i, P_{i,k}) for the depolarized realization."""
    return [
        [float(outcome_distribution(h, r, params, i, k)[k]) for k in range(len(ctx))]
        for i, ctx in enumerate(h.contexts)
    ]


@dataclass(frozen=True)
class ExperimentSample:
    seed: int
    trials_per_pair: int
    counts: tuple[tuple[tuple[int, ...], ...], ...]
    """counts[i][k][j]: times outcome j of measurement i occurred on preparation (i, k)."""

    def diagonal_frequencies(self) -> list[list[float]]:
        return [[row[k][k] / self.trials_per_pair for k in range(len(row))] for row in self.counts]

    def a_hat(self) -> float:
        return float(evaluate_A(self.diagonal_frequencies()))

    def standard_error(self) -> float:
        """Binomial standard error of :meth:`a_hat` from the observed frequencies."""
        c = len(self.counts)
        var = 0.0
        for row in self.diagonal_frequencies():
            w = 1.0 / (c * len(row))
            var += sum(w * w * f * (1 - f) for f in row) / self.trials_per_pair
        return math.sqrt(var)


def simulate_experiment(
    h: KSHypergraph, r: RayRealization, params: DepolarizingParams, trials: int, seed: int
) -> ExperimentSample:
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    report = validate_realization(h, r)
    if not report.valid:
        raise ValueError(f"invalid realization: {report}")
    counts = []
    for i, ctx in enumerate(h.contexts):
        row = []
        for k in range(len(ctx)):
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, i, k])))
            probs = outcome_distribution(h, r, params, i, k)
            row.append(tuple(int(x) for x in rng.multinomial(trials, probs)))
        counts.append(tuple(row))
    return ExperimentSample(seed, trials, tuple(counts))


def frange(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid start, start+step, ..., stop (stop kept when within rounding)."""
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, 12) for i in range(n + 1)]


def sweep(
    grid1: Iterable[float],
    grid2: Iterable[float],
    outcomes_per_context: int,
    h: KSHypergraph | None = None,
    r: RayRealization | None = None,
    trials: int | None = None,
    seed: int = 0,
) -> list[dict]:
    grid2 = list(grid2)
    rows = []
    for p1 in grid1:
        for p2 in grid2:
            params = DepolarizingParams(p1, p2)
            row = {
                "p1": p1,
                "p2": p2,
                "A_closed_form": a_depolarizing(params, outcomes_per_context, outcomes_per_context),
                "A_empirical": None,
                "trials": trials,
                "seed": seed if trials else None,
            }
            if trials:
                row["A_empirical"] = simulate_experiment(h, r, params, trials, seed).a_hat()
            rows.append(row)
    return rows


def write_sweep_csv(rows: Sequence[dict], out: TextIO) -> None:
    writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if row[k] is None else row[k] for k in CSV_COLUMNS})
