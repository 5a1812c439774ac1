import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ksnc.document import bundled
from ksnc.noise import (
    CSV_COLUMNS,
    BiasedNoiseParams,
    DepolarizingParams,
    a_biased,
    a_depolarizing,
    frange,
    noisy_statistics,
    simulate_experiment,
    sweep,
    violation_threshold,
    write_sweep_csv,
)
from ksnc.polytope import evaluate_A

probabilities = st.fractions(0, 1, max_denominator=50)


def test_closed_form_at_threshold():
    assert a_depolarizing(DepolarizingParams(Fraction(7, 9), 1), 4, 4) == Fraction(5, 6)
    assert abs(a_depolarizing(DepolarizingParams(7 / 9, 1.0), 4, 4) - 5 / 6) < 1e-15
    assert violation_threshold(Fraction(5, 6), 4) == Fraction(7, 9)


def test_closed_form_endpoints():
    assert a_depolarizing(DepolarizingParams(1, 1), 4, 4) == 1
    assert a_depolarizing(DepolarizingParams(0, Fraction(1, 2)), 4, 4) == Fraction(1, 4)


def test_depolarizing_needs_maximal_measurements():
    with pytest.raises(ValueError, match="maximal"):
        a_depolarizing(DepolarizingParams(1, 1), 4, 3)


def test_threshold_domain():
    with pytest.raises(ValueError, match="never violate"):
        violation_threshold(Fraction(1, 4), 4)
    with pytest.raises(ValueError, match="logical limit"):
        violation_threshold(Fraction(5, 4), 4)
    assert violation_threshold(Fraction(1), 4) == 1


def test_params_validated():
    with pytest.raises(ValueError):
        DepolarizingParams(1.5, 0)
    with pytest.raises(ValueError):
        BiasedNoiseParams(((1, 1),), ((Fraction(1, 2), Fraction(1, 3)),))


@settings(max_examples=100, deadline=None)
@given(probabilities, probabilities)
def test_uniform_biased_noise_reduces_to_depolarizing(p1, p2):
    params = BiasedNoiseParams.uniform(p1, p2, 9, 4)
    assert a_biased(params) == a_depolarizing(DepolarizingParams(p1, p2), 4, 4)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(probabilities, probabilities), min_size=9, max_size=9), st.data())
def test_biased_noise_depends_only_on_mean_product(h18, weights, data):
    bias = []
    for _ in range(9):
        raw = data.draw(st.lists(st.integers(1, 20), min_size=4, max_size=4))
        bias.append(tuple(Fraction(x, sum(raw)) for x in raw))
    params = BiasedNoiseParams(tuple(weights), tuple(bias))
    mean = sum(p1 * p2 for p1, p2 in weights) / 9
    assert a_biased(params, h18) == Fraction(1, 4) + Fraction(3, 4) * mean


def test_noisy_statistics_match_closed_form(h18, rays18):
    params = DepolarizingParams(0.9, 0.8)
    a = float(evaluate_A(noisy_statistics(h18, rays18, params)))
    assert a == pytest.approx(float(a_depolarizing(params, 4, 4)), abs=1e-14)


def test_simulation_is_deterministic(h18, rays18):
    params = DepolarizingParams(0.9, 0.95)
    a = simulate_experiment(h18, rays18, params, 500, seed=11)
    b = simulate_experiment(h18, rays18, params, 500, seed=11)
    c = simulate_experiment(h18, rays18, params, 500, seed=12)
    assert a.counts == b.counts
    assert a.counts != c.counts
    assert all(sum(row) == 500 for ctx in a.counts for row in ctx)


def test_simulation_streams_are_per_pair(h18, rays18):
    params = DepolarizingParams(0.7, 0.7)
    sample = simulate_experiment(h18, rays18, params, 200, seed=5)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([5, 3, 2])))
    from ksnc.noise import outcome_distribution

    expected = rng.multinomial(200, outcome_distribution(h18, rays18, params, 3, 2))
    assert sample.counts[3][2] == tuple(int(x) for x in expected)


def test_simulation_close_to_closed_form(h18, rays18):
    params = DepolarizingParams(0.85, 0.9)
    sample = simulate_experiment(h18, rays18, params, 20000, seed=1)
    closed = float(a_depolarizing(params, 4, 4))
    assert abs(sample.a_hat() - closed) < 4 * sample.standard_error()


def test_simulation_argument_checks(h18, rays18):
    with pytest.raises(ValueError):
        simulate_experiment(h18, rays18, DepolarizingParams(1, 1), 0, 1)
    with pytest.raises(ValueError):
        simulate_experiment(h18, rays18, DepolarizingParams(1, 1), 10, -1)


def test_frange():
    assert frange(0.5, 1.0, 0.25) == [0.5, 0.75, 1.0]
    assert frange(0.8, 1.0, 0.1) == [0.8, 0.9, 1.0]
    with pytest.raises(ValueError):
        frange(0, 1, 0)


def test_sweep_csv(h18, rays18):
    rows = sweep([0.9, 1.0], [1.0], 4, h18, rays18, trials=50, seed=2)
    out = io.StringIO()
    write_sweep_csv(rows, out)
    lines = out.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    assert lines[2].startswith("1.0,1.0,1.0,1.0,50,2")


def test_sweep_without_trials_leaves_blanks():
    rows = sweep([1.0], [0.5], 4)
    out = io.StringIO()
    write_sweep_csv(rows, out)
    assert out.getvalue().splitlines()[1] == "1.0,0.5,0.625,,,"
    assert math.isclose(rows[0]["A_closed_form"], 0.625)
