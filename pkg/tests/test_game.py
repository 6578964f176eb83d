import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import quota_assignment_bruteforce
from risklab.errors import ConstraintError
from risklab.game import (
    CHUNK,
    GameSpec,
    _chunk_scores,
    Mix,
    best_annealed_score,
    expected_score_annealed,
    expected_score_quenched,
    payoff,
    quenched_geq_annealed_check,
    quenched_scores,
    quota_assignment_value,
)

SKEWED = Mix(Fraction(2, 3), Fraction(1, 6), Fraction(1, 6))


def test_payoff_rules():
    rock, paper, scissors = 0, 1, 2
    assert payoff(paper, rock) == 1 and payoff(rock, scissors) == 1 and payoff(scissors, paper) == 1
    assert all(payoff(h, h) == 0 for h in range(3))


def test_payoff_antisymmetric():
    for a, b in itertools.product(range(3), repeat=2):
        assert payoff(a, b) == -payoff(b, a)


def test_annealed_examples():
    assert expected_score_annealed(Mix.uniform(), GameSpec(Mix.uniform(), knowledge="annealed")) == 0.0
    assert expected_score_annealed(Mix.pure(1), GameSpec(SKEWED, knowledge="annealed")) == 150.0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 20), min_size=3, max_size=3).filter(lambda v: sum(v) > 0), st.integers(1, 500))
def test_annealed_mirror_is_zero(weights, rounds):
    m = Mix(*(Fraction(w, sum(weights)) for w in weights))
    assert expected_score_annealed(m, GameSpec(m, rounds=rounds)) == 0.0


def test_annealed_optimum_at_vertex():
    spec = GameSpec(Mix(0.5, 0.3, 0.2))
    grid = np.linspace(0, 1, 51)
    best_grid = max(
        expected_score_annealed(Mix(r, p, 1 - r - p), spec)
        for r in grid for p in grid if r + p <= 1 + 1e-12 and 1 - r - p >= 0
    )
    assert best_annealed_score(spec) == pytest.approx(best_grid, abs=1e-9)


def test_mix_validation():
    with pytest.raises(ValueError):
        Mix(0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        Mix(-0.1, 0.6, 0.5)


def test_equal_counts_needs_divisible_rounds():
    with pytest.raises(ConstraintError):
        GameSpec(Mix.uniform(), rounds=10, constraint="equal_counts")
    with pytest.raises(ConstraintError):
        GameSpec(Mix.uniform(), rounds=300, constraint="equal_counts", block=7)


def test_unknown_constraint():
    with pytest.raises(ConstraintError):
        GameSpec(Mix.uniform(), constraint="nope")


@pytest.mark.parametrize("k", [1, 2])
def test_quota_lp_matches_bruteforce(k):
    for bob in itertools.product(range(3), repeat=3 * k):
        counts = tuple(int(sum(1 for b in bob if b == h)) for h in range(3))
        assert quota_assignment_value(k, counts) == quota_assignment_bruteforce(bob)


def test_quota_lp_rejects_bad_totals():
    with pytest.raises(ConstraintError):
        quota_assignment_value(2, (1, 1, 1))


def test_unconstrained_quenched_is_exact():
    scores = quenched_scores(GameSpec(Mix.uniform()), 2000, seed=1)
    assert np.all(scores == 300)


def test_quenched_deterministic_and_chunked():
    spec = GameSpec(Mix.uniform(), rounds=30, constraint="same_hand_each_set", sets=2)
    a = quenched_scores(spec, CHUNK + 10, seed=5)
    b = quenched_scores(spec, CHUNK + 10, seed=5)
    np.testing.assert_array_equal(a, b)
    # Prefix property: the first chunk does not depend on the total trial count.
    np.testing.assert_array_equal(a[:CHUNK], quenched_scores(spec, CHUNK, seed=5))


def test_same_hand_each_set_by_hand():
    spec = GameSpec(Mix.uniform(), rounds=6, constraint="same_hand_each_set", sets=1)
    bob = np.array([[[0, 0, 0, 1, 2, 2]]])
    # rock: 0 - 1 + 2 = 1, paper: 3 + 0 - 2 = 1, scissors: -3 + 1 + 0 = -2
    assert _chunk_scores(spec, bob)[0] == 1


def test_equal_counts_block_value():
    # With a 3-round quota, each block is scored on its own.
    spec = GameSpec(Mix.uniform(), rounds=3, constraint="equal_counts")
    mean, _ = expected_score_quenched(spec, 20000, seed=2)
    exact = np.mean([quota_assignment_bruteforce(b) for b in itertools.product(range(3), repeat=3)])
    assert exact == pytest.approx(15 / 9)
    assert mean == pytest.approx(exact, abs=0.05)


@pytest.mark.parametrize(
    "constraint, sets", [("none", 1), ("equal_counts", 1), ("same_hand_each_set", 5), ("same_hand_across_sets", 5)]
)
def test_quenched_beats_annealed(constraint, sets):
    spec = GameSpec(SKEWED, rounds=30, constraint=constraint, sets=sets)
    assert quenched_geq_annealed_check(spec, 3000, seed=8).holds


def test_ordering_unconstrained_uniform():
    r = quenched_geq_annealed_check(GameSpec(SKEWED), 1000, seed=1)
    assert r.quenched_mean == 300 and r.annealed_best == 150 and r.holds
