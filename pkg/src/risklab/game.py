"""Rock-paper-scissors with and without foreknowledge of the opponent's hands.

Hands are indexed rock=0, paper=1, scissors=2. Alice scores +1 for a win,
-1 for a loss and 0 for a tie. "Annealed" play picks a mix against Bob's known
probabilities; "quenched" play sees Bob's realized sequence first and then
plays optimally under the given constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.optimize import linprog

from risklab.errors import ConstraintError
from risklab.market import sample_generator

HANDS = ("rock", "paper", "scissors")
# PAYOFF[a, b]: Alice plays a, Bob plays b.
PAYOFF = np.array([[0, -1, 1], [1, 0, -1], [-1, 1, 0]], dtype=np.int64)

Constraint = Literal["none", "equal_counts", "same_hand_each_set", "same_hand_across_sets"]
CONSTRAINTS = ("none", "equal_counts", "same_hand_each_set", "same_hand_across_sets")
CHUNK = 1024


def payoff(a: int, b: int) -> int:
    return int(PAYOFF[a, b])


@dataclass(frozen=True)
class Mix:
    rock: float
    paper: float
    scissors: float

    def __post_init__(self):
        probs = self.as_tuple()
        if any(not 0 <= p <= 1 for p in probs):
            raise ValueError(f"probabilities must lie in [0, 1], got {probs}")
        if abs(sum(float(p) for p in probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1, got {probs}")

    @classmethod
    def uniform(cls) -> "Mix":
        third = Fraction(1, 3)
        return cls(third, third, third)

    @classmethod
    def pure(cls, hand: int) -> "Mix":
        p = [0, 0, 0]
        p[hand] = 1
        return cls(*p)

    def as_tuple(self) -> tuple:
        return (self.rock, self.paper, self.scissors)

    def as_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.as_tuple()])


@dataclass(frozen=True)
class GameSpec:
    """One game: ``sets`` sets of ``rounds`` rounds each.

    ``block`` only matters for ``equal_counts``: Alice must show each hand
    ``block / 3`` times in every consecutive block of ``block`` rounds. It
    defaults to 3; ``block == rounds`` spreads the quota over the whole set.
    """

    bob_mix: Mix
    rounds: int = 300
    knowledge: Literal["annealed", "quenched"] = "quenched"
    constraint: Constraint = "none"
    sets: int = 1
    block: int | None = None

    def __post_init__(self):
        if self.rounds < 1 or self.sets < 1:
            raise ConstraintError("rounds and sets must be positive")
        if self.knowledge not in ("annealed", "quenched"):
            raise ConstraintError(f"unknown knowledge mode {self.knowledge!r}")
        if self.constraint not in CONSTRAINTS:
            raise ConstraintError(f"unknown constraint {self.constraint!r}")
        if self.constraint == "equal_counts":
            b = self.quota_block
            if b % 3 or self.rounds % b:
                raise ConstraintError(
                    f"equal_counts needs a block divisible by 3 that divides rounds; "
                    f"got rounds={self.rounds}, block={b}"
                )

    @property
    def quota_block(self) -> int:
        return 3 if self.block is None else self.block


def _exact(p) -> Fraction:
    return p if isinstance(p, Fraction) else Fraction(p).limit_denominator(10**9)


def expected_score_annealed(alice_mix: Mix, spec: GameSpec) -> float:
    """Expected total score when both hands are drawn independently from known mixes."""
    a = [_exact(p) for p in alice_mix.as_tuple()]
    b = [_exact(p) for p in spec.bob_mix.as_tuple()]
    per_round = sum(a[i] * b[j] * int(PAYOFF[i, j]) for i in range(3) for j in range(3))
    return float(spec.rounds * spec.sets * per_round)


def best_annealed_score(spec: GameSpec) -> float:
    """Best annealed expectation among mixes the constraint allows.

    The score is linear in Alice's mix, so the optimum over the simplex sits
    at a pure hand; an equal-count quota forces the uniform mix.
    """
    if spec.constraint == "equal_counts":
        return expected_score_annealed(Mix.uniform(), spec)
    return max(expected_score_annealed(Mix.pure(h), spec) for h in range(3))


@lru_cache(maxsize=None)
def quota_assignment_value(per_hand: int, bob_counts: tuple[int, int, int]) -> int:
    """Best score when Alice shows each hand ``per_hand`` times against Bob's counts.

    This is a 3x3 transportation problem; its vertices are integral, so the LP
    optimum is the integer optimum.
    """
    if sum(bob_counts) != 3 * per_hand:
        raise ConstraintError(f"Bob's counts {bob_counts} do not total {3 * per_hand}")
    c = -PAYOFF.astype(float).ravel()
    a_eq = np.zeros((6, 9))
    for i in range(3):
        a_eq[i, 3 * i : 3 * i + 3] = 1.0
        a_eq[3 + i, i::3] = 1.0
    b_eq = np.array([per_hand] * 3 + list(bob_counts), dtype=float)
    res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise ConstraintError(f"quota assignment infeasible: {res.message}")
    return int(round(-res.fun))


def _counts(hands: np.ndarray, axis: int) -> np.ndarray:
    return np.stack([(hands == h).sum(axis=axis) for h in range(3)], axis=-1)


def _chunk_scores(spec: GameSpec, bob: np.ndarray) -> np.ndarray:
    """Per-trial quenched scores for Bob hands of shape (trials, sets, rounds)."""
    trials = bob.shape[0]
    if spec.constraint == "none":
        # Alice always shows the hand that beats Bob's.
        return np.full(trials, spec.sets * spec.rounds, dtype=np.int64)
    if spec.constraint == "same_hand_each_set":
        scores = _counts(bob, axis=2) @ PAYOFF.T  # (trials, sets, alice hand)
        return scores.max(axis=-1).sum(axis=1)
    if spec.constraint == "same_hand_across_sets":
        scores = _counts(bob, axis=1) @ PAYOFF.T  # (trials, rounds, alice hand)
        return scores.max(axis=-1).sum(axis=1)

    block = spec.quota_block
    counts = _counts(bob.reshape(trials, spec.sets, spec.rounds // block, block), axis=3)
    flat = counts.reshape(-1, 3)
    codes = flat[:, 0] * (block + 1) + flat[:, 1]
    uniq, first, inverse = np.unique(codes, return_index=True, return_inverse=True)
    values = np.array(
        [quota_assignment_value(block // 3, tuple(int(v) for v in flat[i])) for i in first],
        dtype=np.int64,
    )
    return values[inverse].reshape(trials, -1).sum(axis=1)


def quenched_scores(spec: GameSpec, n_trials: int, seed: int) -> np.ndarray:
    """Per-trial quenched scores.

    Bob's hands for trials ``[k*CHUNK, (k+1)*CHUNK)`` come from the stream keyed
    by ``(seed, k)``, so the result depends only on ``(seed, n_trials)``.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be positive, got {n_trials}")
    probs = spec.bob_mix.as_array()
    out = np.empty(n_trials, dtype=np.int64)
    for k, start in enumerate(range(0, n_trials, CHUNK)):
        size = min(CHUNK, n_trials - start)
        rng = sample_generator(seed, k)
        bob = rng.choice(3, size=(size, spec.sets, spec.rounds), p=probs)
        out[start : start + size] = _chunk_scores(spec, bob)
    return out


def expected_score_quenched(spec: GameSpec, n_trials: int, seed: int) -> tuple[float, float]:
    """Monte Carlo mean and standard error of Alice's score with foreknowledge."""
    scores = quenched_scores(spec, n_trials, seed).astype(np.float64)
    mean = float(scores.mean())
    stderr = float(scores.std(ddof=1) / math.sqrt(n_trials)) if n_trials > 1 else 0.0
    return mean, stderr


@dataclass(frozen=True)
class OrderingReport:
    quenched_mean: float
    quenched_stderr: float
    annealed_best: float
    holds: bool


def quenched_geq_annealed_check(spec: GameSpec, n_trials: int, seed: int) -> OrderingReport:
    """Foreknowledge never hurts: quenched mean >= best annealed - 3 stderr."""
    mean, se = expected_score_quenched(spec, n_trials, seed)
    best = best_annealed_score(spec)
    return OrderingReport(mean, se, best, mean >= best - 3.0 * se)
