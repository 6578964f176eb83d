"""Budget-constrained minimum-variance portfolios for a fixed return matrix.

The budget constraint is ``sum(w) == N`` (not 1), so equipartition is the
all-ones vector and the concentration level ``mean(w**2)`` starts at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from risklab.errors import DomainError, SingularError
from risklab.linalg import SpdFactorization, as_symmetric, factorize_spd, solve
from risklab.market import ReturnMatrix, covariance

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class Portfolio:
    weights: np.ndarray

    @property
    def n_assets(self) -> int:
        return self.weights.shape[0]

    def budget_residual(self) -> float:
        return float(np.sum(self.weights)) - self.n_assets


@dataclass(frozen=True)
class RiskReport:
    epsilon: float
    q_w: float
    realized_alpha: float = math.nan


@dataclass(frozen=True)
class FreeEnergySample:
    beta: float
    f_value: float


def investment_risk(w: Portfolio | np.ndarray, x: ReturnMatrix) -> float:
    """Half the sum over scenarios of the squared scaled portfolio return."""
    weights = w.weights if isinstance(w, Portfolio) else np.asarray(w, dtype=np.float64)
    if weights.shape[0] != x.n_assets:
        raise ValueError(f"portfolio has {weights.shape[0]} weights, matrix has {x.n_assets} assets")
    per_scenario = x.entries.T @ weights
    return 0.5 * float(per_scenario @ per_scenario)


def concentration_level(w: Portfolio | np.ndarray) -> float:
    weights = w.weights if isinstance(w, Portfolio) else np.asarray(w, dtype=np.float64)
    return float(weights @ weights) / weights.shape[0]


def _solve_ones(j) -> tuple[SpdFactorization, np.ndarray]:
    f = factorize_spd(j)
    return f, solve(f, np.ones(f.order))


def optimal_portfolio(j) -> Portfolio:
    """Minimum-risk weights ``N J^-1 e / (e^T J^-1 e)``.

    Raises :class:`SingularError` when ``J`` is not positive definite, which is
    always the case for fewer scenarios than assets.
    """
    f, y = _solve_ones(j)
    return Portfolio(f.order * y / float(np.sum(y)))


def _report(n: int, y: np.ndarray, realized_alpha: float) -> RiskReport:
    ety = float(np.sum(y))
    if not ety > 0.0:
        raise SingularError("e^T J^-1 e is not positive; covariance is numerically singular")
    return RiskReport(
        epsilon=n / (2.0 * ety),
        q_w=n * float(y @ y) / (ety * ety),
        realized_alpha=realized_alpha,
    )


def minimal_risk(j, *, realized_alpha: float = math.nan) -> RiskReport:
    """Minimal risk per asset and concentration level from one SPD solve.

    ``e^T J^-2 e`` is taken as ``y^T y`` with ``y = J^-1 e`` rather than by
    squaring the inverse.
    """
    a = as_symmetric(j)
    _, y = _solve_ones(a)
    return _report(a.shape[0], y, realized_alpha)


def _free_energy(beta: float, f: SpdFactorization, y: np.ndarray) -> float:
    n = f.order
    ety = float(np.sum(y))
    eps = n / (2.0 * ety)
    return eps + ((n - 1) * math.log(beta) + f.logdet + math.log(ety) + LOG_2PI) / (2.0 * n * beta)


def free_energy(beta: float, x: ReturnMatrix) -> FreeEnergySample:
    """Helmholtz free energy per asset ``-log Z / (N beta)`` in closed form.

    Z integrates ``exp(-beta H)`` over the budget hyperplane against a
    ``(2 pi)^(-N/2)`` weighted delta prior. Doing the Gaussian integral gives

        f = eps + [(N-1) log beta + log det J + log(e^T J^-1 e) + log 2 pi] / (2 N beta)
    """
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    f, y = _solve_ones(covariance(x))
    return FreeEnergySample(beta=float(beta), f_value=_free_energy(beta, f, y))


@dataclass(frozen=True)
class SampleStats:
    epsilon: float
    q_w: float
    f_value: float = math.nan


def analyze(x: ReturnMatrix, beta: float | None = None) -> SampleStats:
    """Risk, concentration and (optionally) free energy sharing one factorization."""
    f, y = _solve_ones(covariance(x))
    rep = _report(f.order, y, x.realized_alpha)
    fv = math.nan
    if beta is not None:
        if not beta > 0:
            raise DomainError(f"beta must be > 0, got {beta}")
        fv = _free_energy(beta, f, y)
    return SampleStats(epsilon=rep.epsilon, q_w=rep.q_w, f_value=fv)
