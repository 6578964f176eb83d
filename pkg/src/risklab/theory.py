"""Closed-form large-N predictions: quenched vs annealed risk, free energy, rate functions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from risklab.errors import DomainError

Side = Literal["plus", "minus"]


@dataclass(frozen=True)
class TheoryPoint:
    alpha: float
    eps_quenched: float
    qw_quenched: float
    eps_annealed: float
    qw_annealed: float

    @property
    def qw_divergent(self) -> bool:
        return math.isinf(self.qw_quenched)


@dataclass(frozen=True)
class RateValue:
    """A rate-function value with the piecewise branch that produced it.

    ``branch`` is one of ``"zero"``, ``"finite"`` or ``"infinite"``.
    """

    value: float
    branch: str

    def bound(self, n_assets: int) -> float:
        """Chernoff bound ``exp(-N R)``."""
        if self.branch == "infinite":
            return 0.0
        return math.exp(-n_assets * self.value)


def theory_point(alpha: float) -> TheoryPoint:
    """Quenched (optimize-then-average) vs annealed (average-then-optimize) values.

    Below ``alpha = 1`` the quenched risk is zero and the concentration level
    diverges; that divergence is reported as ``inf``.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    if alpha > 1:
        eps_q = (alpha - 1) / 2
        qw_q = alpha / (alpha - 1)
    else:
        eps_q = 0.0
        qw_q = math.inf
    return TheoryPoint(alpha, eps_q, qw_q, alpha / 2, 1.0)


def _check(alpha: float, beta: float) -> None:
    if not alpha > 1:
        raise DomainError(f"alpha must be > 1, got {alpha}")
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta}")


def lambda_beta(alpha: float, beta: float) -> float:
    _check(alpha, beta)
    return 1.0 - alpha * math.log(alpha / (alpha - 1)) - math.log(beta * (alpha - 1))


def free_energy_theory(alpha: float, beta: float) -> float:
    """Typical free energy per asset, ``(alpha-1)/2 - Lambda(beta)/(2 beta)``."""
    return (alpha - 1) / 2 - lambda_beta(alpha, beta) / (2 * beta)


def phi(n: float, alpha: float, beta: float) -> float:
    """Large-N cumulant ``lim (1/N) log E[Z^n]`` continued to real replica number ``n``."""
    _check(alpha, beta)
    if not 1 + n * beta > 0:
        raise DomainError(f"phi requires 1 + n*beta > 0, got n={n}, beta={beta}")
    return (
        -(n * alpha / 2) * math.log(alpha / (alpha - 1))
        - ((alpha - 1) / 2) * math.log1p(n * beta)
        + n / 2
        - (n / 2) * math.log(beta * (alpha - 1))
    )


def gibbs_gap(s: float) -> float:
    """``s - 1 - log s``, nonnegative for every ``s > 0``."""
    return s - 1.0 - math.log(s)


def _check_side(side: str) -> None:
    if side not in ("plus", "minus"):
        raise DomainError(f"side must be 'plus' or 'minus', got {side!r}")


def rate_free_energy(alpha: float, beta: float, f_tilde: float, side: Side) -> RateValue:
    """Rate of ``Pr[f <= f_tilde]`` (plus) or ``Pr[f >= f_tilde]`` (minus)."""
    _check(alpha, beta)
    _check_side(side)
    lam = lambda_beta(alpha, beta)
    typical = (alpha - 1) / 2 - lam / (2 * beta)
    if side == "plus" and f_tilde >= typical:
        return RateValue(0.0, "zero")
    if side == "minus" and f_tilde <= typical:
        return RateValue(0.0, "zero")
    s = (f_tilde + lam / (2 * beta)) / ((alpha - 1) / 2)
    if s <= 0:
        return RateValue(math.inf, "infinite")
    return RateValue(((alpha - 1) / 2) * gibbs_gap(s), "finite")


def rate_risk(alpha: float, beta: float, eps_tilde: float, side: Side) -> RateValue:
    """Rate of the posterior risk per asset being below (plus) or above (minus) ``eps_tilde``."""
    _check(alpha, beta)
    _check_side(side)
    floor = (alpha - 1) / 2
    typical = floor + 1 / (2 * beta)
    if side == "plus":
        if eps_tilde <= floor:
            return RateValue(math.inf, "infinite")
        if eps_tilde >= typical:
            return RateValue(0.0, "zero")
    elif eps_tilde <= typical:
        return RateValue(0.0, "zero")
    s_prime = 2 * beta * (eps_tilde - floor)
    return RateValue(0.5 * gibbs_gap(s_prime), "finite")
