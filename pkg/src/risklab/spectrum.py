"""Marchenko-Pastur law and empirical spectra of ``J = X X^T``."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from risklab.errors import DomainError
from risklab.linalg import eigenvalues_sym, factorize_spd, solve
from risklab.market import ReturnMatrix, covariance
from risklab.quadrature import adaptive_simpson

QUAD_TOL = 1e-10
SUPPORT_MARGIN = 1.1


@dataclass(frozen=True)
class MpLaw:
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be > 0, got {self.alpha}")

    @property
    def lambda_minus(self) -> float:
        return (1.0 - math.sqrt(self.alpha)) ** 2

    @property
    def lambda_plus(self) -> float:
        return (1.0 + math.sqrt(self.alpha)) ** 2

    @property
    def point_mass_at_zero(self) -> float:
        return max(0.0, 1.0 - self.alpha)

    def integrate(self, g, lo: float | None = None, hi: float | None = None, tol: float = QUAD_TOL) -> float:
        """``int rho(lam) g(lam) dlam`` over the continuous part, restricted to ``[lo, hi]``.

        Substituting ``lam = lam_- + (lam_+ - lam_-) sin^2(theta)`` turns the
        square-root edges into a smooth integrand on ``[0, pi/2]``.
        """
        lm, lp = self.lambda_minus, self.lambda_plus
        width = lp - lm
        lo = lm if lo is None else min(max(lo, lm), lp)
        hi = lp if hi is None else min(max(hi, lm), lp)
        if hi <= lo:
            return 0.0
        t0 = math.asin(math.sqrt((lo - lm) / width))
        t1 = math.asin(math.sqrt((hi - lm) / width))

        def integrand(theta: float) -> float:
            sn, cs = math.sin(theta), math.cos(theta)
            lam = lm + width * sn * sn
            return width * width * 2.0 * sn * sn * cs * cs / (2.0 * math.pi * lam) * g(lam)

        return adaptive_simpson(integrand, t0, t1, tol)

    def total_mass(self) -> float:
        return self.point_mass_at_zero + self.integrate(lambda lam: 1.0)


def mp_density(law: MpLaw, lam: float) -> float:
    """Continuous part of the Marchenko-Pastur density; the zero atom is separate."""
    if not lam > 0:
        raise DomainError(f"density is defined for lam > 0, got {lam}")
    lm, lp = law.lambda_minus, law.lambda_plus
    if lam <= lm or lam >= lp:
        return 0.0
    return math.sqrt((lam - lm) * (lp - lam)) / (2.0 * math.pi * lam)


def g_moment(alpha: float, s: int) -> float:
    """``int rho(lam) lam^-s dlam``; closed form for s = 1, 2 and quadrature beyond."""
    if not alpha > 1:
        raise DomainError(f"inverse moments diverge for alpha <= 1, got {alpha}")
    if s < 1 or int(s) != s:
        raise DomainError(f"s must be a positive integer, got {s}")
    if s == 1:
        return 1.0 / (alpha - 1)
    if s == 2:
        return alpha / (alpha - 1) ** 3
    return g_moment_quadrature(alpha, s)


def g_moment_quadrature(alpha: float, s: int, tol: float = QUAD_TOL) -> float:
    if not alpha > 1:
        raise DomainError(f"inverse moments diverge for alpha <= 1, got {alpha}")
    return MpLaw(alpha).integrate(lambda lam: lam ** (-s), tol=tol)


def empirical_g(x: ReturnMatrix, s: int) -> float:
    """``(1/N) e^T J^-s e`` for s in {1, 2}, via one linear solve."""
    if s not in (1, 2):
        raise DomainError(f"empirical_g supports s = 1 or 2, got {s}")
    f = factorize_spd(covariance(x))
    y = solve(f, np.ones(f.order))
    val = float(np.sum(y)) if s == 1 else float(y @ y)
    return val / f.order


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    density: np.ndarray

    @property
    def bin_left(self) -> np.ndarray:
        return self.edges[:-1]

    @property
    def bin_right(self) -> np.ndarray:
        return self.edges[1:]

    def to_csv(self, path: str | Path) -> None:
        write_histogram_csv(self, path)


def histogram_of(eigs: np.ndarray, upper: float, n_bins: int) -> Histogram:
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins}")
    edges = np.linspace(0.0, upper, n_bins + 1)
    # Round-off negatives belong to the zero atom; keep every eigenvalue in range.
    clipped = np.clip(eigs, 0.0, upper)
    counts, _ = np.histogram(clipped, bins=edges)
    density = counts / (eigs.size * (edges[1] - edges[0]))
    return Histogram(edges, density)


def empirical_spectrum(x: ReturnMatrix, n_bins: int) -> Histogram:
    """Equal-width histogram of the eigenvalues of J over ``[0, 1.1 lam_+]``."""
    eigs = eigenvalues_sym(covariance(x))
    law = MpLaw(x.realized_alpha)
    return histogram_of(eigs, SUPPORT_MARGIN * law.lambda_plus, n_bins)


def mp_bin_density(law: MpLaw, edges: np.ndarray) -> np.ndarray:
    """Average continuous MP density over each bin (the atom at zero is excluded)."""
    out = np.empty(len(edges) - 1)
    for i in range(len(out)):
        lo, hi = float(edges[i]), float(edges[i + 1])
        out[i] = law.integrate(lambda lam: 1.0, lo, hi) / (hi - lo)
    return out


def write_histogram_csv(h: Histogram, path: str | Path, mp: np.ndarray | None = None) -> None:
    path = Path(path)
    header = ["bin_left", "bin_right", "density"]
    if mp is not None:
        header.append("mp_density")
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(len(h.density)):
            row = [f"{h.edges[i]:.12g}", f"{h.edges[i + 1]:.12g}", f"{h.density[i]:.12g}"]
            if mp is not None:
                row.append(f"{mp[i]:.12g}")
            w.writerow(row)
