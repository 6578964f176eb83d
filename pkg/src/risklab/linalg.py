"""Dense symmetric linear algebra: Cholesky factor/solve, log-determinant, eigenvalues.

Everything here works on plain ``numpy`` float64 arrays. A "symmetric matrix" is
any square 2-D array that equals its transpose; :func:`as_symmetric` checks
that once at the boundary so the kernels themselves can stay lean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from risklab.errors import ConvergenceError, SingularError

PIVOT_TOL = 1e-12
SWEEPS_PER_ORDER = 30

_EPS = np.finfo(np.float64).eps


def as_symmetric(m, *, atol: float = 0.0) -> np.ndarray:
    """Return ``m`` as a float64 square array, raising if it is not symmetric."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0.0, atol=atol):
        raise ValueError("matrix is not symmetric")
    return a


@dataclass(frozen=True)
class SpdFactorization:
    """Lower-triangular ``factor`` with ``factor @ factor.T`` equal to the source."""

    factor: np.ndarray
    logdet: float

    @property
    def order(self) -> int:
        return self.factor.shape[0]


def factorize_spd(m, pivot_tol: float = PIVOT_TOL) -> SpdFactorization:
    """Cholesky factorization of a symmetric positive definite matrix.

    A pivot ``d_j <= pivot_tol * max(diag(m))`` raises :class:`SingularError`
    carrying ``j``; this is how an under-determined covariance (p <= N) shows up.
    """
    a = as_symmetric(m)
    n = a.shape[0]
    scale = float(np.max(np.diag(a)))
    if not scale > 0.0:
        raise SingularError("matrix has no positive diagonal entry", pivot=0)
    threshold = pivot_tol * scale

    low = np.zeros_like(a)
    for j in range(n):
        row = low[j, :j]
        d = a[j, j] - row @ row
        if not d > threshold:
            raise SingularError(
                f"non-positive pivot {d:.3e} at index {j} (threshold {threshold:.3e})",
                pivot=j,
            )
        ljj = math.sqrt(d)
        low[j, j] = ljj
        if j + 1 < n:
            low[j + 1 :, j] = (a[j + 1 :, j] - low[j + 1 :, :j] @ row) / ljj

    logdet = 2.0 * float(np.sum(np.log(np.diag(low))))
    low.setflags(write=False)
    return SpdFactorization(factor=low, logdet=logdet)


def solve(f: SpdFactorization, b) -> np.ndarray:
    """Solve ``(L L^T) y = b`` by forward then backward substitution."""
    low = f.factor
    n = f.order
    rhs = np.asarray(b, dtype=np.float64)
    if rhs.shape[0] != n:
        raise ValueError(f"right-hand side has length {rhs.shape[0]}, expected {n}")

    z = np.empty_like(rhs)
    for i in range(n):
        z[i] = (rhs[i] - low[i, :i] @ z[:i]) / low[i, i]
    y = np.empty_like(rhs)
    for i in range(n - 1, -1, -1):
        y[i] = (z[i] - low[i + 1 :, i] @ y[i + 1 :]) / low[i, i]
    return y


def tridiagonalize(m) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction to symmetric tridiagonal form.

    Returns the diagonal and the sub-diagonal; eigenvectors are not accumulated.
    """
    a = as_symmetric(m).copy()
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1 :, k]
        norm_x = float(np.linalg.norm(x))
        if norm_x == 0.0:
            continue
        alpha = -math.copysign(norm_x, x[0])
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)

        sub = a[k + 1 :, k + 1 :]
        p = sub @ v
        q = p - (v @ p) * v
        sub -= 2.0 * (np.outer(v, q) + np.outer(q, v))
        a[k + 1, k] = a[k, k + 1] = alpha
        a[k + 2 :, k] = 0.0
        a[k, k + 2 :] = 0.0
    diag = np.diag(a).copy()
    off = np.diag(a, -1).copy()
    return diag, off


def tridiagonal_eigenvalues(diag, off, max_iter: int | None = None) -> np.ndarray:
    """Eigenvalues of a symmetric tridiagonal matrix via implicit Wilkinson-shift QR."""
    d = [float(v) for v in diag]
    e = [float(v) for v in off]
    n = len(d)
    if len(e) != max(n - 1, 0):
        raise ValueError("off-diagonal must have length n - 1")
    if max_iter is None:
        max_iter = SWEEPS_PER_ORDER * max(n, 1)
    anorm = max((abs(x) for x in d + e), default=0.0)
    floor = _EPS * _EPS * anorm

    def negligible(k: int) -> bool:
        return abs(e[k]) <= _EPS * (abs(d[k]) + abs(d[k + 1])) or abs(e[k]) <= floor

    hi = n - 1
    steps = 0
    while hi > 0:
        if negligible(hi - 1):
            e[hi - 1] = 0.0
            hi -= 1
            continue
        lo = hi - 1
        while lo > 0 and not negligible(lo - 1):
            lo -= 1

        steps += 1
        if steps > max_iter:
            raise ConvergenceError(f"implicit QR did not converge within {max_iter} steps")

        # Wilkinson shift from the trailing 2x2 block.
        half = 0.5 * (d[hi - 1] - d[hi])
        b = e[hi - 1]
        if half == 0.0:
            mu = d[hi] - abs(b)
        else:
            mu = d[hi] - b * b / (half + math.copysign(math.hypot(half, b), half))

        x = d[lo] - mu
        z = e[lo]
        for k in range(lo, hi):
            r = math.hypot(x, z)
            if r == 0.0:
                c, s = 1.0, 0.0
            else:
                c, s = x / r, z / r
            if k > lo:
                e[k - 1] = r
            dk, dk1, ek = d[k], d[k + 1], e[k]
            cs = c * s
            d[k] = c * c * dk + 2.0 * cs * ek + s * s * dk1
            d[k + 1] = s * s * dk - 2.0 * cs * ek + c * c * dk1
            e[k] = cs * (dk1 - dk) + (c * c - s * s) * ek
            if k + 1 < hi:
                x = e[k]
                z = s * e[k + 1]
                e[k + 1] *= c
    return np.sort(np.array(d, dtype=np.float64))


def eigenvalues_sym(m) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending."""
    a = as_symmetric(m)
    if a.shape[0] == 1:
        return a[0].copy()
    diag, off = tridiagonalize(a)
    return tridiagonal_eigenvalues(diag, off)
