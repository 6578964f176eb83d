"""Adaptive Simpson quadrature."""

from __future__ import annotations

import math
from typing import Callable

MAX_DEPTH = 40
_ROUNDOFF = 64 * 2.220446049250313e-16


def _simpson(fa, fm, fb, a, b):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = MAX_DEPTH,
) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Uses the usual Richardson-corrected interval halving with an explicit stack.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = _simpson(fa, fm, fb, a, b)

    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = _simpson(flo, flm, fmid, lo, mid)
        right = _simpson(fmid, frm, fhi, mid, hi)
        delta = left + right - est
        # Tolerances below round-off can never be met; accept at that floor.
        floor = _ROUNDOFF * (abs(left) + abs(right))
        if depth >= max_depth or abs(delta) <= max(15.0 * eps, floor):
            total += left + right + delta / 15.0
        else:
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
    if not math.isfinite(total):
        raise ArithmeticError("quadrature produced a non-finite value")
    return sign * total
