"""Adaptive Simpson quadrature and golden-section maximization."""

from __future__ import annotations

import math
from collections.abc import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


class BracketError(RuntimeError):
    """The maximizer of a golden-section search sits on a bracket endpoint."""


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 50,
) -> float:
    """Integrate ``f`` over [a, b] with adaptive Simpson's rule.

    Each panel is accepted once |S_left + S_right - S_whole| < 15 * tol, and
    the Richardson-corrected value is returned.  The tolerance is halved on
    every split so ``tol`` bounds the total absolute error estimate.
    """
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, tol, max_depth)

    def simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        err = left + right - whole
        if depth >= max_depth or abs(err) <= 15.0 * tol:
            return left + right + err / 15.0
        return (recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
                + recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))

    # one forced split keeps a lucky coarse estimate from terminating early
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    flq, frq = f(0.5 * (a + m)), f(0.5 * (m + b))
    left = recurse(a, m, fa, flq, fm, simpson(fa, flq, fm, m - a), 0.5 * tol, 1)
    right = recurse(m, b, fm, frq, fb, simpson(fm, frq, fb, b - m), 0.5 * tol, 1)
    return left + right


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-8,
    check_interior: bool = True,
) -> float:
    """Maximize a unimodal ``f`` on [lo, hi] until the bracket is narrower than ``tol``.

    With ``check_interior`` set, raises :class:`BracketError` when an endpoint
    value beats every interior probe, i.e. the bracket does not straddle an
    interior maximum.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if not tol > 0:
        raise ValueError("tol must be positive")
    a, b = lo, hi
    c = a + INV_PHI2 * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best_interior = max(fc, fd)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI2 * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        best_interior = max(best_interior, fc, fd)
    x = 0.5 * (a + b)
    if check_interior:
        f_lo, f_hi = f(lo), f(hi)
        if max(f_lo, f_hi) > best_interior:
            where = lo if f_lo >= f_hi else hi
            raise BracketError(f"maximum at bracket endpoint {where} of [{lo}, {hi}]")
    return x
