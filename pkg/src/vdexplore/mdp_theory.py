"""Optimal exploration variance against a bounded, translated Q-profile.

A :class:`QProfile` tabulates Q over offsets ``t`` in ``[0, w]`` measured from
the left edge of its support; the policy mean sits a distance ``d`` to the
left of that edge.  The value of N(mu, sigma^2) is then

    V(sigma, d) = integral_0^w phi_sigma(t + d) Q(t) dt

where phi_sigma is the N(0, sigma^2) density.  Only unimodal profiles are
supported by the highest-density-region helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .gauss_math import SQRT_2PI
from .numerics import BracketError, adaptive_simpson, golden_section_max

MONOTONE_RATIO_LIMIT = math.sqrt(3.0) - 1.0


@dataclass(frozen=True)
class QProfile:
    """Piecewise-linear, nonnegative Q over ``[0, w]``.

    ``support`` restricts the profile to a sub-window (Q is zero outside it);
    it defaults to the whole ``[0, w]`` and is how clipped profiles are built.
    """

    offsets: tuple[float, ...]
    values: tuple[float, ...]
    support: tuple[float, float] | None = field(default=None)

    def __post_init__(self):
        t = np.asarray(self.offsets, dtype=float)
        q = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != q.shape or t.size < 2:
            raise ValueError("need at least two (offset, q) samples of equal length")
        if t[0] != 0.0:
            raise ValueError("first offset must be 0")
        if np.any(np.diff(t) <= 0):
            raise ValueError("offsets must be strictly increasing")
        if np.any(q < 0) or not np.all(np.isfinite(q)):
            raise ValueError("q values must be finite and nonnegative")
        if not np.any(q > 0):
            raise ValueError("profile is identically zero")
        object.__setattr__(self, "offsets", tuple(float(x) for x in t))
        object.__setattr__(self, "values", tuple(float(x) for x in q))
        if self.support is None:
            object.__setattr__(self, "support", (0.0, float(t[-1])))
        lo, hi = self.support
        if not 0.0 <= lo < hi <= t[-1]:
            raise ValueError(f"support {self.support} must lie inside [0, {t[-1]}]")

    @property
    def width(self) -> float:
        return self.offsets[-1]

    def __call__(self, t: float) -> float:
        lo, hi = self.support
        if t < lo or t > hi:
            return 0.0
        return float(np.interp(t, self.offsets, self.values))

    def breakpoints(self) -> list[float]:
        """Support endpoints plus every knot strictly inside the support."""
        lo, hi = self.support
        return [lo] + [t for t in self.offsets if lo < t < hi] + [hi]

    def integral(self, lo: float | None = None, hi: float | None = None) -> float:
        """Exact integral of Q over ``[lo, hi]`` intersected with the support."""
        slo, shi = self.support
        lo = slo if lo is None else max(lo, slo)
        hi = shi if hi is None else min(hi, shi)
        if hi <= lo:
            return 0.0
        knots = [lo] + [t for t in self.offsets if lo < t < hi] + [hi]
        q = np.interp(knots, self.offsets, self.values)
        return float(np.sum(0.5 * (q[1:] + q[:-1]) * np.diff(knots)))

    def scaled(self, factor: float) -> QProfile:
        return QProfile(self.offsets, tuple(factor * q for q in self.values), self.support)

    def normalized(self) -> QProfile:
        """Rescale so the profile integrates to 1."""
        return self.scaled(1.0 / self.integral())

    def clipped(self, lo: float, hi: float) -> QProfile:
        """Zero the profile outside ``[lo, hi]``."""
        slo, shi = self.support
        return QProfile(self.offsets, self.values, (max(lo, slo), min(hi, shi)))

    @classmethod
    def boxcar(cls, w: float, height: float = 1.0) -> QProfile:
        return cls((0.0, w), (height, height))

    @classmethod
    def triangular(cls, w: float, peak: float = 1.0) -> QProfile:
        return cls((0.0, 0.5 * w, w), (0.0, peak, 0.0))

    @classmethod
    def gaussian_bump(cls, w: float, n: int = 201) -> QProfile:
        """exp(-(t - w/2)^2 / (2 (w/8)^2)) tabulated on ``n`` evenly spaced knots."""
        t = np.linspace(0.0, w, n)
        return cls(tuple(t), tuple(np.exp(-0.5 * ((t - 0.5 * w) / (w / 8.0)) ** 2)))

    @classmethod
    def from_file(cls, path: str | Path) -> QProfile:
        """Load a two-column ``offset q`` text file; ``#`` starts a comment."""
        data = np.loadtxt(path, comments="#", ndmin=2)
        if data.shape[1] != 2:
            raise ValueError(f"{path}: expected two columns, got {data.shape[1]}")
        return cls(tuple(data[:, 0]), tuple(data[:, 1]))


@dataclass(frozen=True)
class HdrInterval:
    lo_off: float
    hi_off: float
    mass: float


@dataclass(frozen=True)
class SweepRow:
    d: float
    sigma_star: float
    v_star: float
    ratio_ok: bool


def mdp_value(sigma: float, d: float, profile: QProfile, tol: float = 1e-10) -> float:
    """Value of N(mu, sigma^2) against ``profile`` shifted a distance ``d`` right of mu.

    Integrates knot-to-knot with adaptive Simpson so every panel is smooth.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not d > 0:
        raise ValueError(f"d must be positive, got {d}")
    norm = 1.0 / (SQRT_2PI * sigma)
    offsets, values = profile.offsets, profile.values
    knots = profile.breakpoints()
    total = 0.0
    panel_tol = tol / (len(knots) - 1)
    for a, b in zip(knots[:-1], knots[1:]):
        qa, qb = (float(q) for q in np.interp([a, b], offsets, values))
        if qa == 0.0 and qb == 0.0:
            continue
        slope = (qb - qa) / (b - a)

        def integrand(t, a=a, qa=qa, slope=slope):
            z = (t + d) / sigma
            return norm * math.exp(-0.5 * z * z) * (qa + slope * (t - a))

        total += adaptive_simpson(integrand, a, b, panel_tol)
    return max(total, 0.0)


def offset_distance(mu: float, left_edge: float) -> float:
    """Distance ``d`` from the policy mean to the left edge of the Q support.

    Shifting mu and the edge by the same amount leaves ``d``, and therefore
    every value and optimal sigma in this module, unchanged.
    """
    return left_edge - mu


def mdp_optimal_sigma(d: float, profile: QProfile, tol: float = 1e-9) -> float:
    """argmax_sigma V(sigma, d); always strictly inside (d, d + w).

    Raises :class:`BracketError` if the maximizer lands on the bracket ends,
    which contradicts sigma* in (d, d + w) and signals a profile or precision
    problem.
    """
    if not d > 0:
        raise ValueError(f"d must be positive, got {d}")
    w = profile.width
    lo, hi = d * (1 - 1e-6), (d + w) * (1 + 1e-6)
    sigma = golden_section_max(lambda s: mdp_value(s, d, profile), lo, hi, tol)
    if not d < sigma < d + w:
        raise BracketError(f"sigma*={sigma} outside ({d}, {d + w})")
    return sigma


def monotonicity_sweep(profile: QProfile, d_grid, tol: float = 1e-9) -> list[SweepRow]:
    """Tabulate (d, sigma*, V*, w/d < sqrt(3) - 1) along an increasing d grid."""
    d_grid = [float(d) for d in d_grid]
    if not d_grid:
        raise ValueError("d_grid is empty")
    if any(b <= a for a, b in zip(d_grid, d_grid[1:])):
        raise ValueError("d_grid must be strictly increasing")
    rows = []
    for d in d_grid:
        s = mdp_optimal_sigma(d, profile, tol)
        rows.append(SweepRow(d, s, mdp_value(s, d, profile), profile.width / d < MONOTONE_RATIO_LIMIT))
    return rows


def sweep_violations(rows: list[SweepRow]) -> list[str]:
    """Describe every place the flagged rows break sigma* up / V* down."""
    flagged = [r for r in rows if r.ratio_ok]
    out = []
    for prev, cur in zip(flagged, flagged[1:]):
        if not cur.sigma_star > prev.sigma_star:
            out.append(f"sigma* not increasing between d={prev.d} and d={cur.d}")
        if not cur.v_star < prev.v_star:
            out.append(f"V* not decreasing between d={prev.d} and d={cur.d}")
    return out


def _superlevel(profile: QProfile, c: float) -> list[tuple[float, float]]:
    """Maximal intervals of the support where Q >= c (c > 0)."""
    knots = profile.breakpoints()
    q = [float(v) for v in np.interp(knots, profile.offsets, profile.values)]
    pieces: list[tuple[float, float]] = []
    for a, b, qa, qb in zip(knots[:-1], knots[1:], q[:-1], q[1:]):
        if qa >= c and qb >= c:
            lo, hi = a, b
        elif qa >= c:
            lo, hi = a, a + (qa - c) / (qa - qb) * (b - a)
        elif qb >= c:
            lo, hi = b - (qb - c) / (qb - qa) * (b - a), b
        else:
            continue
        if pieces and lo <= pieces[-1][1]:
            pieces[-1] = (pieces[-1][0], max(hi, pieces[-1][1]))
        else:
            pieces.append((lo, hi))
    return pieces


def hdr_interval(profile: QProfile, alpha: float) -> HdrInterval:
    """Smallest interval holding at least ``alpha`` of the mass of Q / integral(Q).

    The density threshold is found by bisection.  Where the density is flat at
    the threshold (a boxcar, for instance) any sub-interval of the plateau
    qualifies; the tie is broken by centering.  Raises ``ValueError`` if the
    superlevel set at the threshold is not a single interval.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    total = profile.integral()

    def mass(pieces):
        return sum(profile.integral(lo, hi) for lo, hi in pieces) / total

    top = float(np.max(np.interp(profile.breakpoints(), profile.offsets, profile.values)))
    if mass(_superlevel(profile, top)) >= alpha:
        lo_c, inner = top, []
    else:
        lo_c, hi_c = 0.0, top
        for _ in range(200):
            mid = 0.5 * (lo_c + hi_c)
            if not lo_c < mid < hi_c:
                break
            if mass(_superlevel(profile, mid)) >= alpha:
                lo_c = mid
            else:
                hi_c = mid
        inner = _superlevel(profile, hi_c)
    outer = _superlevel(profile, lo_c) if lo_c > 0 else [profile.support]
    if len(outer) != 1 or len(inner) > 1:
        raise ValueError(f"superlevel set at level {lo_c:g} is disconnected; profile not unimodal")
    outer_lo, outer_hi = outer[0]
    m_outer = mass(outer)
    if m_outer - alpha <= 1e-12:
        return HdrInterval(outer_lo, outer_hi, m_outer)

    # flat at the threshold: grow the inner core into the plateau, centered
    extra = (alpha - mass(inner)) * total / lo_c
    core = inner[0][1] - inner[0][0] if inner else 0.0
    length = min(core + extra, outer_hi - outer_lo)
    lo = 0.5 * (outer_lo + outer_hi - length)
    if inner:
        lo = min(max(lo, inner[0][1] - length), inner[0][0])
    lo = min(max(lo, outer_lo), outer_hi - length)
    return HdrInterval(lo, lo + length, mass([(lo, lo + length)]))


def hdr_bound_check(profile: QProfile, alpha: float, d: float, tol: float = 1e-9) -> tuple[float, float, float]:
    """Near-optimality of the sigma chosen for the HDR-clipped profile.

    Returns ``(V(sigma*, d), V(sigma_hat*, d), gap)`` where sigma* maximizes V
    under Q, sigma_hat* maximizes the value under the clipped profile, and
    both are evaluated under the original Q.  For Q with total mass <= 1 the
    gap is bounded by ``1 - alpha``.
    """
    hdr = hdr_interval(profile, alpha)
    clipped = profile.clipped(hdr.lo_off, hdr.hi_off)
    s_star = mdp_optimal_sigma(d, profile, tol)
    s_hat = _clipped_optimal_sigma(d, clipped, tol)
    v_star = mdp_value(s_star, d, profile)
    v_hat = mdp_value(s_hat, d, profile)
    return v_star, v_hat, abs(v_star - v_hat)


def _clipped_optimal_sigma(d: float, clipped: QProfile, tol: float) -> float:
    # the clipped support starts at lo_off, so its own bracket is (d + lo, d + hi)
    lo_off, hi_off = clipped.support
    lo, hi = (d + lo_off) * (1 - 1e-6), (d + hi_off) * (1 + 1e-6)
    try:
        return golden_section_max(lambda s: mdp_value(s, d, clipped), lo, hi, tol)
    except BracketError as exc:
        raise BracketError(f"clipped profile: {exc}") from exc
