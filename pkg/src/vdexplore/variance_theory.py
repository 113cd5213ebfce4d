"""Closed-form optimal exploration variance for the sparse-reward continuous bandit.

The reward is 1 on the interval [mu + d, mu + d + w] and 0 elsewhere; the
policy is N(mu, sigma^2) with mu held fixed.  Everything here is expressed in
offset coordinates, so mu never appears.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gauss_math import SQRT_2PI_E, gaussian_interval_mass
from .numerics import golden_section_max


@dataclass(frozen=True)
class RewardInterval:
    """Rewarded region ``[d, d + w]`` measured from the policy mean."""

    d: float
    w: float

    def __post_init__(self):
        if not (self.d > 0 and self.w > 0):
            raise ValueError(f"need d > 0 and w > 0, got d={self.d}, w={self.w}")


@dataclass(frozen=True)
class SigmaBracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not 0 < self.lo < self.hi:
            raise ValueError(f"need 0 < lo < hi, got [{self.lo}, {self.hi}]")


def policy_value(sigma: float, interval: RewardInterval) -> float:
    """Expected binary reward of N(0, sigma^2) on [d, d + w]."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return gaussian_interval_mass(0.0, sigma, interval.d, interval.d + interval.w)


def optimal_sigma_closed(interval: RewardInterval) -> float:
    """sigma* = sqrt((2dw + w^2) / (2 ln(1 + w/d)))."""
    d, w = interval.d, interval.w
    return math.sqrt(0.5 * (2.0 * d * w + w * w) / math.log1p(w / d))


def default_bracket(interval: RewardInterval) -> SigmaBracket:
    # sigma* lies in (d, d + w); the 10% margin keeps the endpoints clear of it
    return SigmaBracket(0.9 * interval.d, 1.1 * (interval.d + interval.w))


def optimal_sigma_numeric(
    interval: RewardInterval,
    tol: float = 1e-8,
    bracket: SigmaBracket | None = None,
) -> float:
    """Brute-force argmax of :func:`policy_value` by golden-section search.

    V is unimodal in sigma: dV/dsigma > 0 for sigma < d and < 0 for
    sigma > d + w, so the default bracket contains a single interior maximum.
    Raises :class:`~vdexplore.numerics.BracketError` if it does not.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    bracket = bracket or default_bracket(interval)
    return golden_section_max(lambda s: policy_value(s, interval), bracket.lo, bracket.hi, tol)


def inverse_value_sigma(w: float, value: float, floor: float = 0.0) -> float:
    """Value-to-variance rule sigma = w / (sqrt(2 pi e) * max(V, floor))."""
    if not w > 0:
        raise ValueError(f"w must be positive, got {w}")
    if floor < 0:
        raise ValueError(f"floor must be nonnegative, got {floor}")
    v = max(value, floor)
    if not v > 0:
        raise ValueError("value must be positive when no positive floor is set")
    return w / (SQRT_2PI_E * v)


def batch_success_probability(value: float, n: int) -> tuple[float, float]:
    """P(at least one reward in a batch of n) and its first-order approximation n*V."""
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"value must lie in [0, 1], got {value}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    exact = -math.expm1(n * math.log1p(-value)) if value < 1.0 else 1.0
    return exact, n * value
