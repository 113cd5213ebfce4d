"""Numeric checks of every closed-form result against a brute-force oracle.

Each :class:`Check` carries the measured error and the tolerance it must stay
under; the report has one tab-separated line per check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import gauss_math as gm
from .bandit import BanditSchedule, Stage, sample_batch
from .learner import InverseMapping, score_grad_logsigma, score_grad_mu, score_grad_wlog
from .mdp_theory import QProfile, hdr_bound_check, monotonicity_sweep, sweep_violations
from .numerics import BracketError
from .variance_theory import (
    RewardInterval,
    batch_success_probability,
    inverse_value_sigma,
    optimal_sigma_closed,
    optimal_sigma_numeric,
    policy_value,
)

SIGMA_GRID = [(d, w) for d in (0.5, 1.0, 2.0, 5.0, 10.0) for w in (0.01, 0.1, 0.3 * d)]
ENTROPY_MU = (-2.0, -0.5, 0.0, 0.5, 2.0)
ENTROPY_SIGMA = (0.05, 0.2, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.measured) and self.measured <= self.tolerance

    def line(self) -> str:
        return f"{self.name}\t{self.measured:.6e}\t{self.tolerance:.1e}\t{'PASS' if self.passed else 'FAIL'}"


def erf_series(x: float, terms: int = 200) -> float:
    """Maclaurin series 2/sqrt(pi) sum (-1)^k x^(2k+1) / (k! (2k+1)); for |x| <= 3."""
    out, term = [], x
    for k in range(terms):
        out.append(term / (2 * k + 1))
        term *= -x * x / (k + 1)
        if abs(term) < 1e-30:
            break
    return 2.0 / math.sqrt(math.pi) * math.fsum(out)


def entropy_oracle(mu: float, sigma: float, lo: float = -1.0, hi: float = 1.0, n: int = 200_001) -> float:
    """-integral p ln p on a fine Simpson grid plus the exact point-mass terms."""
    x = np.linspace(lo, hi, n)
    p = np.exp(-0.5 * ((x - mu) / sigma) ** 2) / (math.sqrt(2 * math.pi) * sigma)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(p > 0, -p * np.log(p), 0.0)
    h = (hi - lo) / (n - 1)
    interior = h / 3.0 * (f[0] + f[-1] + 4.0 * f[1:-1:2].sum() + 2.0 * f[2:-1:2].sum())
    p1 = 0.5 * math.erfc((mu - lo) / (sigma * math.sqrt(2)))
    p2 = 0.5 * math.erfc((hi - mu) / (sigma * math.sqrt(2)))
    return interior - sum(q * math.log(q) for q in (p1, p2) if q > 0)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def gauss_checks() -> list[Check]:
    xs = np.linspace(-3.0, 3.0, 61)
    erf_err = max(abs(gm.erf(x) - erf_series(x)) for x in xs)
    sym = max(abs(gm.std_normal_cdf(x) + gm.std_normal_cdf(-x) - 1.0) for x in np.linspace(-8, 8, 161))
    checks = [Check("erf_vs_series", erf_err, 1e-7), Check("cdf_symmetry", sym, 1e-7)]
    for mu in ENTROPY_MU:
        for s in ENTROPY_SIGMA:
            err = abs(gm.clipped_gaussian_entropy(mu, s) - entropy_oracle(mu, s))
            checks.append(Check(f"clipped_entropy_quadrature[mu={mu:g},sigma={s:g}]", err, 1e-4))
    for s in (1e-2, 1e-3):
        err = abs(gm.clipped_gaussian_entropy(0.0, s) - math.log(gm.SQRT_2PI_E * s))
        checks.append(Check(f"clipped_entropy_small_sigma[sigma={s:g}]", err, 1e-6))
    return checks


def bandit_theory_checks() -> list[Check]:
    checks = []
    for d, w in SIGMA_GRID:
        iv = RewardInterval(d, w)
        closed = optimal_sigma_closed(iv)
        tag = f"[d={d:g},w={w:g}]"
        try:
            numeric = optimal_sigma_numeric(iv, tol=1e-10)
            err = _rel(numeric, closed)
        except BracketError:
            err = math.inf
        checks.append(Check(f"sigma_closed_vs_numeric{tag}", err, 1e-4))
        h = 1e-6 * closed
        fd = (policy_value(closed + h, iv) - policy_value(closed - h, iv)) / (2 * h)
        checks.append(Check(f"first_order_condition{tag}", abs(fd), 1e-6))
        ratio = gm.std_normal_pdf(d / closed) / gm.std_normal_pdf((d + w) / closed)
        checks.append(Check(f"density_ratio_identity{tag}", _rel(ratio, (d + w) / d), 1e-8))

    pairs = []
    for d in np.arange(1.0, 10.0 + 1e-9, 0.5):
        iv = RewardInterval(float(d), 0.1)
        s = optimal_sigma_closed(iv)
        pairs.append((s, policy_value(s, iv)))
    bad = sum(1 for (s0, v0), (s1, v1) in zip(pairs, pairs[1:]) if not (s1 > s0 and v1 < v0))
    checks.append(Check("value_variance_monotone[w=0.1]", bad, 0))

    for ratio in (1e-3, 1e-4, 1e-5):
        s = optimal_sigma_closed(RewardInterval(1.0, ratio))
        checks.append(Check(f"limit_sigma_to_d[w/d={ratio:g}]", abs(s - 1.0), 5 * ratio))
    s = optimal_sigma_closed(RewardInterval(1e6, 10.0))
    checks.append(Check("limit_sigma_to_d[w/d=1e-5,strict]", abs(s / 1e6 - 1.0), 1e-3))
    # sigma* ~ w / sqrt(2 ln(w/d)) as d -> 0: the decay is only logarithmic
    small_d = [1e-2, 1e-4, 1e-8, 1e-16, 1e-30]
    tail = [optimal_sigma_closed(RewardInterval(d, 0.1)) for d in small_d]
    checks.append(Check("limit_sigma_to_zero_monotone[w=0.1]",
                        sum(1 for a, b in zip(tail, tail[1:]) if not b < a), 0))
    checks.append(Check("limit_sigma_to_zero[d=1e-30,w=0.1]", tail[-1], 0.01))

    for d in (2.0, 3.0, 5.0):
        iv = RewardInterval(d, 0.01)
        s = optimal_sigma_closed(iv)
        checks.append(Check(f"inverse_value_mapping[d={d:g}]",
                            _rel(inverse_value_sigma(0.01, policy_value(s, iv), 0.0), s), 0.02))

    exact, linear = batch_success_probability(1e-3, 100)
    repeated = 1.0
    for _ in range(100):
        repeated *= 1.0 - 1e-3
    checks.append(Check("batch_probability_exact[V=1e-3,n=100]", abs(exact - (1.0 - repeated)), 1e-12))
    checks.append(Check("batch_probability_value[V=1e-3,n=100]", abs(exact - 0.0952079), 1e-5))
    checks.append(Check("batch_probability_linear_gap[V=1e-3,n=100]",
                        abs(exact - linear) - 0.5 * linear**2, 0.0))
    return checks


def mdp_checks() -> list[Check]:
    w = 0.2
    grid = [1.0 + 0.5 * i for i in range(9)]
    profiles = {"boxcar": QProfile.boxcar(w), "triangular": QProfile.triangular(w),
                "gaussian_bump": QProfile.gaussian_bump(w)}
    checks = []
    for name, prof in profiles.items():
        try:
            rows = monotonicity_sweep(prof, grid)
            bad = len(sweep_violations(rows)) + sum(not r.ratio_ok for r in rows)
            bad += sum(not (r.d < r.sigma_star < r.d + w) for r in rows)
        except BracketError:
            bad = math.inf
        checks.append(Check(f"mdp_bracket_monotone[{name}]", bad, 0))
    for name in ("triangular", "gaussian_bump"):
        prof = profiles[name].normalized()
        for alpha in (0.8, 0.9, 0.95):
            for d in (1.0, 2.0):
                _, _, gap = hdr_bound_check(prof, alpha, d)
                checks.append(Check(f"hdr_gap[{name},alpha={alpha:g},d={d:g}]", gap, 1.0 - alpha))
    return checks


def _surrogate(a, r, mu, sigma) -> float:
    logp = -0.5 * ((a - mu) / sigma) ** 2 - math.log(sigma) - 0.5 * math.log(2 * math.pi)
    return float(np.mean(r * logp))


def gradient_checks(seed: int = 7, n: int = 1000) -> list[Check]:
    rng = np.random.default_rng(seed)
    sched = BanditSchedule((Stage(1, 1, -0.5, 2.0),))
    mu, sigma = 0.3, 1.1
    batch = sample_batch(mu, sigma, sched, 1, n, rng)
    a, r = batch.actions, batch.rewards.astype(float)
    h = 1e-5
    fd_mu = (_surrogate(a, r, mu + h, sigma) - _surrogate(a, r, mu - h, sigma)) / (2 * h)
    fd_ls = (_surrogate(a, r, mu, sigma * math.exp(h)) - _surrogate(a, r, mu, sigma * math.exp(-h))) / (2 * h)
    mapping = InverseMapping(math.log(0.05), floor=0.01)
    v_hat = 0.02
    s_map = mapping.sigma(v_hat)
    fd_w = (_surrogate(a, r, mu, InverseMapping(mapping.log_w + h, 0.01).sigma(v_hat))
            - _surrogate(a, r, mu, InverseMapping(mapping.log_w - h, 0.01).sigma(v_hat))) / (2 * h)
    return [
        Check("score_grad_mu_fd", _rel(score_grad_mu(batch, mu, sigma), fd_mu), 1e-4),
        Check("score_grad_logsigma_fd", _rel(score_grad_logsigma(batch, mu, sigma), fd_ls), 1e-4),
        Check("score_grad_wlog_fd", _rel(score_grad_wlog(batch, mu, mapping, v_hat), fd_w), 1e-4),
        Check("score_grad_wlog_identity", abs(score_grad_wlog(batch, mu, mapping, v_hat)
                                              - score_grad_logsigma(batch, mu, s_map)), 0.0),
    ]


def run_checks() -> list[Check]:
    return gauss_checks() + bandit_theory_checks() + mdp_checks() + gradient_checks()


def run_verify(report_path: str | Path | None = None) -> tuple[list[Check], bool]:
    """Run every check; optionally write the report.  Returns (checks, all_passed)."""
    checks = run_checks()
    if report_path is not None:
        path = Path(report_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = ["name\tmeasured\ttolerance\tstatus"] + [c.line() for c in checks]
        path.write_text("\n".join(lines) + "\n")
    return checks, all(c.passed for c in checks)
