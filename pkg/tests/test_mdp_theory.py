import math

import mpmath
import numpy as np
import pytest

from vdexplore.mdp_theory import (
    MONOTONE_RATIO_LIMIT,
    QProfile,
    SweepRow,
    hdr_bound_check,
    hdr_interval,
    mdp_optimal_sigma,
    mdp_value,
    monotonicity_sweep,
    offset_distance,
    sweep_violations,
)
from vdexplore.variance_theory import RewardInterval, optimal_sigma_closed, policy_value

W = 0.2
D_GRID = [1.0 + 0.5 * i for i in range(9)]


def _value_mp(sigma, d, profile):
    """Exact per-piece antiderivative: q is linear, so each piece is Phi and phi terms."""
    sigma, d = mpmath.mpf(sigma), mpmath.mpf(d)
    total = mpmath.mpf(0)
    for (a, b), (qa, qb) in zip(zip(profile.offsets, profile.offsets[1:]), zip(profile.values, profile.values[1:])):
        a, b, qa, qb = (mpmath.mpf(x) for x in (a, b, qa, qb))
        slope = (qb - qa) / (b - a)
        ua, ub = (a + d) / sigma, (b + d) / sigma
        total += (qa - slope * (a + d)) * (mpmath.ncdf(ub) - mpmath.ncdf(ua))
        total += slope * sigma * (mpmath.npdf(ua) - mpmath.npdf(ub))
    return float(total)


def test_profile_validation():
    with pytest.raises(ValueError):
        QProfile((0.0,), (1.0,))
    with pytest.raises(ValueError):
        QProfile((0.1, 0.2), (1.0, 1.0))
    with pytest.raises(ValueError):
        QProfile((0.0, 0.2, 0.1), (1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        QProfile((0.0, 0.2), (1.0, -1.0))
    with pytest.raises(ValueError):
        QProfile((0.0, 0.2), (0.0, 0.0))
    with pytest.raises(ValueError):
        QProfile((0.0, 0.2), (1.0, 1.0), support=(0.1, 0.3))


def test_profile_integral_and_normalization():
    tri = QProfile.triangular(W)
    assert tri.integral() == pytest.approx(0.5 * W)
    assert tri.normalized().integral() == pytest.approx(1.0)
    assert tri.integral(0.0, 0.05) == pytest.approx(0.5 * 0.05 * 0.5)
    assert QProfile.gaussian_bump(W).normalized().integral() == pytest.approx(1.0)
    clipped = tri.clipped(0.05, 0.15)
    assert clipped(0.01) == 0.0 and clipped(0.1) == pytest.approx(1.0)
    assert clipped.integral() == pytest.approx(tri.integral(0.05, 0.15))


def test_profile_from_file(tmp_path):
    path = tmp_path / "q.txt"
    path.write_text("# offset q\n0.0 0.0\n0.1 2.0\n0.2 0.0\n")
    prof = QProfile.from_file(path)
    assert prof.width == pytest.approx(0.2) and prof(0.05) == pytest.approx(1.0)
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 2\n1 1 2\n")
    with pytest.raises(ValueError):
        QProfile.from_file(bad)


def test_boxcar_value_is_bandit_value():
    for sigma, d in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.5)]:
        expected = policy_value(sigma, RewardInterval(d, W))
        assert mdp_value(sigma, d, QProfile.boxcar(W)) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("name", ["triangular", "gaussian_bump"])
def test_value_matches_mpmath(name):
    prof = getattr(QProfile, name)(W)
    for sigma, d in [(1.2, 1.0), (2.5, 2.3)]:
        assert mdp_value(sigma, d, prof) == pytest.approx(_value_mp(sigma, d, prof), rel=1e-8)


def test_boxcar_optimal_sigma_matches_closed_form():
    s = mdp_optimal_sigma(1.0, QProfile.boxcar(W))
    assert s == pytest.approx(optimal_sigma_closed(RewardInterval(1.0, W)), rel=1e-7)
    assert s == pytest.approx(1.0984804, abs=1e-7)


def test_offset_distance_translation_invariant():
    assert offset_distance(0.5, 3.0) == offset_distance(-1.0, 1.5) == 2.5


@pytest.mark.parametrize("name", ["boxcar", "triangular", "gaussian_bump"])
def test_monotonicity_sweep(name):
    assert W / D_GRID[0] < MONOTONE_RATIO_LIMIT
    rows = monotonicity_sweep(getattr(QProfile, name)(W), D_GRID)
    assert sweep_violations(rows) == []
    assert all(r.ratio_ok and r.d < r.sigma_star < r.d + W for r in rows)


def test_sweep_violations_reports_bad_rows():
    rows = [SweepRow(1.0, 1.1, 0.05, True), SweepRow(1.5, 1.05, 0.06, True)]
    assert len(sweep_violations(rows)) == 2


def test_hdr_boxcar_is_centered():
    h = hdr_interval(QProfile.boxcar(W), 0.9)
    assert (h.lo_off, h.hi_off, h.mass) == pytest.approx((0.01, 0.19, 0.9), abs=1e-12)


def test_hdr_triangular_symmetric_and_exact():
    h = hdr_interval(QProfile.triangular(W), 0.8)
    assert h.mass == pytest.approx(0.8, abs=1e-9)
    assert h.lo_off + h.hi_off == pytest.approx(W, abs=1e-9)
    # mass of [w/2 - h, w/2 + h] is 1 - (1 - 2h/w)^2
    half = 0.5 * W * (1.0 - math.sqrt(0.2))
    assert h.hi_off - h.lo_off == pytest.approx(2 * half, abs=1e-9)


def test_hdr_is_shortest_among_equal_mass_intervals():
    prof = QProfile((0.0, 0.05, 0.2), (0.0, 1.0, 0.0))
    h = hdr_interval(prof, 0.7)
    total = prof.integral()
    for lo in np.linspace(0.0, 0.2 - (h.hi_off - h.lo_off), 50):
        assert prof.integral(lo, lo + h.hi_off - h.lo_off) / total <= h.mass + 1e-9


def test_hdr_rejects_bimodal_and_bad_alpha():
    bimodal = QProfile((0.0, 0.05, 0.1, 0.15, 0.2), (0.0, 1.0, 0.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        hdr_interval(bimodal, 0.8)
    with pytest.raises(ValueError):
        hdr_interval(QProfile.boxcar(W), 1.0)


@pytest.mark.parametrize("name", ["triangular", "gaussian_bump"])
@pytest.mark.parametrize("alpha", [0.8, 0.9, 0.95])
@pytest.mark.parametrize("d", [1.0, 2.0])
def test_hdr_bound(name, alpha, d):
    v_star, v_hat, gap = hdr_bound_check(getattr(QProfile, name)(W).normalized(), alpha, d)
    assert v_hat <= v_star + 1e-12
    assert gap <= 1.0 - alpha
