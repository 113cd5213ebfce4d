import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdexplore import gauss_math as gm
from vdexplore.verify import entropy_oracle, erf_series

finite = st.floats(-30, 30, allow_nan=False)


@pytest.mark.parametrize("x", [-6.0, -3.0, -1.0, -0.5, -1e-9, 0.0, 1e-9, 0.3, 0.84375, 1.25, 2.0, 2.857, 5.9, 6.0])
def test_erf_matches_mpmath(x):
    assert gm.erf(x) == pytest.approx(float(mpmath.erf(x)), abs=1e-15)


@pytest.mark.parametrize("x", [0.5, 1.0, 3.0, 6.0, 10.0, 20.0, 27.0])
def test_erfc_relative_accuracy_in_tail(x):
    assert gm.erfc(x) == pytest.approx(float(mpmath.erfc(x)), rel=1e-14)


def test_erfc_far_tail_and_negative():
    assert gm.erfc(40.0) == 0.0
    assert gm.erfc(-40.0) == 2.0
    assert gm.erfc(-2.0) == pytest.approx(float(mpmath.erfc(-2.0)), rel=1e-15)


def test_erf_series_oracle_agrees_with_mpmath():
    for x in (-3.0, -1.1, 0.2, 2.5, 3.0):
        assert erf_series(x) == pytest.approx(float(mpmath.erf(x)), abs=1e-13)


@given(finite)
def test_erf_is_odd_and_bounded(x):
    assert gm.erf(-x) == -gm.erf(x)
    assert -1.0 <= gm.erf(x) <= 1.0


@given(finite)
def test_cdf_symmetry(x):
    assert abs(gm.std_normal_cdf(x) + gm.std_normal_cdf(-x) - 1.0) <= 1e-15


@given(st.floats(-8, 8), st.floats(0, 2))
def test_cdf_monotone(x, dx):
    assert gm.std_normal_cdf(x + dx) >= gm.std_normal_cdf(x)


def test_interval_mass_reference_values():
    assert gm.gaussian_interval_mass(0, 1, 1, 2) == pytest.approx(0.1359051219, abs=1e-9)
    assert gm.gaussian_interval_mass(0, 1, -10, -1) == pytest.approx(0.1586552539, abs=1e-9)
    # thin interval far out: mass = integral of the density, not a rectangle
    expected = float(mpmath.ncdf(3.01 / 3) - mpmath.ncdf(1.0))
    assert expected == pytest.approx(8.052248e-4, rel=1e-6)
    assert gm.gaussian_interval_mass(0, 3, 3, 3.01) == pytest.approx(expected, rel=1e-12)


def test_interval_mass_keeps_relative_precision_far_in_tail():
    expected = float(mpmath.ncdf(-12) - mpmath.ncdf(-12.5))
    assert gm.gaussian_interval_mass(0, 1, 12, 12.5) == pytest.approx(expected, rel=1e-12)
    assert gm.gaussian_interval_mass(0, 1, -12.5, -12) == pytest.approx(expected, rel=1e-12)


def test_interval_mass_degenerate_and_errors():
    assert gm.gaussian_interval_mass(0, 1, 0.3, 0.3) == 0.0
    with pytest.raises(ValueError):
        gm.gaussian_interval_mass(0, 0, 0, 1)
    with pytest.raises(ValueError):
        gm.gaussian_interval_mass(0, 1, 1, 0)


@given(st.floats(-5, 5), st.floats(0.01, 5), st.floats(-10, 10), st.floats(0, 5), st.floats(0, 5))
def test_interval_mass_additive(mu, sigma, lo, w1, w2):
    whole = gm.gaussian_interval_mass(mu, sigma, lo, lo + w1 + w2)
    parts = gm.gaussian_interval_mass(mu, sigma, lo, lo + w1) + gm.gaussian_interval_mass(mu, sigma, lo + w1, lo + w1 + w2)
    assert whole == pytest.approx(parts, abs=1e-14)


def _entropy_mp(mu, sigma, lo=-1.0, hi=1.0):
    pdf = lambda x: mpmath.npdf(x, mu, sigma)  # noqa: E731
    interior = mpmath.quad(lambda x: -pdf(x) * mpmath.log(pdf(x)), [lo, mu, hi] if lo < mu < hi else [lo, hi])
    p1 = mpmath.ncdf(lo, mu, sigma)
    p2 = 1 - mpmath.ncdf(hi, mu, sigma)
    return float(interior - sum(p * mpmath.log(p) for p in (p1, p2) if p > 0))


@pytest.mark.parametrize("mu,sigma", [(0, 1), (0.5, 0.2), (-2, 1), (2, 2), (0, 0.25), (0.9, 0.05)])
def test_clipped_entropy_matches_mpmath(mu, sigma):
    assert gm.clipped_gaussian_entropy(mu, sigma) == pytest.approx(_entropy_mp(mu, sigma), abs=1e-10)


def test_clipped_entropy_reference_values():
    assert gm.clipped_gaussian_entropy(0.0, 0.25) == pytest.approx(0.032763, abs=1e-6)
    # small sigma reduces to the unclipped Gaussian entropy
    assert gm.clipped_gaussian_entropy(0.0, 0.01) == pytest.approx(-3.1862317, abs=1e-7)
    assert gm.clipped_gaussian_entropy(0.0, 0.01) == pytest.approx(math.log(gm.SQRT_2PI_E * 0.01), abs=1e-12)


def test_clipped_entropy_far_outside_is_zero():
    assert gm.clipped_gaussian_entropy(-2.0, 0.01) == 0.0
    assert gm.clipped_gaussian_entropy(5.0, 0.1) == 0.0


def test_clipped_entropy_custom_bounds():
    b = gm.ClipBounds(0.0, 4.0)
    assert gm.clipped_gaussian_entropy(2.0, 0.5, b) == pytest.approx(_entropy_mp(2.0, 0.5, 0.0, 4.0), abs=1e-10)
    with pytest.raises(ValueError):
        gm.ClipBounds(1.0, 1.0)


@settings(max_examples=50)
@given(st.floats(-2, 2), st.floats(0.02, 3))
def test_clipped_entropy_reflection_symmetry(mu, sigma):
    assert gm.clipped_gaussian_entropy(mu, sigma) == pytest.approx(gm.clipped_gaussian_entropy(-mu, sigma), abs=1e-12)


def test_entropy_oracle_matches_formula():
    for mu, s in [(0.0, 0.5), (-0.5, 1.0), (2.0, 2.0)]:
        assert entropy_oracle(mu, s) == pytest.approx(gm.clipped_gaussian_entropy(mu, s), abs=1e-8)


def test_erf_override_restores():
    before = gm.erf(0.7)
    with gm.erf_override(lambda x: round(math.erf(x), 7)):
        assert gm.erf(0.7) == round(math.erf(0.7), 7)
        assert gm.erfc(0.7) == 1.0 - round(math.erf(0.7), 7)
    assert gm.erf(0.7) == before


@settings(max_examples=50)
@given(st.floats(-3, 3), st.floats(0.02, 3), st.floats(-3, 0), st.floats(0.1, 3))
def test_clipped_entropy_reflection_general_bounds(mu, sigma, a, width):
    b = a + width
    left = gm.clipped_gaussian_entropy(mu, sigma, gm.ClipBounds(a, b))
    right = gm.clipped_gaussian_entropy(-mu, sigma, gm.ClipBounds(-b, -a))
    assert abs(left - right) <= 1e-10


@given(st.floats(-5, 5), st.floats(0.01, 5), st.floats(-10, 10), st.floats(0, 5), st.floats(0, 5))
def test_interval_mass_monotone_in_hi_antitone_in_lo(mu, sigma, lo, w, extra):
    base = gm.gaussian_interval_mass(mu, sigma, lo, lo + w)
    assert gm.gaussian_interval_mass(mu, sigma, lo, lo + w + extra) >= base
    assert gm.gaussian_interval_mass(mu, sigma, lo - extra, lo + w) >= base
