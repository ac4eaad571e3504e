"""Waiting-time families: transforms vs quadrature, samplers vs moments.

The quadrature oracle integrates e^{-st} f(t) dt numerically for each family
and pins the closed-form transforms against it; sampler checks draw from the
fixed-seed stream and compare empirical moments against exact ones.
"""

from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

import semimarkov1d as sm
from semimarkov1d.streams import UniformStream

FAMILIES = [
    sm.Exponential(0.7),
    sm.Erlang(3, 1.4),
    sm.DeterministicDelay(0.9),
    sm.HyperExponential(((0.3, 0.5), (0.7, 2.5))),
]


def _pdf(family, t: float) -> float:
    """Time-domain density, used only by the quadrature oracle."""
    if isinstance(family, sm.Exponential):
        return family.rate * math.exp(-family.rate * t)
    if isinstance(family, sm.Erlang):
        k, lam = family.shape, family.rate
        return lam ** k * t ** (k - 1) * math.exp(-lam * t) / math.factorial(k - 1)
    if isinstance(family, sm.HyperExponential):
        return sum(p * lam * math.exp(-lam * t) for p, lam in family.branches)
    raise AssertionError(f"no pdf for {family}")


@pytest.mark.parametrize("family", [f for f in FAMILIES
                                    if not isinstance(f, sm.DeterministicDelay)])
@pytest.mark.parametrize("s", [0.25, 1.0, 3.7])
def test_transform_matches_quadrature(family, s):
    oracle, err = integrate.quad(lambda t: math.exp(-s * t) * _pdf(family, t),
                                 0.0, math.inf)
    assert err < 1e-7
    assert family.phi_laplace(s) == pytest.approx(oracle, rel=1e-7)


@pytest.mark.parametrize("family", [f for f in FAMILIES
                                    if not isinstance(f, sm.DeterministicDelay)])
@pytest.mark.parametrize("s", [0.25, 1.0, 3.7])
def test_survival_transform_matches_quadrature(family, s):
    def survival(t: float) -> float:
        value, _ = integrate.quad(lambda u: _pdf(family, u), t, math.inf)
        return value

    # integrate e^{-st} * P(T > t); the inner tail integral is exact enough.
    oracle, err = integrate.quad(
        lambda t: math.exp(-s * t) * survival(t), 0.0, math.inf, limit=200)
    assert err < 1e-8
    assert family.survival_laplace(s) == pytest.approx(oracle, rel=1e-6)


def test_deterministic_delay_transform_is_pure_phase():
    fam = sm.DeterministicDelay(1.0)
    assert fam.phi_laplace(1.0) == pytest.approx(math.exp(-1.0))
    # (1 - e^{-s tau})/s at s=1, tau=1.
    assert fam.survival_laplace(1.0) == pytest.approx(1.0 - math.exp(-1.0))
    assert abs(fam.phi_laplace(2.0j)) == pytest.approx(1.0)


def test_exponential_weighted_transform_frozen_value():
    density = sm.WaitingTimeDensity(weight=1.0, family=sm.Exponential(1.0))
    assert sm.laplace_wt(density, 1.0) == pytest.approx(0.5, abs=1e-15)


def test_survival_small_s_stability():
    # Near s=0 the naive (1 - phi)/s cancels; the stable form must not.
    fam = sm.Exponential(2.0)
    assert fam.survival_laplace(1e-6) == pytest.approx(0.5, abs=1e-6)
    det = sm.DeterministicDelay(3.0)
    assert det.survival_laplace(1e-9) == pytest.approx(3.0, rel=1e-8)


@pytest.mark.parametrize("family", FAMILIES)
def test_transform_at_zero_is_exactly_one(family):
    assert family.phi_laplace(0) == 1.0


@pytest.mark.parametrize("family", FAMILIES)
def test_survival_at_zero_is_the_mean(family):
    assert family.survival_laplace(0) == pytest.approx(family.mean(), rel=1e-12)


@pytest.mark.parametrize("family", FAMILIES)
@given(re=st.floats(0.0, 50.0), im=st.floats(-50.0, 50.0))
def test_transform_bounded_on_right_half_plane(family, re, im):
    assert abs(family.phi_laplace(complex(re, im))) <= 1.0 + 1e-12


def test_domain_error_on_left_half_plane():
    density = sm.WaitingTimeDensity(weight=0.5, family=sm.Exponential(1.0))
    with pytest.raises(sm.DomainError):
        sm.laplace_wt(density, -0.5)


@pytest.mark.parametrize("bad", [
    lambda: sm.Exponential(0.0),
    lambda: sm.Exponential(-1.0),
    lambda: sm.Exponential(math.inf),
    lambda: sm.Erlang(0, 1.0),
    lambda: sm.Erlang(2, -0.5),
    lambda: sm.DeterministicDelay(0.0),
    lambda: sm.HyperExponential(((0.5, 1.0), (0.6, 2.0))),
    lambda: sm.HyperExponential(((1.0, -2.0),)),
    lambda: sm.HyperExponential(()),
])
def test_invalid_parameters_rejected(bad):
    with pytest.raises((sm.ParamError, sm.NormalizationError)):
        bad()


def test_weight_outside_unit_interval_rejected():
    with pytest.raises(sm.NormalizationError):
        sm.WaitingTimeDensity(weight=1.5, family=sm.Exponential(1.0))
    with pytest.raises(sm.NormalizationError):
        sm.WaitingTimeDensity(weight=-0.1, family=sm.Exponential(1.0))


@pytest.mark.parametrize("family", FAMILIES)
def test_sampler_moments_match(family):
    stream = UniformStream(seed=1234)
    n = 200_000
    total = 0.0
    total_sq = 0.0
    for _ in range(n):
        x = family.sample(stream)
        assert x >= 0.0
        total += x
        total_sq += x * x
    mean = total / n
    var = total_sq / n - mean * mean
    # 5 sigma of the sample-mean deviation, generous but seed-stable.
    band = 5.0 * math.sqrt(max(var, 1e-30) / n)
    assert abs(mean - family.mean()) <= band + 1e-12


def test_deterministic_sampler_is_constant_and_drawless():
    stream = UniformStream(seed=9)
    before = stream.next()
    fam = sm.DeterministicDelay(0.4)
    assert fam.sample(stream) == 0.4
    # The sampler consumed nothing: the next draw continues the sequence.
    stream2 = UniformStream(seed=9)
    stream2.next()
    assert stream.next() == stream2.next()
    assert before != 0.4


def test_erlang_sampler_is_sum_of_stage_draws():
    # shape=1 must reproduce the plain exponential draw stream-for-stream.
    a = UniformStream(seed=77)
    b = UniformStream(seed=77)
    erl = sm.Erlang(1, 2.0)
    exp = sm.Exponential(2.0)
    for _ in range(50):
        assert erl.sample(a) == pytest.approx(exp.sample(b), rel=1e-15)
