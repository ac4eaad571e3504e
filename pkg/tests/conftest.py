"""Shared fixtures and chain factories for the test suite."""

from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, settings

import semimarkov1d as sm

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

FAMILY_POOL = (
    lambda rng: sm.Exponential(rng.uniform(0.3, 3.0)),
    lambda rng: sm.Erlang(rng.randint(1, 4), rng.uniform(0.5, 3.0)),
    lambda rng: sm.DeterministicDelay(rng.uniform(0.2, 2.0)),
    lambda rng: sm.HyperExponential((
        (0.4, rng.uniform(0.3, 1.5)),
        (0.6, rng.uniform(1.5, 4.0)),
    )),
)


def two_state_chain() -> sm.Chain:
    """Unit-rate exponential hops both ways; the worked closed-form case."""
    return sm.make_chain(2, [
        (1, 2, 1.0, sm.Exponential(1.0)),
        (2, 1, 1.0, sm.Exponential(1.0)),
    ])


def symmetric_three_chain() -> sm.Chain:
    """Three states, every directed hop weight 1/2, unit-rate exponentials.

    Both bond factors equal 1/8 at s=1, so hand-computed sums are easy.
    """
    return sm.make_chain(3, [
        (1, 2, 1.0, sm.Exponential(1.0)),
        (2, 1, 0.5, sm.Exponential(1.0)),
        (2, 3, 0.5, sm.Exponential(1.0)),
        (3, 2, 1.0, sm.Exponential(1.0)),
    ])


def random_chain(rng: random.Random, length: int,
                 allow_traps: bool = True,
                 exponential_only: bool = False,
                 shared_rate_per_state: bool = False) -> sm.Chain:
    """A random well-formed chain: every hop present, random weights.

    With ``shared_rate_per_state`` every density leaving a state is an
    Exponential with one common rate, which makes the walk Markovian.
    """
    transitions = []
    for j in range(1, length + 1):
        destinations = []
        if j < length:
            destinations.append(j + 1)
        if j > 1:
            destinations.append(j - 1)
        if allow_traps and rng.random() < 0.4:
            destinations.append("trap")
        if not destinations:
            destinations = ["trap"]
        raw = [rng.uniform(0.2, 1.0) for _ in destinations]
        total = sum(raw)
        state_rate = rng.uniform(0.4, 3.0)
        for dest, r in zip(destinations, raw):
            if shared_rate_per_state:
                family = sm.Exponential(state_rate)
            elif exponential_only:
                family = sm.Exponential(rng.uniform(0.4, 3.0))
            else:
                family = rng.choice(FAMILY_POOL)(rng)
            transitions.append((j, dest, r / total, family))
    return sm.make_chain(length, transitions)


@pytest.fixture
def two_state() -> sm.Chain:
    return two_state_chain()


@pytest.fixture
def three_sym() -> sm.Chain:
    return symmetric_three_chain()
