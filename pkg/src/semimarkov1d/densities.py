"""Directed waiting-time densities: closed-form transforms and exact samplers.

Every supported family knows three exact things about itself: its Laplace
transform ``phi_laplace(s)``, the transform ``(1 - phi_laplace(s)) / s`` of
its survival probability (evaluated in a cancellation-free form whose s -> 0
limit is the mean waiting time), and how to draw from itself with uniform
variates.  Keeping transforms and samplers paired per family is what lets
Laplace-domain results and Monte Carlo estimates check each other later.
"""

from __future__ import annotations

import cmath
import contextlib
import contextvars
import math
from dataclasses import dataclass

from .errors import DomainError, NormalizationError, ParamError

# Tolerance within which probability weights are accepted and renormalized.
WEIGHT_TOL = 1e-12

# Pointwise evaluation is only promised for Re(s) >= 0, but numerical
# inversion contours dip into the left half-plane where the closed forms
# continue analytically.  The inversion routine flips this flag around its
# evaluator calls; it is per-thread state, never user-facing.
_CONTINUATION = contextvars.ContextVar("laplace_continuation", default=False)


@contextlib.contextmanager
def analytic_continuation():
    """Permit transform evaluation at Re(s) < 0 inside the block."""
    token = _CONTINUATION.set(True)
    try:
        yield
    finally:
        _CONTINUATION.reset(token)


def _as_laplace_point(s: complex) -> complex:
    s = complex(s)
    if s.real < 0.0 and not _CONTINUATION.get():
        raise DomainError(f"Laplace point must satisfy Re(s) >= 0, got {s}")
    return s


def _one_minus_exp_over(x: complex) -> complex:
    """(1 - exp(-x)) / x without cancellation near x = 0."""
    if abs(x) < 1e-5:
        # Truncation error below 1e-22 for |x| < 1e-5.
        return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
    return (1.0 - cmath.exp(-x)) / x


@dataclass(frozen=True)
class Exponential:
    """Exponential dwell with the given rate."""

    rate: float

    def __post_init__(self):
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ParamError(f"exponential rate must be positive, got {self.rate}")

    def phi_laplace(self, s: complex) -> complex:
        if s == 0:
            return 1.0 + 0.0j
        return self.rate / (s + self.rate)

    def survival_laplace(self, s: complex) -> complex:
        # (1 - phi)/s collapses exactly; valid at s = 0 too.
        return 1.0 / (s + self.rate)

    def mean(self) -> float:
        return 1.0 / self.rate

    def sample(self, stream) -> float:
        return -math.log(stream.next()) / self.rate


@dataclass(frozen=True)
class Erlang:
    """Sum of ``shape`` independent exponential stages sharing one rate."""

    shape: int
    rate: float

    def __post_init__(self):
        if not isinstance(self.shape, int) or isinstance(self.shape, bool) or self.shape < 1:
            raise ParamError(f"erlang shape must be a positive integer, got {self.shape!r}")
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ParamError(f"erlang rate must be positive, got {self.rate}")

    def phi_laplace(self, s: complex) -> complex:
        if s == 0:
            return 1.0 + 0.0j
        return (self.rate / (s + self.rate)) ** self.shape

    def survival_laplace(self, s: complex) -> complex:
        # (1 - q^k)/s = (1/(s+rate)) * sum_{j<k} q^j with q = rate/(s+rate).
        q = self.rate / (s + self.rate)
        acc = 1.0 + 0.0j
        term = 1.0 + 0.0j
        for _ in range(self.shape - 1):
            term *= q
            acc += term
        return acc / (s + self.rate)

    def mean(self) -> float:
        return self.shape / self.rate

    def sample(self, stream) -> float:
        # Product of uniforms: one log instead of `shape` logs.
        prod = 1.0
        for _ in range(self.shape):
            prod *= stream.next()
        return -math.log(prod) / self.rate


@dataclass(frozen=True)
class DeterministicDelay:
    """Unit point mass at a fixed positive delay."""

    delay: float

    def __post_init__(self):
        if not (self.delay > 0.0 and math.isfinite(self.delay)):
            raise ParamError(f"delay must be positive, got {self.delay}")

    def phi_laplace(self, s: complex) -> complex:
        if s == 0:
            return 1.0 + 0.0j
        return cmath.exp(-s * self.delay)

    def survival_laplace(self, s: complex) -> complex:
        return self.delay * _one_minus_exp_over(s * self.delay)

    def mean(self) -> float:
        return self.delay

    def sample(self, stream) -> float:
        # Consumes no variates.
        return self.delay


@dataclass(frozen=True)
class HyperExponential:
    """Probabilistic mixture of exponential branches.

    ``branches`` holds (probability, rate) pairs.  Probabilities must sum to
    one within ``WEIGHT_TOL``; they are renormalized exactly once on
    construction and never rescaled beyond that tolerance.
    """

    branches: tuple[tuple[float, float], ...]

    def __post_init__(self):
        branches = tuple((float(p), float(r)) for p, r in self.branches)
        if not branches:
            raise ParamError("hyperexponential needs at least one branch")
        total = math.fsum(p for p, _ in branches)
        for p, r in branches:
            if not (0.0 <= p <= 1.0 + WEIGHT_TOL):
                raise ParamError(f"branch probability {p} outside [0, 1]")
            if not (r > 0.0 and math.isfinite(r)):
                raise ParamError(f"branch rate must be positive, got {r}")
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ParamError(
                f"branch probabilities sum to {total!r}, expected 1 within {WEIGHT_TOL}")
        object.__setattr__(
            self, "branches", tuple((p / total, r) for p, r in branches))

    def phi_laplace(self, s: complex) -> complex:
        if s == 0:
            return 1.0 + 0.0j
        return sum(p * r / (s + r) for p, r in self.branches)

    def survival_laplace(self, s: complex) -> complex:
        return sum(p / (s + r) for p, r in self.branches)

    def mean(self) -> float:
        return math.fsum(p / r for p, r in self.branches)

    def sample(self, stream) -> float:
        u = stream.next()
        acc = 0.0
        rate = self.branches[-1][1]  # residue from rounding falls to the last branch
        for p, r in self.branches:
            acc += p
            if u < acc:
                rate = r
                break
        return -math.log(stream.next()) / rate


DensityFamily = Exponential | Erlang | DeterministicDelay | HyperExponential


@dataclass(frozen=True)
class WaitingTimeDensity:
    """One directed transition: a branch weight times a normalized dwell law."""

    weight: float
    family: DensityFamily

    def __post_init__(self):
        w = float(self.weight)
        # The shared tolerance leaves room for renormalization to fix w up.
        if not (-WEIGHT_TOL <= w <= 1.0 + WEIGHT_TOL and math.isfinite(w)):
            raise NormalizationError(f"transition weight {self.weight} outside [0, 1]")
        object.__setattr__(self, "weight", min(max(w, 0.0), 1.0))

    def psi_laplace(self, s: complex) -> complex:
        """Transform of the directed density: weight times the dwell transform."""
        return self.weight * self.family.phi_laplace(s)

    def survival_term(self, s: complex) -> complex:
        """This transition's share of the state survival transform."""
        return self.weight * self.family.survival_laplace(s)


def laplace_wt(density: WaitingTimeDensity, s: complex) -> complex:
    """Laplace transform of a directed waiting-time density.

    At s = 0 this is exactly the branch weight, because the dwell law is
    normalized.  Points with Re(s) < 0 are rejected.
    """
    s = _as_laplace_point(s)
    return density.psi_laplace(s)
