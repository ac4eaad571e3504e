"""Bridges from the Laplace domain to the time domain.

Two numerical inversion methods (a deformed-contour rule evaluating the
transform at complex points, and a purely real-axis rule with exact rational
coefficients) cross-check each other.  Independently, a Monte Carlo engine
samples walker trajectories event by event with exact per-family samplers
and turns them into occupancy and path-class estimates with binomial error
bars.  Agreement of the two bridges is the end-to-end test of the closed
forms.
"""

from __future__ import annotations

import cmath
import math
import warnings
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .chain import Chain, UP
from .config import TRAP as TRAP_KIND
from .densities import analytic_continuation
from .errors import (AccuracyWarning, EmptyInput, InsufficientSamples,
                     MethodError)
from .streams import UniformStream

# Destination marker for an absorption event.
TRAP = 0

# Below this magnitude, disagreement between the inversion methods is noise,
# not signal; no warning is issued.
CROSS_CHECK_FLOOR = 1e-12
CROSS_CHECK_RTOL = 1e-6


@dataclass(frozen=True)
class Talbot:
    """Fixed deformed-contour inversion rule with the given node count."""

    nodes: int = 32

    def __post_init__(self):
        if self.nodes < 4:
            raise MethodError(f"contour rule needs >= 4 nodes, got {self.nodes}")


@dataclass(frozen=True)
class GaverStehfest:
    """Real-axis inversion rule of the given (even) order.

    Coefficients are computed in exact rational arithmetic and the weighted
    sum is accumulated with compensated summation; orders beyond 32 are
    pointless in double precision and are refused.
    """

    order: int = 14

    def __post_init__(self):
        if self.order < 2 or self.order % 2 != 0 or self.order > 32:
            raise MethodError(
                f"order must be an even integer in 2..32, got {self.order}")


def _talbot_value(evaluator, t: float, nodes: int) -> float:
    # Fixed-contour rule: r scales the contour with the node count; the
    # endpoint theta = 0 contributes with weight 1/2.
    r = 2.0 * nodes / 5.0
    acc = 0.5 * math.exp(r) * complex(evaluator(complex(r / t, 0.0))).real
    for k in range(1, nodes):
        theta = k * math.pi / nodes
        cot = 1.0 / math.tan(theta)
        p = (r / t) * theta * complex(cot, 1.0)
        weight = 1.0 + 1.0j * theta * (1.0 + cot * cot) - 1.0j * cot
        acc += (cmath.exp(t * p) * weight * complex(evaluator(p))).real
    return 2.0 / (5.0 * t) * acc


@lru_cache(maxsize=None)
def _stehfest_coefficients(order: int) -> tuple[float, ...]:
    half = order // 2
    fact = math.factorial
    out = []
    for k in range(1, order + 1):
        acc = Fraction(0)
        for j in range((k + 1) // 2, min(k, half) + 1):
            acc += (Fraction(j ** half) * fact(2 * j)) / (
                fact(half - j) * fact(j) * fact(j - 1)
                * fact(k - j) * fact(2 * j - k))
        out.append(float(acc) if (k + half) % 2 == 0 else -float(acc))
    return tuple(out)


def _stehfest_value(evaluator, t: float, order: int) -> float:
    log2_over_t = math.log(2.0) / t
    coeffs = _stehfest_coefficients(order)
    terms = [coeffs[k - 1] * complex(evaluator(complex(k * log2_over_t, 0.0))).real
             for k in range(1, order + 1)]
    return log2_over_t * math.fsum(terms)


def invert_laplace(evaluator, t: float,
                   method: Talbot | GaverStehfest = Talbot(),
                   cross_check: bool = True) -> float:
    """Numerically invert a Laplace transform at one time point.

    ``evaluator`` maps a complex point in the right half-plane to the
    transform value.  With ``cross_check`` enabled (the default), the other
    method is evaluated too and AccuracyWarning is issued when the two
    results disagree beyond a relative tolerance of 1e-6; values below an
    absolute floor of 1e-12 are exempt, being indistinguishable from noise.
    """
    if not (isinstance(t, (int, float)) and math.isfinite(t) and t > 0.0):
        raise MethodError(f"time point must be finite and positive, got {t!r}")
    # Contour nodes reach into the left half-plane; the closed-form
    # transforms continue there even though the pointwise API refuses it.
    with analytic_continuation():
        if isinstance(method, Talbot):
            value = _talbot_value(evaluator, t, method.nodes)
            other = _stehfest_value(evaluator, t, 14) if cross_check else None
        elif isinstance(method, GaverStehfest):
            value = _stehfest_value(evaluator, t, method.order)
            other = _talbot_value(evaluator, t, 32) if cross_check else None
        else:
            raise MethodError(f"unknown inversion method {method!r}")
    if other is not None:
        diff = abs(value - other)
        scale = max(abs(value), abs(other))
        if diff > CROSS_CHECK_FLOOR and diff > CROSS_CHECK_RTOL * scale:
            warnings.warn(
                f"inversion methods disagree at t = {t}: {value!r} vs {other!r} "
                f"(relative {diff / scale:.3e})", AccuracyWarning, stacklevel=2)
    return value


@dataclass(frozen=True)
class Trajectory:
    """One walker's history: start state, (time, destination) events, and
    whether it ended absorbed or simply ran out the clock."""

    start: int
    events: tuple[tuple[float, int], ...]
    trapped: bool


def simulate_walk(chain: Chain, j0: int, horizon: float, seed: int,
                  walker: int = 0) -> Trajectory:
    """Sample one trajectory started at j0 over [0, horizon].

    Per visit: one uniform chooses the direction among the state's densities
    (in up, down, trap order), then the chosen family's exact sampler draws
    the dwell.  The stream is keyed by (seed, walker), so ensembles are
    reproducible walker by walker no matter how they are scheduled.  A jump
    falling beyond the horizon is discarded and ends the walk.
    """
    if not 1 <= j0 <= chain.length:
        raise IndexError(f"state {j0} outside 1..{chain.length}")
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    stream = UniformStream(seed, walker)
    t = 0.0
    state = j0
    events: list[tuple[float, int]] = []
    trapped = False
    while True:
        options = chain.state(state).present()
        if not options:
            break
        u = stream.next()
        kind, density = options[-1]  # rounding residue falls to the last option
        acc = 0.0
        for cand_kind, cand in options:
            acc += cand.weight
            if u < acc:
                kind, density = cand_kind, cand
                break
        t += density.family.sample(stream)
        if t > horizon:
            break
        if kind == TRAP_KIND:
            events.append((t, TRAP))
            trapped = True
            break
        state = state + 1 if kind == UP else state - 1
        events.append((t, state))
    return Trajectory(start=j0, events=tuple(events), trapped=trapped)


def walk_ensemble(chain: Chain, j0: int, horizon: float, seed: int,
                  n_walkers: int, first_walker: int = 0):
    """Lazily yield ``n_walkers`` independent trajectories.

    Walker w uses stream (seed, first_walker + w); re-iterating with the
    same arguments reproduces the ensemble bit for bit.
    """
    for w in range(first_walker, first_walker + n_walkers):
        yield simulate_walk(chain, j0, horizon, seed, walker=w)


@dataclass(frozen=True)
class HistogramEstimate:
    """Monte Carlo estimate on a time grid.

    ``kind`` is "occupancy" (edges are grid points, unit widths, density is a
    fraction) or "binned" (edges bound the bins, density is per unit time).
    Always: density = counts / (n_walkers * width) and stderr is the binomial
    standard error of the bin count propagated through the same scaling.
    """

    kind: str
    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    stderr: np.ndarray
    n_walkers: int

    def intervals(self) -> list[tuple[float, float]]:
        """(t_lo, t_hi) per row; degenerate pairs for occupancy grids."""
        if self.kind == "occupancy":
            return [(float(t), float(t)) for t in self.edges]
        return [(float(self.edges[b]), float(self.edges[b + 1]))
                for b in range(len(self.counts))]


def _binomial_estimate(kind: str, edges: np.ndarray, counts: np.ndarray,
                       widths: np.ndarray, n: int) -> HistogramEstimate:
    p = counts / n
    density = p / widths
    stderr = np.sqrt(p * (1.0 - p) / n) / widths
    return HistogramEstimate(kind=kind, edges=edges, counts=counts,
                             density=density, stderr=stderr, n_walkers=n)


class GreenEstimator:
    """Accumulates which walkers sit at one state at each grid time.

    Occupancy is right-continuous: at the instant of a jump the walker
    already counts at its destination.  Absorbed walkers stop counting at
    their absorption time.
    """

    def __init__(self, i: int, grid):
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("grid must be a non-empty 1-d array")
        if np.any(np.diff(grid) <= 0.0):
            raise ValueError("grid must be strictly increasing")
        self.state = i
        self.grid = grid
        self._grid_list = grid.tolist()
        self._diff = np.zeros(grid.size + 1, dtype=np.int64)
        self.n_walkers = 0

    def add(self, trajectory: Trajectory) -> None:
        self.n_walkers += 1
        i = self.state
        glist = self._grid_list
        diff = self._diff
        prev_t = 0.0
        prev_state = trajectory.start
        for t, dest in trajectory.events:
            if prev_state == i:
                lo = bisect_left(glist, prev_t)
                hi = bisect_left(glist, t)
                if hi > lo:
                    diff[lo] += 1
                    diff[hi] -= 1
            prev_t, prev_state = t, dest
        if not trajectory.trapped and prev_state == i:
            lo = bisect_left(glist, prev_t)
            diff[lo] += 1
            diff[len(glist)] -= 1

    def merge(self, other: "GreenEstimator") -> None:
        self._diff += other._diff
        self.n_walkers += other.n_walkers

    def result(self) -> HistogramEstimate:
        if self.n_walkers == 0:
            raise EmptyInput("no trajectories were accumulated")
        counts = np.cumsum(self._diff)[:-1]
        return _binomial_estimate("occupancy", self.grid, counts,
                                  np.ones_like(self.grid), self.n_walkers)


class PathPdfEstimator:
    """Histograms the arrival time of one path class.

    A walker qualifies for class n of the pair (i, j) when its
    (2n + |i - j|)-th jump exists and lands on state i; the jump time is then
    binned.  The integral of the histogram estimates the class probability
    mass inside the covered window.
    """

    def __init__(self, i: int, j: int, n: int, bins):
        edges = np.asarray(bins, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise ValueError("bins must contain at least two edges")
        if np.any(np.diff(edges) <= 0.0):
            raise ValueError("bin edges must be strictly increasing")
        if n < 0:
            raise ValueError(f"class order must be >= 0, got {n}")
        self.i, self.j, self.n = i, j, n
        self.steps = 2 * n + abs(i - j)
        self.edges = edges
        self._edges_list = edges.tolist()
        self.counts = np.zeros(edges.size - 1, dtype=np.int64)
        self.n_walkers = 0
        self.qualifying = 0

    def add(self, trajectory: Trajectory) -> None:
        self.n_walkers += 1
        m = self.steps
        if m == 0 or len(trajectory.events) < m:
            return
        t, dest = trajectory.events[m - 1]
        if dest != self.i:
            return
        self.qualifying += 1
        b = bisect_right(self._edges_list, t) - 1
        if 0 <= b < self.counts.size:
            self.counts[b] += 1

    def merge(self, other: "PathPdfEstimator") -> None:
        self.counts += other.counts
        self.n_walkers += other.n_walkers
        self.qualifying += other.qualifying

    def result(self) -> HistogramEstimate:
        if self.n_walkers == 0:
            raise EmptyInput("no trajectories were accumulated")
        if self.qualifying < 100:
            warnings.warn(
                f"only {self.qualifying} events qualified for class "
                f"(i={self.i}, j={self.j}, n={self.n}); the histogram is noisy",
                InsufficientSamples, stacklevel=2)
        return _binomial_estimate("binned", self.edges, self.counts,
                                  np.diff(self.edges), self.n_walkers)


def estimate_green(trajectories, i: int, grid) -> HistogramEstimate:
    """Fraction of walkers occupying state i at each grid time.

    All trajectories must share a start state and have been simulated with a
    horizon at least as large as the last grid point.
    """
    acc = GreenEstimator(i, grid)
    for trajectory in trajectories:
        acc.add(trajectory)
    return acc.result()


def estimate_path_pdf(trajectories, i: int, j: int, n: int, bins) -> HistogramEstimate:
    """Histogram the class-n arrival times at i for walks started at j.

    Warns with InsufficientSamples when fewer than 100 walkers qualify.
    Parity-impossible requests simply produce an all-zero histogram.
    """
    acc = PathPdfEstimator(i, j, n, bins)
    for trajectory in trajectories:
        if trajectory.start != j:
            raise ValueError(
                f"trajectory started at {trajectory.start}, estimator expects {j}")
        acc.add(trajectory)
    return acc.result()
