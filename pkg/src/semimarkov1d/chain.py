"""Chain assembly and state-level transforms.

A chain is a row of states 1..L.  Each state owns up to three directed
waiting-time densities: up (to the right neighbor), down (to the left
neighbor), and trap (an absorbing sink private to the state).  Branch weights
at a state must sum to one: exactly one of the densities fires per visit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import TRAP, ChainSpec, TransitionSpec
from .densities import (DensityFamily, WaitingTimeDensity, WEIGHT_TOL,
                        _as_laplace_point)
from .errors import (NormalizationError, ParamError, SingularError,
                     TopologyError)

UP, DOWN = "up", "down"


@dataclass(frozen=True)
class StateDensities:
    """The directed densities owned by one state; any slot may be empty."""

    up: WaitingTimeDensity | None = None
    down: WaitingTimeDensity | None = None
    trap: WaitingTimeDensity | None = None

    def present(self) -> tuple[tuple[str, WaitingTimeDensity], ...]:
        """Densities in canonical (up, down, trap) order."""
        out = []
        if self.up is not None:
            out.append((UP, self.up))
        if self.down is not None:
            out.append((DOWN, self.down))
        if self.trap is not None:
            out.append((TRAP, self.trap))
        return tuple(out)

    @property
    def empty(self) -> bool:
        return self.up is None and self.down is None and self.trap is None


@dataclass(frozen=True)
class Chain:
    """A validated chain: length plus per-state densities (index 1..L)."""

    length: int
    states: tuple[StateDensities, ...]

    def state(self, j: int) -> StateDensities:
        if not 1 <= j <= self.length:
            raise IndexError(f"state {j} outside 1..{self.length}")
        return self.states[j - 1]

    def up(self, j: int) -> WaitingTimeDensity | None:
        return self.state(j).up

    def down(self, j: int) -> WaitingTimeDensity | None:
        return self.state(j).down

    def trap(self, j: int) -> WaitingTimeDensity | None:
        return self.state(j).trap


def build_chain(spec: ChainSpec) -> Chain:
    """Assemble and validate a Chain from a parsed specification.

    Enforces: nearest-neighbor moves only (self-loops and longer hops are
    rejected), one density per direction per state, and per-state weights
    summing to one within ``WEIGHT_TOL`` (accepted sums are renormalized
    exactly once).  A state with no densities is legal only on a one-state
    chain, where it simply holds the walker forever.
    """
    length = spec.length
    if not isinstance(length, int) or isinstance(length, bool) or length < 1:
        raise ParamError(f"chain length must be a positive integer, got {length!r}")

    slots: list[dict[str, WaitingTimeDensity]] = [{} for _ in range(length)]
    for t in spec.transitions:
        j = t.from_state
        if not 1 <= j <= length:
            raise TopologyError(f"transition source {j} outside 1..{length}")
        if t.to == TRAP:
            direction = TRAP
        else:
            if t.to == j:
                raise TopologyError(f"state {j}: self-loops are not allowed")
            if t.to == j + 1:
                direction = UP
            elif t.to == j - 1:
                direction = DOWN
            else:
                raise TopologyError(
                    f"state {j}: target {t.to} is not a nearest neighbor")
            if not 1 <= t.to <= length:
                raise TopologyError(
                    f"state {j}: target {t.to} falls off the chain 1..{length}")
        if direction in slots[j - 1]:
            raise TopologyError(f"state {j}: duplicate {direction} transition")
        slots[j - 1][direction] = WaitingTimeDensity(weight=t.weight,
                                                     family=t.density)

    states = []
    for j, slot in enumerate(slots, start=1):
        if not slot:
            if length == 1:
                states.append(StateDensities())
                continue
            raise NormalizationError(
                f"state {j}: no outgoing densities (weights sum to 0, not 1)")
        total = math.fsum(d.weight for d in slot.values())
        if abs(total - 1.0) > WEIGHT_TOL:
            raise NormalizationError(
                f"state {j}: weights sum to {total!r}, expected 1 within {WEIGHT_TOL}")
        normalized = {k: WaitingTimeDensity(weight=d.weight / total, family=d.family)
                      for k, d in slot.items()}
        states.append(StateDensities(up=normalized.get(UP),
                                     down=normalized.get(DOWN),
                                     trap=normalized.get(TRAP)))
    return Chain(length=length, states=tuple(states))


def make_chain(length: int,
               transitions: list[tuple[int, int | str, float, DensityFamily]]) -> Chain:
    """Convenience builder from (from, to, weight, family) tuples."""
    spec = ChainSpec(length=length, transitions=tuple(
        TransitionSpec(from_state=f, to=t, weight=w, density=d)
        for f, t, w, d in transitions))
    return build_chain(spec)


def survival_transform(chain: Chain, j: int, s: complex) -> complex:
    """Laplace transform of the probability that state j has not yet fired.

    Computed as the weight-blended survival transform of the state's
    densities, in forms that stay accurate down to s = 0, where the value is
    the mean dwell time.  A density-free state (one-state chain) holds the
    walker forever, giving exactly 1/s.
    """
    s = _as_laplace_point(s)
    sd = chain.state(j)
    if sd.empty:
        if s == 0:
            raise SingularError(
                f"state {j} has no densities; its survival transform diverges at s = 0")
        return 1.0 / s
    return sum(d.survival_term(s) for _, d in sd.present())


@dataclass(frozen=True)
class ReducedLattice:
    """What remains after cutting out states min(i,j)..max(i,j).

    The survivors form at most two disconnected fragments that keep their own
    densities; no transition crosses the cut.  Fragments are stored as
    inclusive state ranges of the parent chain (``None`` when empty).
    """

    chain: Chain
    left: tuple[int, int] | None
    right: tuple[int, int] | None

    @staticmethod
    def _size(fragment: tuple[int, int] | None) -> int:
        return 0 if fragment is None else fragment[1] - fragment[0] + 1

    @property
    def left_size(self) -> int:
        return self._size(self.left)

    @property
    def right_size(self) -> int:
        return self._size(self.right)

    @property
    def total_states(self) -> int:
        return self.left_size + self.right_size


def reduce_lattice(chain: Chain, i: int, j: int) -> ReducedLattice:
    """Remove states i, j and everything between them.

    The left fragment keeps states below min(i, j), the right fragment keeps
    states above max(i, j).  Empty fragments are legal; the total surviving
    state count is L - |i - j| - 1.
    """
    for state in (i, j):
        if not 1 <= state <= chain.length:
            raise IndexError(f"state {state} outside 1..{chain.length}")
    lo, hi = min(i, j), max(i, j)
    left = (1, lo - 1) if lo > 1 else None
    right = (hi + 1, chain.length) if hi < chain.length else None
    return ReducedLattice(chain=chain, left=left, right=right)
