"""Counter-based uniform random streams keyed by (seed, walker).

Each walker owns an independent stream addressed purely by integers: draw k
of walker w under seed s is a fixed function of (s, w, k).  That makes
ensembles bit-reproducible under any scheduling or chunking, because no
state is shared between walkers.

The generator is the standard 64-bit finalizer-mix construction: the stream
base is derived by hashing seed and walker through the avalanche mixer, and
successive draws hash base + k * GOLDEN.  Doubles are taken from the top 52
bits and shifted into the open interval (0, 1), so logarithms of draws are
always finite.
"""

from __future__ import annotations

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix64(z: int) -> int:
    z &= _MASK
    z ^= z >> 30
    z = (z * _MIX1) & _MASK
    z ^= z >> 27
    z = (z * _MIX2) & _MASK
    z ^= z >> 31
    return z


def stream_base(seed: int, walker: int) -> int:
    """Stream origin for one walker; distinct per (seed, walker) pair."""
    return _mix64(_mix64(seed & _MASK) ^ _mix64((walker & _MASK) + _GOLDEN))


def uniform_at(base: int, index: int) -> float:
    """Draw ``index`` of a stream, in the open interval (0, 1)."""
    v = _mix64((base + (index + 1) * _GOLDEN) & _MASK)
    return ((v >> 12) + 0.5) * (2.0 ** -52)


class UniformStream:
    """Sequential view of one walker's counter-based stream."""

    __slots__ = ("base", "index")

    def __init__(self, seed: int, walker: int = 0):
        self.base = stream_base(seed, walker)
        self.index = 0

    def next(self) -> float:
        u = uniform_at(self.base, self.index)
        self.index += 1
        return u
