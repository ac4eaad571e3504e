"""Closed-form Laplace-domain machinery for chain Green's functions.

The central objects are the bond factors (round trips across one bond), the
alternating non-adjacent-bond sums built from them, and the denominator
polynomial whose ratio across lattice reduction turns a direct-path transform
into the full Green's function.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .chain import Chain, ReducedLattice, reduce_lattice, survival_transform
from .densities import _as_laplace_point
from .errors import OrderError, SingularError

# |denominator| below this is treated as a pole (its leading term is 1).
PHI_SINGULAR_TOL = 1e-14


class HAlgorithm(enum.Enum):
    """Evaluation route for the non-adjacent-bond sums."""

    NESTED_SUM = "nested-sum"
    DYNAMIC_PROGRAM = "dynamic-program"


@dataclass(frozen=True)
class BondFactors:
    """Round-trip transforms across each bond, ordered left to right.

    Entry k (1-based bond between states k and k+1) multiplies the up
    transform out of state k with the down transform out of state k+1; a
    missing direction makes the bond factor zero.
    """

    values: tuple[complex, ...]

    def __len__(self) -> int:
        return len(self.values)


def bond_factor(chain: Chain, k: int, s: complex) -> complex:
    """Round-trip transform across bond k (states k and k+1)."""
    s = _as_laplace_point(s)
    if not 1 <= k <= chain.length - 1:
        raise IndexError(f"bond {k} outside 1..{chain.length - 1}")
    up = chain.up(k)
    down = chain.down(k + 1)
    if up is None or down is None:
        return 0.0 + 0.0j
    return up.psi_laplace(s) * down.psi_laplace(s)


def bond_factors(chain: Chain, s: complex) -> BondFactors:
    """All bond factors of the chain at one Laplace point."""
    s = _as_laplace_point(s)
    return BondFactors(values=tuple(
        bond_factor(chain, k, s) for k in range(1, chain.length)))


def _h_nested(f: tuple[complex, ...], order: int, length: int) -> complex:
    # Literal nested sums: bond indices strictly increase by at least 2, and
    # each level leaves room for the levels still to come.
    def level(depth: int, prev: int) -> complex:
        if depth > order:
            return 1.0 + 0.0j
        upper = length - 1 - 2 * (order - depth)
        total = 0.0 + 0.0j
        for k in range(prev + 2, upper + 1):
            total += f[k - 1] * level(depth + 1, k)
        return total

    return level(1, -1)


def _h_all(f: tuple[complex, ...], max_order: int) -> list[complex]:
    """Sums over all pairwise non-adjacent bond subsets of sizes 0..max_order.

    One pass over the bonds: a subset of bonds within the first m either
    skips bond m or uses it and must skip bond m-1.
    """
    prev2 = [1.0 + 0.0j] + [0.0 + 0.0j] * max_order
    prev1 = list(prev2)
    for m, fm in enumerate(f, start=1):
        cur = list(prev1)
        for c in range(1, max_order + 1):
            cur[c] = prev1[c] + fm * prev2[c - 1]
        prev2, prev1 = prev1, cur
    return prev1


def h_coeff(chain: Chain, order: int, s: complex,
            algorithm: HAlgorithm = HAlgorithm.DYNAMIC_PROGRAM) -> complex:
    """Sum over all selections of ``order`` pairwise non-adjacent bonds.

    Each selection contributes the product of its bond factors.  Two
    independent routes are kept on purpose: the literal nested summation and
    a single-pass recurrence; they must agree to near machine precision.
    """
    s = _as_laplace_point(s)
    max_order = chain.length // 2
    if not 1 <= order <= max_order:
        raise OrderError(
            f"order {order} outside 1..{max_order} for length {chain.length}")
    f = bond_factors(chain, s).values
    if algorithm is HAlgorithm.NESTED_SUM:
        return _h_nested(f, order, chain.length)
    if algorithm is HAlgorithm.DYNAMIC_PROGRAM:
        return _h_all(f, order)[order]
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _phi_from_factors(f: tuple[complex, ...]) -> complex:
    # Three-term recurrence over bonds; identical to the alternating sum.
    phi_prev2 = 1.0 + 0.0j  # empty segment
    phi_prev1 = 1.0 + 0.0j  # one state, no bonds
    for fm in f:
        phi_prev2, phi_prev1 = phi_prev1, phi_prev1 - fm * phi_prev2
    return phi_prev1


def phi(chain: Chain, s: complex) -> complex:
    """Denominator polynomial: alternating sum of the non-adjacent-bond sums.

    A one-state chain (and an empty fragment) gives exactly 1.
    """
    s = _as_laplace_point(s)
    f = bond_factors(chain, s).values
    h = _h_all(f, chain.length // 2)
    total = 1.0 + 0.0j
    sign = -1.0
    for order in range(1, chain.length // 2 + 1):
        total += sign * h[order]
        sign = -sign
    return total


def phi_by_recurrence(chain: Chain, s: complex) -> complex:
    """Same polynomial through the three-term recurrence (cross-check route)."""
    s = _as_laplace_point(s)
    return _phi_from_factors(bond_factors(chain, s).values)


def phi_reduced(reduction: ReducedLattice, s: complex) -> complex:
    """Denominator polynomial of a reduced lattice.

    The two surviving fragments are disconnected, so their polynomials
    multiply; fragments with fewer than two states contribute 1.
    """
    s = _as_laplace_point(s)
    chain = reduction.chain
    result = 1.0 + 0.0j
    for fragment in (reduction.left, reduction.right):
        if fragment is None:
            continue
        lo, hi = fragment
        if hi - lo + 1 < 2:
            continue
        f = tuple(bond_factor(chain, k, s) for k in range(lo, hi))
        result *= _phi_from_factors(f)
    return result


def gamma_direct(chain: Chain, i: int, j: int, s: complex) -> complex:
    """Transform of the unique direct path from j to i (1 when i = j).

    Product of the directed one-step transforms along the way; a missing
    transition makes the whole product zero.
    """
    s = _as_laplace_point(s)
    for state in (i, j):
        if not 1 <= state <= chain.length:
            raise IndexError(f"state {state} outside 1..{chain.length}")
    result = 1.0 + 0.0j
    if i > j:
        for k in range(j, i):
            up = chain.up(k)
            if up is None:
                return 0.0 + 0.0j
            result *= up.psi_laplace(s)
    else:
        for k in range(j, i, -1):
            down = chain.down(k)
            if down is None:
                return 0.0 + 0.0j
            result *= down.psi_laplace(s)
    return result


def arrival_transform(chain: Chain, i: int, j: int, s: complex) -> complex:
    """Transform of the arrival-time density at i for a walk started at j.

    Direct-path transform times the ratio of the reduced-lattice polynomial
    to the full one; the ratio resums every excursion the walk can take.
    """
    s = _as_laplace_point(s)
    denom = phi_by_recurrence(chain, s)
    if abs(denom) < PHI_SINGULAR_TOL:
        raise SingularError(
            f"denominator polynomial magnitude {abs(denom):.3e} at s = {s}; "
            f"pole reached")
    numer = phi_reduced(reduce_lattice(chain, i, j), s)
    return gamma_direct(chain, i, j, s) * numer / denom


def green(chain: Chain, i: int, j: int, s: complex) -> complex:
    """Laplace-domain occupation density of state i for a walk started at j.

    Arrival transform at i times the survival transform of i.  Poles of the
    denominator polynomial (for example s = 0 on a trap-free chain) raise
    SingularError rather than returning overflow.
    """
    return arrival_transform(chain, i, j, s) * survival_transform(chain, i, s)
