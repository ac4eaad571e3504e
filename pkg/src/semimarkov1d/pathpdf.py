"""Path probability densities between the edge states, order by order.

A walk from one edge of the chain to the other takes L - 1 + 2n steps, where
n counts its back-and-forth excursions.  The Laplace transform of the density
of each such path class satisfies a short linear recursion whose coefficients
are the alternating non-adjacent-bond sums; an explicit combinatorial formula
and an ordinary generating function provide two independent evaluations of
the same table.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .chain import Chain
from .densities import _as_laplace_point
from .errors import (DomainError, FallbackRequired, NonConvergence,
                     ParamError, SingularError)
from .laplace import _h_all, arrival_transform, bond_factors, gamma_direct
from .oracle import build_transfer_matrix

# Largest path order the explicit formula accepts; binomials stay exact there.
MAX_EXPLICIT_ORDER = 64

# Coefficient magnitudes below this fraction of the largest make the explicit
# formula's ratios meaningless while higher orders still matter.
RATIO_GUARD = 1e-13


@dataclass(frozen=True)
class TruncationPolicy:
    """Stop rule for order-by-order summation.

    The series stops once ``consecutive_small`` successive terms each stay
    below ``rel_tol`` times the magnitude of the running sum; hitting
    ``max_terms`` first raises NonConvergence.
    """

    rel_tol: float = 1e-10
    consecutive_small: int = 3
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ParamError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.consecutive_small < 1:
            raise ParamError("consecutive_small must be >= 1")
        if self.max_terms < 1:
            raise ParamError("max_terms must be >= 1")


@dataclass(frozen=True)
class PathPdfTable:
    """Edge-to-edge path-class transforms at one Laplace point.

    ``values[n]`` is the transform of the density over paths that start at
    state L, end at state 1, and take gamma + 2n steps.
    """

    s: complex
    gamma: int
    values: tuple[complex, ...]

    @property
    def max_order(self) -> int:
        return len(self.values) - 1


def _edge_orders(chain: Chain, direct: complex, s: complex):
    """Yield path-class transforms n = 0, 1, 2, ... for one travel direction.

    The recursion window only ever needs the last floor(L/2) values; the
    coefficients are shared by both directions, only the direct-path prefix
    differs.
    """
    depth = chain.length // 2
    h = _h_all(bond_factors(chain, s).values, depth)
    window: list[complex] = []
    n = 0
    while True:
        value = direct if n == 0 else 0.0 + 0.0j
        sign = 1.0
        for order in range(1, min(depth, n) + 1):
            value += sign * h[order] * window[-order]
            sign = -sign
        yield value
        window.append(value)
        if len(window) > depth:
            window.pop(0)
        n += 1


def path_pdf_recursive(chain: Chain, n_max: int, s: complex) -> PathPdfTable:
    """Tabulate the edge-to-edge path classes 0..n_max by the recursion."""
    s = _as_laplace_point(s)
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    direct = gamma_direct(chain, 1, chain.length, s)
    gen = _edge_orders(chain, direct, s)
    values = tuple(next(gen) for _ in range(n_max + 1))
    return PathPdfTable(s=s, gamma=chain.length - 1, values=values)


def lower_bound_a(i: int, n: int, length: int, k_prefix: int = 0) -> int:
    """Smallest admissible summation index at nesting level i.

    ``k_prefix`` is the sum of the indices already fixed at outer levels.
    The bound is the feasibility floor for distributing the remaining order
    over the remaining levels, clamped at zero so it never goes negative.
    """
    depth = length // 2
    if not 0 <= i <= depth - 1:
        raise IndexError(f"nesting level {i} outside 0..{depth - 1} "
                         f"for length {length}")
    if i == 0:
        numerator, denominator = n + depth - 1, depth
    else:
        numerator, denominator = n - k_prefix + depth - 1 - i, depth - i
    if numerator < 0:
        return 0
    return numerator // denominator


def path_pdf_explicit(chain: Chain, n: int, s: complex) -> complex:
    """Edge-to-edge path-class transform by the closed combinatorial formula.

    Expands the order-n coefficient of the generating function as nested
    binomial-weighted sums over powers of the bond-sum ratios.  Binomials are
    exact integers; orders above ``MAX_EXPLICIT_ORDER`` are refused.  When a
    low-order coefficient is negligible while a higher one is not, the ratios
    are meaningless and FallbackRequired points the caller at the recursion.
    """
    s = _as_laplace_point(s)
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    if n > MAX_EXPLICIT_ORDER:
        raise OverflowError(
            f"order {n} exceeds {MAX_EXPLICIT_ORDER}; binomial terms would not "
            f"stay exact")
    length = chain.length
    depth = length // 2
    direct = gamma_direct(chain, 1, length, s)
    if depth == 0:
        return direct if n == 0 else 0.0 + 0.0j
    h = _h_all(bond_factors(chain, s).values, depth)[1:]  # h[i-1] is order i
    largest = max(abs(v) for v in h)
    if largest == 0.0:
        return direct if n == 0 else 0.0 + 0.0j
    for order in range(1, depth):
        if abs(h[order - 1]) < RATIO_GUARD * largest and any(
                abs(h[higher]) >= RATIO_GUARD * largest
                for higher in range(order, depth)):
            raise FallbackRequired(
                f"bond-sum of order {order} is negligible while a higher order "
                f"is not; use the recursion at s = {s}")
    if depth == 1:
        return direct * h[0] ** n

    ratios = [-h[i] / h[i - 1] for i in range(1, depth)]

    def inner(level: int, k_prev: int, remaining: int) -> complex:
        if level == depth:
            return 1.0 + 0.0j
        low = lower_bound_a(level, n, length, k_prefix=n - remaining)
        total = 0.0 + 0.0j
        for k in range(low, min(remaining, k_prev) + 1):
            total += (comb(k_prev, k) * ratios[level - 1] ** k
                      * inner(level + 1, k, remaining - k))
        return total

    acc = 0.0 + 0.0j
    for k0 in range(lower_bound_a(0, n, length), n + 1):
        acc += h[0] ** k0 * inner(1, k0, n - k0)
    return direct * acc


def generating_function(chain: Chain, z: complex, s: complex) -> complex:
    """Ordinary generating function of the edge-to-edge path classes.

    At z = 0 it returns the direct-path transform; at z = 1 it resums the
    whole family into the arrival transform.  Zeros of the denominator raise
    SingularError.
    """
    s = _as_laplace_point(s)
    z = complex(z)
    depth = chain.length // 2
    h = _h_all(bond_factors(chain, s).values, depth)
    denom = 1.0 + 0.0j
    sign = -1.0
    zpow = 1.0 + 0.0j
    for order in range(1, depth + 1):
        zpow *= z
        denom += sign * h[order] * zpow
        sign = -sign
    if abs(denom) < 1e-14:
        raise SingularError(
            f"generating function pole: denominator magnitude {abs(denom):.3e} "
            f"at z = {z}")
    return gamma_direct(chain, 1, chain.length, s) / denom


def series_arrival(chain: Chain, i: int, j: int, s: complex,
                   policy: TruncationPolicy = TruncationPolicy()
                   ) -> tuple[complex, int]:
    """Sum the path classes from j to i until the truncation rule fires.

    Edge-to-edge pairs run on the recursion; any other pair falls back to
    transfer-matrix powers, which cover interior states exactly.  Returns the
    partial sum and the number of terms it used.  The sum converges to the
    arrival transform for Re(s) > 0.
    """
    s = _as_laplace_point(s)
    if s.real <= 0.0:
        raise DomainError(f"series needs Re(s) > 0, got {s}")
    for state in (i, j):
        if not 1 <= state <= chain.length:
            raise IndexError(f"state {state} outside 1..{chain.length}")

    if {i, j} == {1, chain.length}:
        orders = _edge_orders(chain, gamma_direct(chain, i, j, s), s)

        def next_term(n: int) -> complex:
            return next(orders)
    else:
        T = build_transfer_matrix(chain, s).values
        power = np.linalg.matrix_power(T, abs(i - j))
        double = T @ T

        def next_term(n: int) -> complex:
            nonlocal power
            value = complex(power[i - 1, j - 1])
            power = power @ double
            return value

    total = 0.0 + 0.0j
    small_run = 0
    last_mag = None
    last_ratio = None
    for n in range(policy.max_terms):
        term = next_term(n)
        total += term
        mag = abs(term)
        if last_mag is not None and last_mag > 0.0:
            last_ratio = mag / last_mag
        last_mag = mag
        if mag <= policy.rel_tol * abs(total):
            small_run += 1
            if small_run >= policy.consecutive_small:
                return total, n + 1
        else:
            small_run = 0
    raise NonConvergence(
        f"series did not settle within {policy.max_terms} terms at s = {s} "
        f"(last term ratio {last_ratio})",
        last_ratio=last_ratio, terms=policy.max_terms)
