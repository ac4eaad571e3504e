"""Cross-verification suite: closed forms against oracles on one chain.

Each check pits two independent evaluation routes against each other and
reports the worst relative deviation over a deterministic sweep of Laplace
points.  The suite is what the command-line ``verify`` subcommand runs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chain import Chain, survival_transform
from .densities import Exponential
from .errors import FallbackRequired, SemiMarkovError
from .laplace import (HAlgorithm, arrival_transform, green, h_coeff, phi,
                      phi_by_recurrence)
from .oracle import (markov_generator_green, resolvent_green,
                     transfer_matrix_w)
from .pathpdf import (TruncationPolicy, path_pdf_explicit, path_pdf_recursive,
                      series_arrival)

# Deterministic default sweep; all points sit safely inside the half-plane
# where every series route converges.
DEFAULT_S_POINTS = (
    complex(0.7, 0.0),
    complex(1.3, 0.9),
    complex(2.5, -1.2),
    complex(4.0, 0.3),
    complex(0.9, -2.0),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    max_deviation: float
    status: str  # "pass" | "fail" | "skip"
    points: int
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"


def _rel_dev(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def _is_uniform_exponential(chain: Chain) -> bool:
    for j in range(1, chain.length + 1):
        rate = None
        for _, d in chain.state(j).present():
            if not isinstance(d.family, Exponential):
                return False
            if rate is None:
                rate = d.family.rate
            elif abs(d.family.rate - rate) > 1e-12 * max(rate, d.family.rate):
                return False
    return True


def _result(name: str, tol: float, dev: float, points: int, note: str = "") -> CheckResult:
    status = "pass" if dev <= tol else "fail"
    return CheckResult(name=name, tolerance=tol, max_deviation=dev,
                       status=status, points=points, note=note)


def run_verification(chain: Chain, s_points=DEFAULT_S_POINTS,
                     n_max: int = 4) -> list[CheckResult]:
    """Run every applicable cross-check; returns one record per check."""
    checks: list[CheckResult] = []
    L = chain.length
    depth = L // 2

    dev, points = 0.0, 0
    for s in s_points:
        for order in range(1, depth + 1):
            a = h_coeff(chain, order, s, HAlgorithm.NESTED_SUM)
            b = h_coeff(chain, order, s, HAlgorithm.DYNAMIC_PROGRAM)
            dev = max(dev, _rel_dev(a, b))
            points += 1
    note = "" if depth else "no bond sums on this chain"
    checks.append(_result("bond-sums nested vs dynamic", 1e-13, dev, points, note))

    dev = 0.0
    for s in s_points:
        dev = max(dev, _rel_dev(phi(chain, s), phi_by_recurrence(chain, s)))
    checks.append(_result("denominator sum vs recurrence", 1e-12, dev, len(s_points)))

    dev, points = 0.0, 0
    for s in s_points:
        for j in range(1, L + 1):
            for i in range(1, L + 1):
                dev = max(dev, _rel_dev(green(chain, i, j, s),
                                        resolvent_green(chain, i, j, s)))
                points += 1
    checks.append(_result("green vs resolvent", 1e-10, dev, points))

    if _is_uniform_exponential(chain):
        dev, points = 0.0, 0
        for s in s_points:
            for j in range(1, L + 1):
                for i in range(1, L + 1):
                    dev = max(dev, _rel_dev(green(chain, i, j, s),
                                            markov_generator_green(chain, i, j, s)))
                    points += 1
        checks.append(_result("green vs markov generator", 1e-10, dev, points))
    else:
        checks.append(CheckResult(
            name="green vs markov generator", tolerance=1e-10,
            max_deviation=0.0, status="skip", points=0,
            note="chain is not uniformly exponential"))

    dev, points, fallbacks = 0.0, 0, 0
    gamma = L - 1
    for s in s_points:
        table = path_pdf_recursive(chain, n_max, s)
        for n in range(n_max + 1):
            matrix = transfer_matrix_w(chain, 1, L, 2 * n + gamma, s)
            dev = max(dev, _rel_dev(table.values[n], matrix))
            points += 1
            try:
                explicit = path_pdf_explicit(chain, n, s)
            except FallbackRequired:
                fallbacks += 1
                continue
            dev = max(dev, _rel_dev(table.values[n], explicit))
            points += 1
    note = f"{fallbacks} explicit points deferred to recursion" if fallbacks else ""
    checks.append(_result("path classes recursive vs explicit vs matrix",
                          1e-10, dev, points, note))

    dev, points = 0.0, 0
    note = ""
    policy = TruncationPolicy()
    try:
        for s in s_points:
            if s.real < 0.5:
                continue
            for (i, j) in ((1, L), (L, 1)):
                total, _ = series_arrival(chain, i, j, s, policy)
                dev = max(dev, _rel_dev(total, arrival_transform(chain, i, j, s)))
                points += 1
    except SemiMarkovError as exc:
        dev, note = float("inf"), f"{type(exc).__name__}: {exc}"
    checks.append(_result("class series vs arrival transform", 1e-8, dev,
                          points, note))

    dev, points = 0.0, 0
    for s in s_points:
        target = 1.0 / s
        for j in range(1, L + 1):
            total = 0.0 + 0.0j
            for i in range(1, L + 1):
                total += green(chain, i, j, s)
                trap = chain.trap(i)
                if trap is not None:
                    total += (trap.psi_laplace(s)
                              * arrival_transform(chain, i, j, s) / s)
            dev = max(dev, _rel_dev(total, target))
            points += 1
    checks.append(_result("probability conservation", 1e-10, dev, points))

    return checks
