"""Brute-force and matrix oracles.

Everything here is deliberately independent of the closed-form machinery:
path populations are enumerated exhaustively, step products are summed
literally, and resolvents are computed by generic linear solves.  These
routines are the referees the analytic formulas are checked against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import Chain, survival_transform
from .densities import _as_laplace_point
from .errors import BudgetError, ModelError, SingularError

# Exhaustive enumeration is kept honest by refusing walks this long.
MAX_ENUM_STEPS = 24

# A linear solve whose residual implies a condition estimate above this is
# treated as singular rather than trusted.
CONDITION_LIMIT = 1e14


@dataclass(frozen=True)
class PathList:
    """All nearest-neighbor walks of a fixed step count between two states."""

    steps: int
    sequences: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)


@dataclass(frozen=True)
class TransferMatrix:
    """One-step transform matrix: entry (a, b) moves weight from b to a."""

    s: complex
    values: np.ndarray

    @property
    def dimension(self) -> int:
        return self.values.shape[0]


def enumerate_paths(length: int, i: int, j: int, steps: int) -> PathList:
    """Every walk from j to i in exactly ``steps`` nearest-neighbor moves.

    Enumeration is depth-first with exact reachability pruning (distance and
    parity), so parity-impossible requests return empty immediately.  Walks
    longer than ``MAX_ENUM_STEPS`` raise BudgetError.
    """
    for state in (i, j):
        if not 1 <= state <= length:
            raise IndexError(f"state {state} outside 1..{length}")
    if steps < 0:
        raise ValueError(f"step count must be >= 0, got {steps}")
    if steps > MAX_ENUM_STEPS:
        raise BudgetError(
            f"{steps} steps exceeds the enumeration budget of {MAX_ENUM_STEPS}")

    found: list[tuple[int, ...]] = []
    prefix = [j]

    def extend(state: int, remaining: int) -> None:
        gap = abs(i - state)
        if gap > remaining or (remaining - gap) % 2 == 1:
            return
        if remaining == 0:
            found.append(tuple(prefix))
            return
        for nxt in (state - 1, state + 1):
            if 1 <= nxt <= length:
                prefix.append(nxt)
                extend(nxt, remaining - 1)
                prefix.pop()

    extend(j, steps)
    return PathList(steps=steps, sequences=tuple(found))


def _step_transforms(chain: Chain, s: complex) -> np.ndarray:
    """Matrix S with S[a-1, b-1] = transform of the a -> b step (zero elsewhere)."""
    L = chain.length
    S = np.zeros((L, L), dtype=complex)
    for a in range(1, L + 1):
        up = chain.up(a)
        if up is not None and a + 1 <= L:
            S[a - 1, a] = up.psi_laplace(s)
        down = chain.down(a)
        if down is not None and a - 1 >= 1:
            S[a - 1, a - 2] = down.psi_laplace(s)
    return S


def path_weight_sum(chain: Chain, paths: PathList, s: complex) -> complex:
    """Literal sum over paths of the product of one-step transforms."""
    s = _as_laplace_point(s)
    if len(paths) == 0:
        return 0.0 + 0.0j
    S = _step_transforms(chain, s)
    seq = np.asarray(paths.sequences, dtype=np.intp) - 1
    if paths.steps == 0:
        return complex(len(paths))
    factors = S[seq[:, :-1], seq[:, 1:]]
    return complex(np.prod(factors, axis=1).sum())


def build_transfer_matrix(chain: Chain, s: complex) -> TransferMatrix:
    """Tridiagonal, zero-diagonal matrix of one-step transforms."""
    s = _as_laplace_point(s)
    L = chain.length
    T = np.zeros((L, L), dtype=complex)
    for b in range(1, L + 1):
        up = chain.up(b)
        if up is not None and b + 1 <= L:
            T[b, b - 1] = up.psi_laplace(s)
        down = chain.down(b)
        if down is not None and b - 1 >= 1:
            T[b - 2, b - 1] = down.psi_laplace(s)
    return TransferMatrix(s=s, values=T)


def transfer_matrix_w(chain: Chain, i: int, j: int, steps: int, s: complex) -> complex:
    """Entry (i, j) of the ``steps``-th transfer-matrix power.

    Equals the summed weight of all ``steps``-step walks from j to i; the
    matrix route has no step budget, unlike exhaustive enumeration.
    """
    for state in (i, j):
        if not 1 <= state <= chain.length:
            raise IndexError(f"state {state} outside 1..{chain.length}")
    if steps < 0:
        raise ValueError(f"step count must be >= 0, got {steps}")
    T = build_transfer_matrix(chain, s).values
    P = np.linalg.matrix_power(T, steps)
    return complex(P[i - 1, j - 1])


def _solve_checked(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Partial-pivoted solve with a residual-based condition estimate."""
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularError(f"linear system is singular: {exc}") from exc
    if not np.all(np.isfinite(x.view(float))):
        raise SingularError("linear solve produced non-finite entries")
    residual = A @ x - b
    scale = np.linalg.norm(A, np.inf) * np.linalg.norm(x, np.inf) + np.linalg.norm(b, np.inf)
    if scale > 0:
        cond_estimate = (np.linalg.norm(residual, np.inf) / scale) / np.finfo(float).eps
        if cond_estimate > CONDITION_LIMIT:
            raise SingularError(
                f"linear system effectively singular (condition estimate "
                f"{cond_estimate:.3g} > {CONDITION_LIMIT:.0e})")
    return x


def resolvent_green(chain: Chain, i: int, j: int, s: complex) -> complex:
    """Green's function via the resolvent of the transfer matrix.

    Solves (I - T(s)) x = e_j and returns the state-i survival transform
    times x_i.  This sums the whole path series at once and is the primary
    referee for the closed form.
    """
    s = _as_laplace_point(s)
    T = build_transfer_matrix(chain, s).values
    L = chain.length
    b = np.zeros(L, dtype=complex)
    b[j - 1] = 1.0
    x = _solve_checked(np.eye(L, dtype=complex) - T, b)
    return complex(survival_transform(chain, i, s) * x[i - 1])


def _uniform_exponential_rates(chain: Chain) -> list[float]:
    """Per-state exponential rate, or ModelError if the chain is not Markovian.

    Requires every density to be exponential and all densities at one state
    to share a rate; only then does drawing the direction first agree with
    competing exponential clocks.
    """
    from .densities import Exponential

    rates = []
    for j in range(1, chain.length + 1):
        state_rate = None
        for _, d in chain.state(j).present():
            if not isinstance(d.family, Exponential):
                raise ModelError(
                    f"state {j}: density family {type(d.family).__name__} is not "
                    f"exponential; no generator form exists")
            r = d.family.rate
            if state_rate is None:
                state_rate = r
            elif abs(r - state_rate) > 1e-12 * max(abs(r), abs(state_rate)):
                raise ModelError(
                    f"state {j}: mixed exponential rates {state_rate} and {r}; "
                    f"the master-equation form needs one rate per state")
        rates.append(0.0 if state_rate is None else state_rate)
    return rates


def markov_generator_green(chain: Chain, i: int, j: int, s: complex) -> complex:
    """Classical master-equation resolvent for all-exponential chains.

    Builds the generator with rate weight * rate toward each neighbor (traps
    drain probability without a destination column) and returns entry (i, j)
    of (s I - A)^{-1}.
    """
    s = _as_laplace_point(s)
    for state in (i, j):
        if not 1 <= state <= chain.length:
            raise IndexError(f"state {state} outside 1..{chain.length}")
    rates = _uniform_exponential_rates(chain)
    L = chain.length
    A = np.zeros((L, L), dtype=complex)
    for b in range(1, L + 1):
        sd = chain.state(b)
        if sd.empty:
            continue
        A[b - 1, b - 1] = -rates[b - 1]
        if sd.up is not None:
            A[b, b - 1] = sd.up.weight * rates[b - 1]
        if sd.down is not None:
            A[b - 2, b - 1] = sd.down.weight * rates[b - 1]
    e = np.zeros(L, dtype=complex)
    e[j - 1] = 1.0
    x = _solve_checked(s * np.eye(L, dtype=complex) - A, e)
    return complex(x[i - 1])
