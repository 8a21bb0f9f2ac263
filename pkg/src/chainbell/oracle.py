"""Exhaustive search over deterministic local strategies.

Every strategy assigns one fixed outcome to each of the 2N settings, so each
functional term is 0 or 1 and the value is an integer. Walking the cycle, the
2N-1 adjacent equalities force the closing pair to agree, so no assignment
scores below 1; the scan verifies this exactly and returns a witness.

Strategy index encoding (shared with both kernel backends): the high N bits
are the A-side outcomes, the low N bits the B side, bit i belongs to setting
i, and a set bit means outcome -1.
"""

from __future__ import annotations

from typing import Iterator

from ._backend import lhv_scan
from .correlations import ChainConfig, DeterministicLocalModel, LocalStrategy
from .errors import CapacityError, InputError
from .functional import i_functional, i_quantum_closed_form

#: 4**12 = 16.7M strategies keeps an exhaustive scan under a minute.
MAX_ENUM_N = 12


def _check_capacity(n: int) -> None:
    if not isinstance(n, int) or n < 2:
        raise InputError(f"chain order must be an integer >= 2, got {n}")
    if n > MAX_ENUM_N:
        raise CapacityError(
            f"exhaustive enumeration capped at n = {MAX_ENUM_N} (got {n}); "
            "the cyclic parity argument gives the bound analytically beyond that")


def strategy_from_index(n: int, index: int) -> LocalStrategy:
    """Decode a strategy index into explicit outcome tuples."""
    a_bits = index >> n
    b_bits = index & ((1 << n) - 1)
    a = tuple(-1 if (a_bits >> i) & 1 else 1 for i in range(n))
    b = tuple(-1 if (b_bits >> i) & 1 else 1 for i in range(n))
    return LocalStrategy(a, b)


def enumerate_strategies(n: int) -> Iterator[LocalStrategy]:
    """Yield all 4**n deterministic strategies exactly once, in index order."""
    _check_capacity(n)
    for index in range(1 << (2 * n)):
        yield strategy_from_index(n, index)


def lhv_minimum(n: int, theta: float = 0.0) -> tuple[float, LocalStrategy]:
    """Minimum functional value over all deterministic strategies, with witness.

    ``theta`` is accepted for interface uniformity only; deterministic terms
    are 0 or 1 regardless of the phase.
    """
    _check_capacity(n)
    best, best_index = lhv_scan(n)
    return float(best), strategy_from_index(n, best_index)


def violation_margin(n: int, theta: float, v: float) -> float:
    """Local bound minus the quantum closed form; positive means a violation."""
    min_i, _ = lhv_minimum(n, theta)
    return min_i - i_quantum_closed_form(n, theta, v)


def strategy_i_value(strategy: LocalStrategy, n: int, theta: float = 0.0) -> float:
    """Functional value of one strategy via the generic term-by-term path."""
    config = ChainConfig(n, theta)
    return i_functional(DeterministicLocalModel(strategy), config).i_value
