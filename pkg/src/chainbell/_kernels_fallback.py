"""Numpy implementations of the hot kernels.

These are the reference semantics; the optional Cython module in
``_kernels.pyx`` must produce bit-identical results. Outcome mapping uses
plain float comparisons against cumulative thresholds so both backends agree
exactly, and the strategy scan keeps the first minimum in ascending index
order so witnesses match.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"

_SCAN_CHUNK = 1 << 22


def map_outcomes(cum: np.ndarray, pair_idx: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Map uniform draws to outcome-pair indices 0..3.

    ``cum`` has one row per setting pair holding the three cumulative
    probabilities p0, p0+p1, p0+p1+p2; the outcome index is the number of
    thresholds at or below the draw.
    """
    rows = cum[pair_idx]
    out = (u[:, None] >= rows).sum(axis=1)
    return out.astype(np.uint8)


def count_outcomes(pair_idx: np.ndarray, outcome_idx: np.ndarray, n_pairs: int) -> np.ndarray:
    """Accumulate (pair, outcome) events into an (n_pairs, 4) count table."""
    flat = pair_idx * 4 + outcome_idx
    counts = np.bincount(flat, minlength=n_pairs * 4)
    return counts.reshape(n_pairs, 4).astype(np.int64)


def lhv_scan(n: int) -> tuple[int, int]:
    """Exhaustive scan of all 4**n deterministic strategies.

    Strategy index s encodes outcomes as bits: the high n bits are the A-side
    settings, the low n bits the B side; a set bit means outcome -1. Returns
    (minimum functional value, first strategy index attaining it).
    """
    total = 1 << (2 * n)
    mask = (1 << n) - 1
    madj = (1 << (n - 1)) - 1
    best = 2 * n + 1
    best_s = 0
    for start in range(0, total, _SCAN_CHUNK):
        stop = min(start + _SCAN_CHUNK, total)
        s = np.arange(start, stop, dtype=np.uint64)
        a = s >> np.uint64(n)
        b = s & np.uint64(mask)
        closing_eq = 1 - (((a ^ (b >> np.uint64(n - 1))) & np.uint64(1)).astype(np.int64))
        vals = (
            closing_eq
            + np.bitwise_count(a ^ b).astype(np.int64)
            + np.bitwise_count((b ^ (a >> np.uint64(1))) & np.uint64(madj)).astype(np.int64)
        )
        m = int(vals.min())
        if m < best:
            best = m
            best_s = start + int(np.argmax(vals == m))
    return best, best_s
