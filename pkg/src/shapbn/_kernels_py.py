"""Pure-Python (numpy) fallback for the compiled kernels.

Used automatically when the compiled extension is unavailable, e.g. when the
package is run straight from a source checkout without building.
"""

from __future__ import annotations

import numpy as np


def backend_name() -> str:
    return "python"


def exact_shapley_from_table(
    table: np.ndarray,
    size_weights: np.ndarray,
    popcounts: np.ndarray,
    n: int,
) -> np.ndarray:
    """Per-player Shapley values from a dense 2^n table of game values."""
    table = np.asarray(table, dtype=float)
    masks = np.arange(1 << n, dtype=np.int64)
    phi = np.zeros(n)
    for i in range(n):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        phi[i] = np.sum(
            size_weights[popcounts[without]] * (table[without | bit] - table[without])
        )
    return phi


def permutation_marginals(
    table: np.ndarray, perms: np.ndarray, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-player marginal-contribution sums and sums of squares over permutations."""
    table = np.asarray(table, dtype=float)
    perms = np.asarray(perms, dtype=np.int64)
    bits = (np.int64(1) << perms).astype(np.int64)
    prefixes = np.bitwise_or.accumulate(bits, axis=1)
    values = table[prefixes]
    prev = np.empty_like(values)
    prev[:, 0] = table[0]
    prev[:, 1:] = values[:, :-1]
    deltas = values - prev
    sums = np.bincount(perms.ravel(), weights=deltas.ravel(), minlength=n)
    sumsqs = np.bincount(perms.ravel(), weights=(deltas**2).ravel(), minlength=n)
    return sums, sumsqs
