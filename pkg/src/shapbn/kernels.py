"""Kernel selection: compiled extension when built, numpy fallback otherwise."""

from __future__ import annotations

import numpy as np

try:
    from . import _kernels as _impl  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on the build
    from . import _kernels_py as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.backend_name()


def popcount_table(n: int) -> np.ndarray:
    """Popcount of every mask below 2^n, as uint8."""
    masks = np.arange(1 << n, dtype=np.int64)
    pc = np.zeros(1 << n, dtype=np.uint8)
    for i in range(n):
        pc += ((masks >> i) & 1).astype(np.uint8)
    return pc


def exact_shapley_from_table(
    table: np.ndarray, size_weights: np.ndarray, n: int
) -> np.ndarray:
    table = np.ascontiguousarray(table, dtype=np.float64)
    weights = np.ascontiguousarray(size_weights, dtype=np.float64)
    return np.asarray(
        _impl.exact_shapley_from_table(table, weights, popcount_table(n), n)
    )


def permutation_marginals(
    table: np.ndarray, perms: np.ndarray, n: int
) -> tuple[np.ndarray, np.ndarray]:
    table = np.ascontiguousarray(table, dtype=np.float64)
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    sums, sumsqs = _impl.permutation_marginals(table, perms, n)
    return np.asarray(sums), np.asarray(sumsqs)
