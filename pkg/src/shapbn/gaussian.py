"""Linear-Gaussian structural equation models and the population R² game.

Every variable is a linear combination of its parents plus independent
zero-mean Gaussian noise, so the model-implied covariance is available in
closed form and the characteristic function is the population R² of the best
linear predictor; no sampling or regression fitting is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .graph import Dag, mask_members

__all__ = [
    "LinearGaussianSem",
    "CovarianceModel",
    "implied_covariance",
    "r_squared_m",
    "sample_sem",
]

CONDITION_LIMIT = 1e12
SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-9


@dataclass(frozen=True)
class LinearGaussianSem:
    """A DAG with one edge coefficient per edge and positive noise variances."""

    graph: Dag
    coefficients: dict[tuple[int, int], float]
    noise_variance: tuple[float, ...]

    def __post_init__(self):
        g = self.graph
        if set(self.coefficients) != set(g.edges):
            raise InputError("coefficients must cover exactly the graph edges")
        if len(self.noise_variance) != g.n:
            raise InputError("need one noise variance per variable")
        if any(v <= 0 for v in self.noise_variance):
            raise InputError("noise variances must be strictly positive")


@dataclass(frozen=True)
class CovarianceModel:
    """Symmetric positive-semidefinite covariance over all variables."""

    sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=float))
        s = self.sigma
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise InputError("covariance must be a square matrix")
        if np.max(np.abs(s - s.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(s))):
            raise InputError("covariance matrix is not symmetric")
        if np.min(np.linalg.eigvalsh(s)) < -PSD_TOL:
            raise InputError("covariance matrix is not positive semidefinite")

    @property
    def n(self) -> int:
        return self.sigma.shape[0]


def implied_covariance(sem: LinearGaussianSem) -> CovarianceModel:
    """Exact model-implied covariance: ``(I - B)^-1 D (I - B)^-T``."""
    n = sem.graph.n
    b = np.zeros((n, n))
    for (p, c), w in sem.coefficients.items():
        b[c, p] = w
    a = np.linalg.solve(np.eye(n) - b, np.eye(n))
    sigma = a @ np.diag(sem.noise_variance) @ a.T
    sigma = (sigma + sigma.T) / 2.0
    return CovarianceModel(sigma)


def r_squared_m(cov: CovarianceModel, target: int, s: int) -> float:
    """Population R² of the best linear predictor of ``target`` from mask ``s``."""
    if not 0 <= target < cov.n:
        raise InputError(f"target index {target} out of range")
    if s & (1 << target):
        raise InputError("the target may not be part of the predictor set")
    if s >> cov.n:
        raise InputError("predictor mask references unknown variables")
    members = list(mask_members(s))
    if not members:
        return 0.0
    sigma = cov.sigma
    sss = sigma[np.ix_(members, members)]
    sts = sigma[target, members]
    if np.linalg.cond(sss) > CONDITION_LIMIT:
        raise NumericalError(
            "predictor covariance block is numerically singular "
            f"(condition number beyond {CONDITION_LIMIT:g})"
        )
    explained = float(sts @ np.linalg.solve(sss, sts))
    return explained / float(sigma[target, target])


def sample_sem(
    sem: LinearGaussianSem, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``size`` joint samples; used to cross-check the analytic covariance."""
    g = sem.graph
    out = np.empty((size, g.n))
    for i in g.topological_order:
        x = rng.normal(0.0, np.sqrt(sem.noise_variance[i]), size=size)
        for p in g.parents(i):
            x += sem.coefficients[(p, i)] * out[:, p]
        out[:, i] = x
    return out
