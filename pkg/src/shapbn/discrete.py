"""Exact inference over CPT-parameterized networks and derived game values.

The joint distribution is materialized once as a dense ``n``-dimensional
array (one axis per variable) and every query afterwards is a marginalization
of that immutable table, so concurrent reads are safe.  The state-space cap
keeps the enumeration honest about its exponential cost.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapacityError, InputError, NumericalError
from .graph import Dag, d_separated, mask_members, mask_of

__all__ = [
    "Cpt",
    "DiscreteBayesNet",
    "FaithfulnessViolation",
    "joint_enumerate",
    "conditional",
    "bayes_accuracy_m",
    "quadratic_score_m",
    "conditional_independent",
    "verify_faithfulness",
]

DEFAULT_STATE_SPACE_CAP = 1 << 20
ROW_SUM_TOL = 1e-12
JOINT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table for one variable.

    ``table`` has one axis per parent (in ``parents`` order, sized by that
    parent's cardinality) plus a trailing axis over the variable's own
    states.  Every row must be a probability vector.
    """

    variable: int
    parents: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "table", np.asarray(self.table, dtype=float))
        if self.table.ndim != len(self.parents) + 1:
            raise InputError(
                f"CPT for variable {self.variable} has {self.table.ndim} axes, "
                f"expected {len(self.parents) + 1}"
            )
        if np.any(self.table < 0):
            raise InputError(f"CPT for variable {self.variable} has negative entries")
        sums = self.table.sum(axis=-1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
            raise InputError(
                f"CPT rows for variable {self.variable} do not sum to 1"
            )


@dataclass(frozen=True)
class DiscreteBayesNet:
    """A DAG plus one CPT per variable; defines the joint as the CPT product."""

    graph: Dag
    cardinalities: tuple[int, ...]
    cpts: tuple[Cpt, ...]
    state_space_cap: int = DEFAULT_STATE_SPACE_CAP

    def __post_init__(self):
        g = self.graph
        if len(self.cardinalities) != g.n or len(self.cpts) != g.n:
            raise InputError("need one cardinality and one CPT per variable")
        if any(c < 1 for c in self.cardinalities):
            raise InputError("cardinalities must be positive")
        for i, cpt in enumerate(self.cpts):
            if cpt.variable != i:
                raise InputError("CPTs must be listed in variable order")
            if tuple(sorted(cpt.parents)) != tuple(sorted(g.parents(i))):
                raise InputError(
                    f"CPT parents for {g.names[i]!r} do not match the graph"
                )
            expected = tuple(self.cardinalities[p] for p in cpt.parents) + (
                self.cardinalities[i],
            )
            if cpt.table.shape != expected:
                raise InputError(
                    f"CPT shape for {g.names[i]!r} is {cpt.table.shape}, "
                    f"expected {expected}"
                )

    @property
    def n(self) -> int:
        return self.graph.n

    def state_space_size(self) -> int:
        return math.prod(self.cardinalities)

    @cached_property
    def joint(self) -> np.ndarray:
        """Dense joint probability array, one axis per variable."""
        if self.state_space_size() > self.state_space_cap:
            raise CapacityError(
                f"state space of {self.state_space_size()} entries exceeds the "
                f"cap of {self.state_space_cap}"
            )
        n = self.n
        joint = np.ones(self.cardinalities, dtype=float)
        for cpt in self.cpts:
            axes = cpt.parents + (cpt.variable,)
            # Reorder CPT axes to ascending variable index, then broadcast
            # against the joint by inserting singleton axes elsewhere.
            order = sorted(range(len(axes)), key=lambda k: axes[k])
            reshaped = cpt.table.transpose(order)
            bshape = [1] * n
            for ax in axes:
                bshape[ax] = self.cardinalities[ax]
            joint = joint * reshaped.reshape(bshape)
        total = joint.sum()
        if abs(total - 1.0) > JOINT_SUM_TOL:
            raise InputError(f"joint distribution sums to {total}, not 1")
        return joint

    def marginal(self, keep_mask: int) -> np.ndarray:
        """Joint marginal over the variables in ``keep_mask`` (axis order by index)."""
        drop = tuple(i for i in range(self.n) if not keep_mask & (1 << i))
        return self.joint.sum(axis=drop) if drop else self.joint


def joint_enumerate(net: DiscreteBayesNet) -> dict[tuple[int, ...], float]:
    """Probability of every full assignment, omitting zero-probability ones."""
    joint = net.joint
    out: dict[tuple[int, ...], float] = {}
    for idx in itertools.product(*(range(c) for c in net.cardinalities)):
        p = float(joint[idx])
        if p > 0.0:
            out[idx] = p
    return out


def conditional(
    net: DiscreteBayesNet, target: int, given: int, given_values: dict[int, int]
) -> np.ndarray:
    """Exact ``p(target | given = given_values)`` as a probability vector."""
    net.graph._check_var(target)
    if given & (1 << target):
        raise InputError("cannot condition the queried variable on itself")
    if set(mask_members(given)) != set(given_values):
        raise InputError("given_values must assign exactly the masked variables")
    marg = net.marginal(given | (1 << target))
    keep = sorted(set(mask_members(given)) | {target})
    idx = tuple(
        given_values[v] if v != target else slice(None) for v in keep
    )
    vec = np.asarray(marg[idx], dtype=float)
    total = vec.sum()
    if total <= 0.0:
        raise NumericalError("conditioning on a zero-probability event")
    return vec / total


def bayes_accuracy_m(net: DiscreteBayesNet, s: int) -> float:
    """Expected accuracy of the Bayes-optimal classifier predicting T from S.

    ``m(S) = sum_s P(S=s) max_t P(T=t | S=s)``; for the empty set this is the
    majority-class probability.  Zero-probability strata contribute nothing.
    Ties at the max leave the sum unchanged, so no tie-break rule is needed.
    """
    t = net.graph.target
    if s & (1 << t):
        raise InputError("the target may not be part of the predictor set")
    marg = net.marginal(s | (1 << t))
    keep = sorted(set(mask_members(s)) | {t})
    t_axis = keep.index(t)
    return float(marg.max(axis=t_axis).sum())


def quadratic_score_m(net: DiscreteBayesNet, s: int) -> float:
    """Expected quadratic (Brier-style) score of the exact posterior of T.

    ``m(S) = sum_s P(S=s) sum_t P(T=t | S=s)^2``.  Unlike accuracy, this is
    maximized only by the true posterior and is strictly sensitive to any
    conditional dependence: adding a variable leaves m unchanged iff the
    variable is conditionally independent of T given S.
    """
    t = net.graph.target
    if s & (1 << t):
        raise InputError("the target may not be part of the predictor set")
    marg = net.marginal(s | (1 << t))
    keep = sorted(set(mask_members(s)) | {t})
    t_axis = keep.index(t)
    totals = marg.sum(axis=t_axis)
    sq = (marg**2).sum(axis=t_axis)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(totals > 0, sq / np.where(totals > 0, totals, 1.0), 0.0)
    return float(ratio.sum())


def conditional_independent(
    net: DiscreteBayesNet, x: int, t: int, z: int, tol: float = 1e-9
) -> bool:
    """Whether ``p(t | x, z) = p(t | z)`` for every positive-probability stratum."""
    net.graph._check_var(x)
    net.graph._check_var(t)
    if x == t:
        raise InputError("independence query requires two distinct variables")
    if z & (1 << x) or z & (1 << t):
        raise InputError("conditioning set may not contain the tested variables")
    keep = sorted(set(mask_members(z)) | {x, t})
    marg = net.marginal(z | (1 << x) | (1 << t))
    x_axis = keep.index(x)
    t_axis = keep.index(t)
    z_axes = tuple(k for k in range(len(keep)) if k not in (x_axis, t_axis))

    # p(t | z): marginalize x out first.
    pz_t = marg.sum(axis=x_axis, keepdims=True)
    pz = pz_t.sum(axis=t_axis, keepdims=True)
    pxz = marg.sum(axis=t_axis, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond_t_given_z = np.where(pz > 0, pz_t / np.where(pz > 0, pz, 1.0), 0.0)
        cond_t_given_xz = np.where(pxz > 0, marg / np.where(pxz > 0, pxz, 1.0), 0.0)
    diff = np.abs(cond_t_given_xz - cond_t_given_z)
    # Only strata with positive p(x, z) count.
    return bool(np.all(diff[np.broadcast_to(pxz > 0, diff.shape)] <= tol))


@dataclass(frozen=True)
class FaithfulnessViolation:
    x: int
    y: int
    z: int
    direction: str  # "independent_but_d_connected" | "dependent_but_d_separated"


def verify_faithfulness(
    net: DiscreteBayesNet,
    tol: float = 1e-9,
    max_vars: int = 7,
    pairs: str = "target",
) -> list[FaithfulnessViolation]:
    """Exhaustively compare d-separation with conditional independence.

    With ``pairs="target"`` (the default) every non-target variable is tested
    against the target under every conditioning subset; this is the scope the
    predictive game depends on.  ``pairs="all"`` additionally tests pairs not
    involving the target, which is stricter: parameterizations can cancel
    exactly on such a pair while remaining faithful in every target-relevant
    independence.
    """
    n = net.n
    if n > max_vars:
        raise CapacityError(
            f"faithfulness verification is exhaustive and capped at {max_vars} "
            f"variables; got {n}"
        )
    if pairs not in ("target", "all"):
        raise InputError("pairs must be 'target' or 'all'")
    g = net.graph
    violations: list[FaithfulnessViolation] = []
    for x in range(n):
        for y in range(x + 1, n):
            if pairs == "target" and g.target not in (x, y):
                continue
            rest = [v for v in range(n) if v not in (x, y)]
            for r in range(len(rest) + 1):
                for zs in itertools.combinations(rest, r):
                    z = mask_of(zs)
                    dsep = d_separated(g, x, y, z)
                    ci = conditional_independent(net, x, y, z, tol)
                    if dsep and not ci:
                        violations.append(
                            FaithfulnessViolation(x, y, z, "dependent_but_d_separated")
                        )
                    elif ci and not dsep:
                        violations.append(
                            FaithfulnessViolation(x, y, z, "independent_but_d_connected")
                        )
    return violations
