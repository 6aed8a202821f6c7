"""Build coalition games from networks.

Players are the non-target variables in index order; helper functions
translate between player masks (engine side) and variable masks (graph side).
"""

from __future__ import annotations

from typing import Literal

from .discrete import DiscreteBayesNet, bayes_accuracy_m, quadratic_score_m
from .engine import CharacteristicFn
from .errors import InputError
from .gaussian import CovarianceModel, LinearGaussianSem, implied_covariance, r_squared_m
from .graph import Dag, mask_members

__all__ = [
    "player_variables",
    "player_mask_to_variable_mask",
    "variable_mask_to_player_mask",
    "discrete_game",
    "gaussian_game",
    "network_game",
]

DiscreteMetric = Literal["accuracy", "quadratic"]


def player_variables(g: Dag) -> tuple[int, ...]:
    return g.non_target_variables()

def player_mask_to_variable_mask(g: Dag, player_mask: int) -> int:
    variables = player_variables(g)
    out = 0
    for k in mask_members(player_mask):
        out |= 1 << variables[k]
    return out


def variable_mask_to_player_mask(g: Dag, variable_mask: int) -> int:
    if variable_mask & (1 << g.target):
        raise InputError("the target is not a player")
    index = {v: k for k, v in enumerate(player_variables(g))}
    out = 0
    for v in mask_members(variable_mask):
        out |= 1 << index[v]
    return out


def discrete_game(
    net: DiscreteBayesNet, metric: DiscreteMetric = "accuracy"
) -> CharacteristicFn:
    """Coalition game over a discrete network.

    ``accuracy`` is the Bayes-optimal expected accuracy; ``quadratic`` is the
    expected quadratic score of the exact posterior, which is strictly
    sensitive to conditional dependence (accuracy is not: a genuinely
    dependent variable that never flips the Bayes decision adds nothing).
    """
    if metric == "accuracy":
        m = bayes_accuracy_m
    elif metric == "quadratic":
        m = quadratic_score_m
    else:
        raise InputError(f"unknown discrete metric {metric!r}")
    g = net.graph

    def evaluate(player_mask: int) -> float:
        return m(net, player_mask_to_variable_mask(g, player_mask))

    names = [g.names[v] for v in player_variables(g)]
    return CharacteristicFn(len(names), evaluate, names=names)


def gaussian_game(
    sem: LinearGaussianSem, cov: CovarianceModel | None = None
) -> CharacteristicFn:
    """Population-R² coalition game over a linear-Gaussian SEM."""
    g = sem.graph
    if cov is None:
        cov = implied_covariance(sem)

    def evaluate(player_mask: int) -> float:
        return r_squared_m(cov, g.target, player_mask_to_variable_mask(g, player_mask))

    names = [g.names[v] for v in player_variables(g)]
    return CharacteristicFn(len(names), evaluate, names=names)


def network_game(
    model: DiscreteBayesNet | LinearGaussianSem,
    metric: DiscreteMetric = "accuracy",
) -> CharacteristicFn:
    if isinstance(model, DiscreteBayesNet):
        return discrete_game(model, metric)
    if isinstance(model, LinearGaussianSem):
        return gaussian_game(model)
    raise InputError(f"unsupported model type {type(model).__name__}")
