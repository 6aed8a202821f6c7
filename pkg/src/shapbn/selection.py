"""Shapley-based feature-selection strategies and their comparison.

All strategies operate on the population-level game, so "removing" a variable
simply means evaluating the characteristic function without it; no imputation
is involved.  The Markov-boundary oracle is the structural reference: on a
faithful network it is the minimal optimal predictor set, and the comparison
report measures how far the Shapley heuristics fall from it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import CharacteristicFn, exact_shapley
from .errors import InputError
from .games import variable_mask_to_player_mask
from .graph import Dag, markov_boundary, mask_members, mask_of

__all__ = [
    "SelectionResult",
    "TraceStep",
    "select_top_k",
    "select_rfe",
    "select_markov_boundary",
    "StrategyComparison",
    "compare_strategies",
]


@dataclass(frozen=True)
class TraceStep:
    step: int
    variable: str
    action: str  # "kept" | "eliminated"
    phi: dict[str, float]


@dataclass(frozen=True)
class SelectionResult:
    strategy: str  # "topk" | "rfe" | "mb"
    selected: int  # player mask
    names: tuple[str, ...]
    performance: float
    trace: tuple[TraceStep, ...] = ()

    def selected_names(self) -> list[str]:
        return [self.names[i] for i in mask_members(self.selected)]

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "selected": self.selected_names(),
            "performance": self.performance,
            "trace": [
                {
                    "step": t.step,
                    "variable": t.variable,
                    "action": t.action,
                    "phi": t.phi,
                }
                for t in self.trace
            ],
        }


def select_top_k(f: CharacteristicFn, k: int) -> SelectionResult:
    """The k players with the largest exact Shapley value; ties by index."""
    if not 1 <= k <= f.n_players:
        raise InputError(f"k must be in 1..{f.n_players}, got {k}")
    report = exact_shapley(f)
    chosen = report.ranking()[:k]
    mask = mask_of(chosen)
    phi = {name: float(v) for name, v in zip(f.names, report.values)}
    trace = tuple(
        TraceStep(step=s, variable=f.names[i], action="kept", phi=phi)
        for s, i in enumerate(chosen)
    )
    return SelectionResult("topk", mask, f.names, f.value(mask), trace)


def select_rfe(f: CharacteristicFn, stop_k: int) -> SelectionResult:
    """Recursive elimination: drop the lowest-Shapley player, then recompute.

    After each elimination the game is restricted to the survivors and the
    Shapley values are recomputed from scratch; ties are broken by smallest
    player index.
    """
    if not 1 <= stop_k <= f.n_players:
        raise InputError(f"stop_k must be in 1..{f.n_players}, got {stop_k}")
    survivors = list(range(f.n_players))
    trace: list[TraceStep] = []
    step = 0
    while len(survivors) > stop_k:
        sub = f.restrict(survivors)
        report = exact_shapley(sub)
        worst_local = min(
            range(len(survivors)), key=lambda i: (report.values[i], survivors[i])
        )
        eliminated = survivors[worst_local]
        phi = {sub.names[i]: float(report.values[i]) for i in range(len(survivors))}
        trace.append(
            TraceStep(step=step, variable=f.names[eliminated], action="eliminated", phi=phi)
        )
        survivors.pop(worst_local)
        step += 1
    mask = mask_of(survivors)
    return SelectionResult("rfe", mask, f.names, f.value(mask), tuple(trace))


def select_markov_boundary(g: Dag, f: CharacteristicFn) -> SelectionResult:
    """Structural oracle: select exactly the Markov boundary of the target."""
    if f.n_players != g.n - 1:
        raise InputError("game players do not match the graph's non-target variables")
    mask = variable_mask_to_player_mask(g, markov_boundary(g))
    return SelectionResult("mb", mask, f.names, f.value(mask))


@dataclass(frozen=True)
class StrategyComparison:
    strategy: str
    performance: float
    oracle_performance: float
    gap: float
    optimal: bool  # selected contains the whole Markov boundary
    minimal_optimal: bool  # selected equals the Markov boundary
    missed_boundary: tuple[str, ...]
    redundant_extras: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "performance": self.performance,
            "oracle_performance": self.oracle_performance,
            "gap": self.gap,
            "optimal": self.optimal,
            "minimal_optimal": self.minimal_optimal,
            "missed_boundary": list(self.missed_boundary),
            "redundant_extras": list(self.redundant_extras),
        }


def compare_strategies(
    results: list[SelectionResult], f: CharacteristicFn, g: Dag
) -> list[StrategyComparison]:
    """Measure each strategy against the Markov-boundary oracle."""
    mb_players = variable_mask_to_player_mask(g, markov_boundary(g))
    oracle_perf = f.value(mb_players)
    out = []
    for r in results:
        missed = mb_players & ~r.selected
        extras = r.selected & ~mb_players
        out.append(
            StrategyComparison(
                strategy=r.strategy,
                performance=r.performance,
                oracle_performance=oracle_perf,
                gap=oracle_perf - r.performance,
                optimal=missed == 0,
                minimal_optimal=r.selected == mb_players,
                missed_boundary=tuple(f.names[i] for i in mask_members(missed)),
                redundant_extras=tuple(f.names[i] for i in mask_members(extras)),
            )
        )
    return out
