"""Exact and Monte Carlo Shapley computation over arbitrary set games.

A game is a deterministic map from player-subset bitmasks to real values,
memoized on first evaluation.  The empty coalition need not be worth zero:
all identities here use the generalized efficiency form
``sum_i phi_i = v(N) - v(empty)``, with ``shifted()`` available to restore the
textbook game.  The heavy loops (dense subset sweep, permutation walks) are
delegated to :mod:`shapbn.kernels`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import CapacityError, InputError
from .graph import Dag, mask_members, parents_children, undirected_path_exists

__all__ = [
    "CharacteristicFn",
    "ShapleyReport",
    "shapley_weight",
    "exact_shapley",
    "summand_table",
    "StructureRecord",
    "StructureFindings",
    "check_summand_structure",
    "pairwise_shapley_diff",
    "AxiomFindings",
    "verify_axioms",
    "permutation_oracle_shapley",
    "monte_carlo_shapley",
]

HARD_PLAYER_CAP = 25
EXACT_ENUMERATION_CAP = 20
ORACLE_CAP = 8
SUMMAND_MATERIALIZE_LIMIT = 14
MC_TABLE_LIMIT = 15
STRATUM_EXHAUST_LIMIT = 40320  # 8!, the largest per-stratum enumeration we allow


class CharacteristicFn:
    """Memoized deterministic map from player-subset masks to game values.

    Subsets are ``int`` bitmasks over players ``0..n_players-1``.  ``evaluate``
    must be pure; cached values are written once and never change, so
    concurrent readers always see consistent entries.
    """

    def __init__(
        self,
        n_players: int,
        evaluate: Callable[[int], float],
        names: Sequence[str] | None = None,
    ):
        if not 1 <= n_players <= HARD_PLAYER_CAP:
            raise CapacityError(
                f"player count must be in 1..{HARD_PLAYER_CAP}, got {n_players}"
            )
        self.n_players = n_players
        self._evaluate = evaluate
        self.names = tuple(names) if names is not None else tuple(
            f"P{i}" for i in range(n_players)
        )
        if len(self.names) != n_players:
            raise InputError("need one name per player")
        self._cache: dict[int, float] = {}
        self._table: np.ndarray | None = None

    @property
    def full_mask(self) -> int:
        return (1 << self.n_players) - 1

    def value(self, mask: int) -> float:
        if not 0 <= mask <= self.full_mask:
            raise InputError(f"mask {mask} out of range for {self.n_players} players")
        if self._table is not None:
            return float(self._table[mask])
        try:
            return self._cache[mask]
        except KeyError:
            v = float(self._evaluate(mask))
            return self._cache.setdefault(mask, v)

    def table(self) -> np.ndarray:
        """Dense value table over all 2^n subsets, built once."""
        if self._table is None:
            t = np.empty(1 << self.n_players)
            for mask in range(1 << self.n_players):
                cached = self._cache.get(mask)
                t[mask] = self._evaluate(mask) if cached is None else cached
            self._table = t
        return self._table

    @property
    def baseline(self) -> float:
        return self.value(0)

    @property
    def grand_value(self) -> float:
        return self.value(self.full_mask)

    def restrict(self, players: Sequence[int]) -> "CharacteristicFn":
        """Game over a subset of players; excluded players are simply absent."""
        players = tuple(players)
        if len(set(players)) != len(players) or any(
            not 0 <= p < self.n_players for p in players
        ):
            raise InputError("restriction players must be distinct and valid")
        bits = [1 << p for p in players]

        def evaluate(mask: int) -> float:
            full = 0
            for k, bit in enumerate(bits):
                if mask & (1 << k):
                    full |= bit
            return self.value(full)

        return CharacteristicFn(
            len(players), evaluate, names=[self.names[p] for p in players]
        )

    def shifted(self) -> "CharacteristicFn":
        """Baseline-subtracted game with ``v(empty) = 0`` (strict mode)."""
        base = self.baseline
        return CharacteristicFn(
            self.n_players, lambda mask: self.value(mask) - base, names=self.names
        )

    def __add__(self, other: "CharacteristicFn") -> "CharacteristicFn":
        if not isinstance(other, CharacteristicFn):
            return NotImplemented
        if other.n_players != self.n_players:
            raise InputError("game sum requires identical player sets")
        return CharacteristicFn(
            self.n_players,
            lambda mask: self.value(mask) + other.value(mask),
            names=self.names,
        )


@dataclass(frozen=True)
class ShapleyReport:
    """Per-player Shapley values plus the data needed to audit them."""

    names: tuple[str, ...]
    values: np.ndarray
    baseline: float
    grand_value: float
    weights: dict[int, Fraction]
    summands: dict[int, dict[int, float]] | None = None
    std_errors: np.ndarray | None = None
    n_samples: int | None = None

    @property
    def n_players(self) -> int:
        return len(self.names)

    def value_of(self, name: str) -> float:
        try:
            return float(self.values[self.names.index(name)])
        except ValueError:
            raise InputError(f"unknown player {name!r}") from None

    def efficiency_residual(self) -> float:
        return float(self.values.sum() - (self.grand_value - self.baseline))

    def ranking(self) -> list[int]:
        """Player indices sorted by descending value; ties by index."""
        return sorted(range(self.n_players), key=lambda i: (-self.values[i], i))

    def to_dict(self) -> dict:
        payload = {
            "players": list(self.names),
            "values": {name: float(v) for name, v in zip(self.names, self.values)},
            "baseline": self.baseline,
            "grand_value": self.grand_value,
            "efficiency_residual": self.efficiency_residual(),
            "weights": {str(s): [w.numerator, w.denominator] for s, w in self.weights.items()},
        }
        if self.summands is not None:
            payload["summand_count"] = sum(len(v) for v in self.summands.values())
        if self.std_errors is not None:
            payload["std_errors"] = {
                name: float(v) for name, v in zip(self.names, self.std_errors)
            }
            payload["n_samples"] = self.n_samples
        return payload


def shapley_weight(n: int, s: int) -> Fraction:
    """Exact coalition-size weight ``(n - s - 1)! s! / n!``."""
    if n < 1:
        raise InputError("n must be positive")
    if not 0 <= s <= n - 1:
        raise InputError(f"coalition size {s} invalid for {n} players")
    return Fraction(
        math.factorial(n - s - 1) * math.factorial(s), math.factorial(n)
    )


def _weight_array(n: int) -> np.ndarray:
    return np.array([float(shapley_weight(n, s)) for s in range(n)])


def exact_shapley(
    f: CharacteristicFn,
    cap: int = EXACT_ENUMERATION_CAP,
    summand_limit: int = SUMMAND_MATERIALIZE_LIMIT,
) -> ShapleyReport:
    """Exact Shapley values by full subset enumeration.

    The summand table is materialized on the report for games small enough
    to hold it (``n <= summand_limit``); beyond that, use
    :func:`summand_table` on demand.
    """
    n = f.n_players
    if n > cap:
        raise CapacityError(
            f"exact enumeration capped at {cap} players, got {n}"
        )
    table = f.table()
    values = kernels.exact_shapley_from_table(table, _weight_array(n), n)
    summands = None
    if n <= summand_limit:
        summands = {i: summand_table(f, i) for i in range(n)}
    return ShapleyReport(
        names=f.names,
        values=values,
        baseline=f.baseline,
        grand_value=f.grand_value,
        weights={s: shapley_weight(n, s) for s in range(n)},
        summands=summands,
    )


def summand_table(f: CharacteristicFn, i: int) -> dict[int, float]:
    """All marginal contributions ``f(S | i) - f(S)`` for player ``i``."""
    n = f.n_players
    if not 0 <= i < n:
        raise InputError(f"player index {i} out of range")
    if n > EXACT_ENUMERATION_CAP:
        raise CapacityError("summand enumeration exceeds the cap")
    table = f.table()
    bit = 1 << i
    out: dict[int, float] = {}
    for mask in range(1 << n):
        if not mask & bit:
            out[mask] = float(table[mask | bit] - table[mask])
    return out


@dataclass(frozen=True)
class StructureRecord:
    player: int
    name: str
    expected: str  # "all_positive" | "has_zero" | "all_zero"
    observed: str
    min_summand: float
    max_abs_summand: float

    @property
    def mismatch(self) -> bool:
        if self.expected == self.observed:
            return False
        # "has_zero" only requires at least one zero summand alongside some
        # dependence; an all-zero pattern still satisfies the zero part but is
        # flagged because a connected variable should show some dependence.
        return True


@dataclass(frozen=True)
class StructureFindings:
    records: tuple[StructureRecord, ...]

    @property
    def mismatches(self) -> tuple[StructureRecord, ...]:
        return tuple(r for r in self.records if r.mismatch)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "records": [
                {
                    "player": r.name,
                    "expected": r.expected,
                    "observed": r.observed,
                    "min_summand": r.min_summand,
                    "max_abs_summand": r.max_abs_summand,
                    "mismatch": r.mismatch,
                }
                for r in self.records
            ],
            "ok": self.ok,
        }


def check_summand_structure(
    report: ShapleyReport, g: Dag, tol: float = 1e-9
) -> StructureFindings:
    """Compare the zero pattern of summands against the graph around the target.

    Variables adjacent to the target should have every summand positive;
    variables connected but not adjacent (spouses included) should have at
    least one zero summand; variables with no path to the target should have
    all summands zero.
    """
    players = g.non_target_variables()
    if report.n_players != len(players):
        raise InputError("report players do not match the graph's non-target variables")
    if report.summands is None:
        raise InputError(
            "report carries no summand table; recompute with a smaller game "
            "or raise summand_limit"
        )
    pc_mask = parents_children(g, g.target)
    records = []
    for k, var in enumerate(players):
        summ = np.array(list(report.summands[k].values()))
        all_positive = bool(np.all(summ > tol))
        all_zero = bool(np.all(np.abs(summ) <= tol))
        observed = "all_positive" if all_positive else (
            "all_zero" if all_zero else "has_zero"
            if np.any(np.abs(summ) <= tol) else "mixed_nonzero"
        )
        if pc_mask & (1 << var):
            expected = "all_positive"
        elif undirected_path_exists(g, var, g.target):
            expected = "has_zero"
        else:
            expected = "all_zero"
        records.append(
            StructureRecord(
                player=k,
                name=g.names[var],
                expected=expected,
                observed=observed,
                min_summand=float(summ.min()),
                max_abs_summand=float(np.abs(summ).max()),
            )
        )
    return StructureFindings(tuple(records))


def pairwise_shapley_diff(f: CharacteristicFn, i: int, j: int) -> float:
    """``phi_i - phi_j`` via the pairwise cancellation identity.

    Summing ``(w(s) + w(s+1)) * [f(S | i) - f(S | j)]`` over the 2^(n-2)
    subsets avoiding both players reproduces the difference of the two full
    Shapley sums without evaluating the shared terms.
    """
    n = f.n_players
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise InputError("need two distinct valid players")
    if n > EXACT_ENUMERATION_CAP:
        raise CapacityError("pairwise enumeration exceeds the cap")
    table = f.table()
    bi, bj = 1 << i, 1 << j
    masks = np.arange(1 << n, dtype=np.int64)
    masks = masks[((masks & bi) == 0) & ((masks & bj) == 0)]
    pc = kernels.popcount_table(n)[masks]
    w = _weight_array(n)
    wsum = w[pc] + w[pc + 1]
    return float(np.sum(wsum * (table[masks | bi] - table[masks | bj])))


@dataclass(frozen=True)
class AxiomFindings:
    checked: tuple[str, ...]
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"checked": list(self.checked), "violations": list(self.violations), "ok": self.ok}


def verify_axioms(
    f: CharacteristicFn,
    report: ShapleyReport,
    tol: float = 1e-9,
    additivity_with: CharacteristicFn | None = None,
) -> AxiomFindings:
    """Check generalized efficiency, symmetry, dummy, and (optionally) additivity.

    Symmetry and dummy are checked against the game itself: players whose
    marginal contributions agree on every subset must tie, and players whose
    marginal contributions all vanish must get zero.
    """
    n = f.n_players
    checked = ["efficiency", "symmetry", "dummy"]
    violations: list[str] = []

    residual = report.efficiency_residual()
    if abs(residual) > tol:
        violations.append(f"efficiency: residual {residual:.3e} exceeds {tol:g}")

    table = f.table()
    masks = np.arange(1 << n, dtype=np.int64)
    for i in range(n):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        deltas = table[without | bit] - table[without]
        if np.max(np.abs(deltas)) <= tol and abs(report.values[i]) > tol:
            violations.append(
                f"dummy: player {f.names[i]} has all-zero contributions but "
                f"phi = {report.values[i]:.3e}"
            )
    for i in range(n):
        for j in range(i + 1, n):
            bi, bj = 1 << i, 1 << j
            both_out = masks[((masks & bi) == 0) & ((masks & bj) == 0)]
            if np.max(np.abs(table[both_out | bi] - table[both_out | bj])) <= tol:
                if abs(report.values[i] - report.values[j]) > tol:
                    violations.append(
                        f"symmetry: players {f.names[i]} and {f.names[j]} are "
                        f"interchangeable but phi differs"
                    )

    if additivity_with is not None:
        checked.append("additivity")
        rep_w = exact_shapley(additivity_with)
        rep_sum = exact_shapley(f + additivity_with)
        diff = np.max(np.abs(rep_sum.values - (report.values + rep_w.values)))
        if diff > tol:
            violations.append(f"additivity: max deviation {diff:.3e} exceeds {tol:g}")

    return AxiomFindings(tuple(checked), tuple(violations))


def permutation_oracle_shapley(f: CharacteristicFn) -> ShapleyReport:
    """Independent Shapley oracle: average marginals over all n! orderings."""
    n = f.n_players
    if n > ORACLE_CAP:
        raise CapacityError(f"factorial oracle capped at {ORACLE_CAP} players")
    totals = [0.0] * n
    count = 0
    for perm in itertools.permutations(range(n)):
        mask = 0
        prev = f.value(0)
        for p in perm:
            mask |= 1 << p
            cur = f.value(mask)
            totals[p] += cur - prev
            prev = cur
        count += 1
    values = np.array(totals) / count
    return ShapleyReport(
        names=f.names,
        values=values,
        baseline=f.baseline,
        grand_value=f.grand_value,
        weights={s: shapley_weight(n, s) for s in range(n)},
        summands=None,
    )


def _marginals_python(f: CharacteristicFn, perms: np.ndarray, n: int):
    sums = np.zeros(n)
    sumsqs = np.zeros(n)
    for row in perms:
        mask = 0
        prev = f.value(0)
        for p in row:
            mask |= 1 << int(p)
            cur = f.value(mask)
            d = cur - prev
            sums[p] += d
            sumsqs[p] += d * d
            prev = cur
    return sums, sumsqs


def _batch_marginals(f: CharacteristicFn, perms: np.ndarray):
    n = f.n_players
    if n <= MC_TABLE_LIMIT:
        return kernels.permutation_marginals(f.table(), perms, n)
    return _marginals_python(f, perms, n)


def _stratum_perms_exhaustive(members, others, positions):
    """Every permutation placing ``members`` exactly on ``positions``."""
    n = len(members) + len(others)
    rest_positions = [p for p in range(n) if p not in positions]
    rows = []
    for mp in itertools.permutations(members):
        for op in itertools.permutations(others):
            row = np.empty(n, dtype=np.int64)
            row[list(positions)] = mp
            row[rest_positions] = op
            rows.append(row)
    return np.array(rows)


def _stratum_perms_sampled(members, others, positions, count, rng):
    n = len(members) + len(others)
    rest_positions = [p for p in range(n) if p not in positions]
    perms = np.empty((count, n), dtype=np.int64)
    member_arr = np.tile(np.array(members, dtype=np.int64), (count, 1))
    other_arr = np.tile(np.array(others, dtype=np.int64), (count, 1))
    perms[:, list(positions)] = rng.permuted(member_arr, axis=1)
    if rest_positions:
        perms[:, rest_positions] = rng.permuted(other_arr, axis=1)
    return perms


def monte_carlo_shapley(
    f: CharacteristicFn,
    samples: int,
    seed: int,
    strata: int | None = None,
) -> ShapleyReport:
    """Unbiased permutation-sampling Shapley estimate with standard errors.

    Without ``strata``, permutations are drawn uniformly.  With ``strata`` (a
    player mask, e.g. the Markov boundary), permutations are stratified on the
    set of rank positions the strata members occupy: every position set has
    equal permutation measure, samples are split evenly across them, and
    strata small enough to enumerate are evaluated exhaustively (so with
    enough samples the estimate becomes exact).  Deterministic given ``seed``.
    """
    n = f.n_players
    if samples < 1:
        raise InputError("need at least one sample")
    rng = np.random.default_rng(seed)

    if strata is not None and strata != 0 and strata != f.full_mask:
        if strata >> n:
            raise InputError("strata mask references unknown players")
        members = list(mask_members(strata))
        others = [p for p in range(n) if p not in members]
        k = len(members)
        n_strata = math.comb(n, k)
        if n_strata > samples:
            raise InputError(
                f"stratification needs at least one sample per stratum "
                f"({n_strata} strata, {samples} samples)"
            )
        stratum_size = math.factorial(k) * math.factorial(n - k)
        base, extra = divmod(samples, n_strata)
        phi = np.zeros(n)
        var_sum = np.zeros(n)
        used = 0
        for idx, positions in enumerate(itertools.combinations(range(n), k)):
            budget = base + (1 if idx < extra else 0)
            if budget >= stratum_size and stratum_size <= STRATUM_EXHAUST_LIMIT:
                perms = _stratum_perms_exhaustive(members, others, positions)
                sums, _ = _batch_marginals(f, perms)
                mean = sums / len(perms)
                var = np.zeros(n)
                used += len(perms)
            else:
                perms = _stratum_perms_sampled(members, others, positions, budget, rng)
                sums, sumsqs = _batch_marginals(f, perms)
                mean = sums / budget
                var = (
                    (sumsqs - budget * mean**2) / (budget - 1)
                    if budget > 1
                    else np.zeros(n)
                )
                var = np.maximum(var, 0.0) / budget
                used += budget
            phi += mean / n_strata
            var_sum += var / n_strata**2
        values = phi
        std_errors = np.sqrt(var_sum)
        n_used = used
    else:
        perms = rng.permuted(
            np.tile(np.arange(n, dtype=np.int64), (samples, 1)), axis=1
        )
        sums, sumsqs = _batch_marginals(f, perms)
        values = sums / samples
        if samples > 1:
            var = np.maximum((sumsqs - samples * values**2) / (samples - 1), 0.0)
            std_errors = np.sqrt(var / samples)
        else:
            std_errors = np.zeros(n)
        n_used = samples

    return ShapleyReport(
        names=f.names,
        values=values,
        baseline=f.value(0),
        grand_value=f.value(f.full_mask),
        weights={s: shapley_weight(n, s) for s in range(n)},
        summands=None,
        std_errors=std_errors,
        n_samples=n_used,
    )
