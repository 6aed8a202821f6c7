"""Randomized harness measuring how often Shapley rankings ignore structure.

Each simulated network gets an exact Shapley computation, its graph Markov
boundary, and three event flags:

* E1 — some non-boundary variable outranks some boundary member;
* E2 — the summed boundary Shapley mass is below a single non-boundary value;
* E3 — the top-|MB| Shapley set is not the Markov boundary.

These flags are this artifact's operationalization of the ranking/structure
disassociation; E2 implies E1 by construction.  Discrete networks are scored
with the quadratic-posterior game, which is strictly sensitive to conditional
dependence, keeping the structural theorems exact on random parameterizations.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .discrete import Cpt, DiscreteBayesNet
from .engine import exact_shapley, verify_axioms
from .errors import InputError
from .games import network_game, variable_mask_to_player_mask
from .gaussian import LinearGaussianSem
from .graph import Dag, markov_boundary, mask_members

__all__ = [
    "SimConfig",
    "NetworkRecord",
    "PrevalenceReport",
    "generate_random_network",
    "evaluate_network",
    "run_prevalence",
]

EVENTS = ("e1", "e2", "e3")
RANK_TOL = 1e-12
COEFFICIENT_DEAD_ZONE = 0.05


@dataclass(frozen=True)
class SimConfig:
    n_vars: int = 6
    edge_probability: float = 0.4
    parameterization: str = "discrete"  # "discrete" | "gaussian"
    min_cpt_prob: float = 0.1
    coefficient_range: tuple[float, float] = (-1.5, 1.5)
    n_networks: int = 200
    seed: int = 0

    def __post_init__(self):
        if not 2 <= self.n_vars <= 12:
            raise InputError("n_vars must be in 2..12 for exact enumeration")
        if not 0.0 <= self.edge_probability <= 1.0:
            raise InputError("edge_probability must lie in [0, 1]")
        if self.parameterization not in ("discrete", "gaussian"):
            raise InputError("parameterization must be 'discrete' or 'gaussian'")
        if not 0.0 < self.min_cpt_prob < 0.5:
            raise InputError("min_cpt_prob must lie in (0, 0.5)")
        if self.n_networks < 1:
            raise InputError("n_networks must be positive")
        lo, hi = self.coefficient_range
        if not lo < hi:
            raise InputError("coefficient_range must be a non-empty interval")
        object.__setattr__(self, "coefficient_range", (float(lo), float(hi)))

    @classmethod
    def from_json(cls, text: str) -> "SimConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid config JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise InputError("config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise InputError(f"unknown config fields: {sorted(unknown)}")
        if "coefficient_range" in raw:
            raw["coefficient_range"] = tuple(raw["coefficient_range"])
        try:
            return cls(**raw)
        except TypeError as exc:
            raise InputError(f"bad config: {exc}") from exc

    def to_dict(self) -> dict:
        d = asdict(self)
        d["coefficient_range"] = list(self.coefficient_range)
        return d


def _random_dag(config: SimConfig, rng: np.random.Generator) -> Dag:
    n = config.n_vars
    order = rng.permutation(n)
    edges = set()
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < config.edge_probability:
                edges.add((int(order[a]), int(order[b])))
    names = tuple(f"V{i}" for i in range(n))
    # Prefer a target that actually has parents; fall back to uniform.
    with_parents = sorted({c for _, c in edges})
    if with_parents:
        target = int(with_parents[rng.integers(len(with_parents))])
    else:
        target = int(rng.integers(n))
    return Dag(names, frozenset(edges), target)


def _random_discrete(g: Dag, config: SimConfig, rng: np.random.Generator) -> DiscreteBayesNet:
    # Binary variables only; Dirichlet rows pulled away from 0/1 so random
    # parameterizations stay clear of deterministic / unfaithful regions.
    floor = config.min_cpt_prob
    cpts = []
    for i in range(g.n):
        parents = g.parents(i)
        rows = math.prod(2 for _ in parents)
        raw = rng.dirichlet(np.ones(2), size=rows)
        adjusted = floor + (1.0 - 2.0 * floor) * raw
        table = adjusted.reshape(tuple(2 for _ in parents) + (2,))
        cpts.append(Cpt(i, parents, table))
    return DiscreteBayesNet(g, tuple(2 for _ in range(g.n)), tuple(cpts))


def _random_gaussian(g: Dag, config: SimConfig, rng: np.random.Generator) -> LinearGaussianSem:
    lo, hi = config.coefficient_range
    coefficients = {}
    for edge in sorted(g.edges):
        w = 0.0
        while abs(w) < COEFFICIENT_DEAD_ZONE:
            w = float(rng.uniform(lo, hi))
        coefficients[edge] = w
    noise = tuple(float(rng.uniform(0.5, 2.0)) for _ in range(g.n))
    return LinearGaussianSem(g, coefficients, noise)


def generate_random_network(
    config: SimConfig, index: int
) -> DiscreteBayesNet | LinearGaussianSem:
    """Deterministic random network for ``(config.seed, index)``."""
    rng = np.random.default_rng([config.seed, index])
    g = _random_dag(config, rng)
    if config.parameterization == "discrete":
        return _random_discrete(g, config, rng)
    return _random_gaussian(g, config, rng)


@dataclass(frozen=True)
class NetworkRecord:
    index: int
    mb_size: int
    mb_phi_sum: float
    min_mb_phi: float | None
    max_non_mb_phi: float | None
    e1: bool
    e2: bool
    e3: bool
    axioms_ok: bool

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate_network(
    model: DiscreteBayesNet | LinearGaussianSem, index: int = 0
) -> NetworkRecord:
    """Exact Shapley run plus event flags for one network."""
    g = model.graph
    metric = "quadratic" if isinstance(model, DiscreteBayesNet) else "accuracy"
    f = network_game(model, metric=metric)
    report = exact_shapley(f)
    axioms = verify_axioms(f, report, tol=1e-9)

    mb_players = variable_mask_to_player_mask(g, markov_boundary(g))
    mb = sorted(mask_members(mb_players))
    non_mb = [i for i in range(f.n_players) if i not in mb]
    phi = report.values

    min_mb = float(phi[mb].min()) if mb else None
    max_non = float(phi[non_mb].max()) if non_mb else None
    mb_sum = float(phi[mb].sum()) if mb else 0.0

    if mb and non_mb:
        e1 = bool(max(phi[non_mb]) > min(phi[mb]) + RANK_TOL)
        e2 = bool(mb_sum + RANK_TOL < max(phi[non_mb]))
    else:
        e1 = e2 = False
    top = set(report.ranking()[: len(mb)])
    e3 = top != set(mb)

    return NetworkRecord(
        index=index,
        mb_size=len(mb),
        mb_phi_sum=mb_sum,
        min_mb_phi=min_mb,
        max_non_mb_phi=max_non,
        e1=e1,
        e2=e2,
        e3=e3,
        axioms_ok=axioms.ok,
    )


def _binomial_ci(successes: int, trials: int) -> tuple[float, float, float]:
    p = successes / trials
    half = 1.96 * math.sqrt(p * (1.0 - p) / trials)
    return p, max(0.0, p - half), min(1.0, p + half)


@dataclass(frozen=True)
class PrevalenceReport:
    config: SimConfig
    records: tuple[NetworkRecord, ...]
    frequencies: dict[str, tuple[float, float, float]]

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "records": [r.to_dict() for r in self.records],
            "frequencies": {
                k: {"frequency": v[0], "ci_low": v[1], "ci_high": v[2]}
                for k, v in self.frequencies.items()
            },
        }


def run_prevalence(config: SimConfig) -> PrevalenceReport:
    """Generate, analyze, and aggregate ``config.n_networks`` random networks."""
    records = []
    for index in range(config.n_networks):
        model = generate_random_network(config, index)
        record = evaluate_network(model, index)
        if record.e2 and not record.e1:
            raise AssertionError("event E2 without E1; estimator inconsistency")
        records.append(record)
    frequencies = {
        event: _binomial_ci(
            sum(1 for r in records if getattr(r, event)), len(records)
        )
        for event in EVENTS
    }
    return PrevalenceReport(config, tuple(records), frequencies)
