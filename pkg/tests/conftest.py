"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the package's fast paths: d-separation is
re-derived by enumerating simple paths, discrete game values by looping over
raw assignments, and Shapley values by the direct subset-sum formula with
exact rational weights.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from shapbn.discrete import Cpt, DiscreteBayesNet
from shapbn.gaussian import LinearGaussianSem
from shapbn.graph import Dag, mask_of
from shapbn.modelfile import load_model_file

import importlib.resources

DATA = importlib.resources.files("shapbn") / "data"


@pytest.fixture(scope="session")
def proxy_sem() -> LinearGaussianSem:
    """Three causes of T plus a redundant common child S of all three causes."""
    return load_model_file(DATA / "gaussian_redundant_proxy.json")


@pytest.fixture(scope="session")
def confounded_model():
    """Discrete net C -> A, C -> B, A -> T, B -> T with its published CPTs."""
    return load_model_file(DATA / "discrete_confounded_pair.json")


@pytest.fixture(scope="session")
def confounded_net(confounded_model) -> DiscreteBayesNet:
    return confounded_model.net


@pytest.fixture(scope="session")
def xor_model():
    return load_model_file(DATA / "discrete_xor_unfaithful.json")


def names_to_mask(g: Dag, names) -> int:
    return mask_of(g.index_of(n) for n in names)


# ---------------------------------------------------------------------------
# Oracle: d-separation by brute-force path enumeration.


def all_simple_paths(g: Dag, x: int, y: int):
    """Every simple undirected path from x to y, as vertex sequences."""
    adjacency = [set(g.parents(i)) | set(g.children(i)) for i in range(g.n)]

    def extend(path):
        last = path[-1]
        if last == y:
            yield list(path)
            return
        for nxt in sorted(adjacency[last]):
            if nxt not in path:
                path.append(nxt)
                yield from extend(path)
                path.pop()

    yield from extend([x])


def descendants(g: Dag, i: int) -> set:
    out = set()
    stack = [i]
    while stack:
        v = stack.pop()
        for c in g.children(v):
            if c not in out:
                out.add(c)
                stack.append(c)
    return out


def path_open(g: Dag, path, z: int) -> bool:
    """Open-path criterion applied literally to one path."""
    for k in range(1, len(path) - 1):
        prev_node, node, next_node = path[k - 1], path[k], path[k + 1]
        is_collider = (prev_node, node) in g.edges and (next_node, node) in g.edges
        if is_collider:
            activated = bool(z & (1 << node)) or any(
                z & (1 << d) for d in descendants(g, node)
            )
            if not activated:
                return False
        else:
            if z & (1 << node):
                return False
    return True


def d_separated_oracle(g: Dag, x: int, y: int, z: int) -> bool:
    return not any(path_open(g, p, z) for p in all_simple_paths(g, x, y))


# ---------------------------------------------------------------------------
# Oracle: discrete game values by raw assignment loops.


def joint_oracle(net: DiscreteBayesNet) -> dict:
    """Probability of every assignment by direct CPT multiplication."""
    out = {}
    for assign in itertools.product(*(range(c) for c in net.cardinalities)):
        p = 1.0
        for cpt in net.cpts:
            idx = tuple(assign[q] for q in cpt.parents) + (assign[cpt.variable],)
            p *= float(cpt.table[idx])
        out[assign] = p
    return out


def accuracy_oracle(net: DiscreteBayesNet, s_vars) -> float:
    """Bayes-accuracy by grouping raw assignments; independent of ndarray code."""
    t = net.graph.target
    joint = joint_oracle(net)
    groups = {}
    for assign, p in joint.items():
        key = tuple(assign[v] for v in sorted(s_vars))
        groups.setdefault(key, {})
        groups[key][assign[t]] = groups[key].get(assign[t], 0.0) + p
    return sum(max(dist.values()) for dist in groups.values())


def quadratic_oracle(net: DiscreteBayesNet, s_vars) -> float:
    t = net.graph.target
    joint = joint_oracle(net)
    groups = {}
    for assign, p in joint.items():
        key = tuple(assign[v] for v in sorted(s_vars))
        groups.setdefault(key, {})
        groups[key][assign[t]] = groups[key].get(assign[t], 0.0) + p
    total = 0.0
    for dist in groups.values():
        ps = sum(dist.values())
        if ps > 0:
            total += sum(v * v for v in dist.values()) / ps
    return total


# ---------------------------------------------------------------------------
# Oracle: Shapley by the direct subset-sum formula with exact weights.


def shapley_subset_oracle(n: int, value) -> list:
    """phi per player from the definition, combinations + Fraction weights."""
    players = list(range(n))
    phi = []
    for i in players:
        rest = [p for p in players if p != i]
        total = 0.0
        for r in range(len(rest) + 1):
            w = float(
                Fraction(
                    math.factorial(n - r - 1) * math.factorial(r), math.factorial(n)
                )
            )
            for subset in itertools.combinations(rest, r):
                s_mask = mask_of(subset)
                total += w * (value(s_mask | (1 << i)) - value(s_mask))
        phi.append(total)
    return phi


# ---------------------------------------------------------------------------
# Random structure helpers.


def random_dag(rng: np.random.Generator, n: int, p: float = 0.5) -> Dag:
    order = rng.permutation(n)
    edges = set()
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                edges.add((int(order[a]), int(order[b])))
    return Dag(tuple(f"V{i}" for i in range(n)), frozenset(edges), int(rng.integers(n)))


def random_binary_net(
    rng: np.random.Generator, g: Dag, floor: float = 0.1
) -> DiscreteBayesNet:
    cpts = []
    for i in range(g.n):
        parents = g.parents(i)
        rows = 2 ** len(parents)
        p1 = rng.uniform(floor, 1.0 - floor, size=rows)
        table = np.stack([1.0 - p1, p1], axis=-1).reshape(
            tuple(2 for _ in parents) + (2,)
        )
        cpts.append(Cpt(i, parents, table))
    return DiscreteBayesNet(g, tuple(2 for _ in range(g.n)), tuple(cpts))
