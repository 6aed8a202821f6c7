"""DAG representation, d-separation, Markov boundary, and relevance classes.

Variables are identified by dense integer indices ``0..n-1``; subsets of
variables are plain ``int`` bitmasks (bit ``i`` set means variable ``i`` is a
member).  All operations here are pure functions of immutable inputs and make
no reference to any distribution: they are purely structural and become
statements about conditional (in)dependence only under the faithfulness
assumption, which is declared on the model, not checked here.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator

from .errors import InputError

__all__ = [
    "Dag",
    "RelevanceClass",
    "mask_of",
    "mask_members",
    "d_separated",
    "markov_boundary",
    "parents_children",
    "classify_relevance",
    "undirected_path_exists",
]


def mask_of(indices: Iterable[int]) -> int:
    """Bitmask with the given variable indices set."""
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def mask_members(mask: int) -> Iterator[int]:
    """Indices set in ``mask``, in increasing order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class RelevanceClass(Enum):
    STRONGLY_RELEVANT = "strongly_relevant"
    WEAKLY_RELEVANT = "weakly_relevant"
    IRRELEVANT = "irrelevant"


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph over named variables with a designated target.

    ``names`` fixes the index → name correspondence; ``edges`` is a set of
    ``(parent, child)`` index pairs; ``target`` is the index of the predicted
    variable.
    """

    names: tuple[str, ...]
    edges: frozenset[tuple[int, int]]
    target: int

    def __post_init__(self):
        n = len(self.names)
        if n == 0:
            raise InputError("a DAG needs at least one variable")
        if len(set(self.names)) != n or any(not name for name in self.names):
            raise InputError("variable names must be unique and non-empty")
        for p, c in self.edges:
            if not (0 <= p < n and 0 <= c < n):
                raise InputError(f"edge ({p}, {c}) references an unknown variable")
            if p == c:
                raise InputError(f"self-loop on variable {self.names[p]!r}")
        if not 0 <= self.target < n:
            raise InputError(f"target index {self.target} out of range")
        self.topological_order  # cycle check

    @classmethod
    def from_names(
        cls, names: Iterable[str], edges: Iterable[tuple[str, str]], target: str
    ) -> "Dag":
        names = tuple(names)
        index = {name: i for i, name in enumerate(names)}
        try:
            edge_idx = frozenset((index[p], index[c]) for p, c in edges)
            return cls(names, edge_idx, index[target])
        except KeyError as exc:
            raise InputError(f"unknown variable name {exc.args[0]!r}") from exc

    @property
    def n(self) -> int:
        return len(self.names)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown variable name {name!r}") from None

    @cached_property
    def parent_sets(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for p, c in sorted(self.edges):
            out[c].append(p)
        return tuple(tuple(v) for v in out)

    @cached_property
    def child_sets(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for p, c in sorted(self.edges):
            out[p].append(c)
        return tuple(tuple(v) for v in out)

    def parents(self, i: int) -> tuple[int, ...]:
        return self.parent_sets[i]

    def children(self, i: int) -> tuple[int, ...]:
        return self.child_sets[i]

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        indeg = [len(self.parent_sets[i]) for i in range(self.n)]
        queue = deque(i for i in range(self.n) if indeg[i] == 0)
        order = []
        while queue:
            i = queue.popleft()
            order.append(i)
            for c in self.child_sets[i]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if len(order) != self.n:
            raise InputError("graph contains a directed cycle")
        return tuple(order)

    def non_target_variables(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if i != self.target)

    def _check_var(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise InputError(f"variable index {i} out of range for {self.n} variables")


def _ancestors_of(g: Dag, seed_mask: int) -> int:
    """Mask of members of ``seed_mask`` together with all their ancestors."""
    result = seed_mask
    stack = list(mask_members(seed_mask))
    while stack:
        i = stack.pop()
        for p in g.parents(i):
            bit = 1 << p
            if not result & bit:
                result |= bit
                stack.append(p)
    return result


def d_separated(g: Dag, x: int, y: int, z: int) -> bool:
    """Whether ``x`` and ``y`` are d-separated given the conditioning mask ``z``.

    Uses the linear-time reachability formulation (Koller & Friedman, Alg.
    3.1): a trail is traversed upward or downward, colliders pass the trail
    only when they have a descendant in ``z``, and non-colliders in ``z``
    block it.  Returns True iff no active trail joins ``x`` and ``y``.
    """
    g._check_var(x)
    g._check_var(y)
    if x == y:
        raise InputError("d-separation requires two distinct variables")
    if z & (1 << x) or z & (1 << y):
        raise InputError("endpoints may not appear in the conditioning set")
    if z >> g.n:
        raise InputError("conditioning mask references unknown variables")

    ancestors_z = _ancestors_of(g, z)
    # Direction 'up' means the trail reached the node from one of its
    # children; 'down' means it arrived from a parent.
    UP, DOWN = 0, 1
    visited = set()
    queue = deque([(x, UP)])
    while queue:
        node, direction = queue.popleft()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        in_z = bool(z & (1 << node))
        if not in_z and node == y:
            return False
        if direction == UP and not in_z:
            for p in g.parents(node):
                queue.append((p, UP))
            for c in g.children(node):
                queue.append((c, DOWN))
        elif direction == DOWN:
            if not in_z:
                for c in g.children(node):
                    queue.append((c, DOWN))
            if ancestors_z & (1 << node):
                for p in g.parents(node):
                    queue.append((p, UP))
    return True


def parents_children(g: Dag, x: int) -> int:
    """Mask of the variables adjacent to ``x`` (its parents and children)."""
    g._check_var(x)
    return mask_of(g.parents(x)) | mask_of(g.children(x))


def markov_boundary(g: Dag) -> int:
    """Parents, children, and parents-of-children of the target, minus itself."""
    t = g.target
    mb = mask_of(g.parents(t)) | mask_of(g.children(t))
    for c in g.children(t):
        mb |= mask_of(g.parents(c))
    return mb & ~(1 << t)


def undirected_path_exists(g: Dag, x: int, y: int) -> bool:
    """Whether ``x`` and ``y`` lie in the same component of the skeleton."""
    g._check_var(x)
    g._check_var(y)
    if x == y:
        raise InputError("path query requires two distinct variables")
    seen = {x}
    stack = [x]
    while stack:
        i = stack.pop()
        for j in g.parents(i) + g.children(i):
            if j == y:
                return True
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return False


def classify_relevance(g: Dag) -> dict[int, RelevanceClass]:
    """Relevance class of every non-target variable, assuming faithfulness.

    Markov-boundary members are strongly relevant; other variables connected
    to the target by some undirected path are weakly relevant; disconnected
    variables are irrelevant.
    """
    mb = markov_boundary(g)
    out: dict[int, RelevanceClass] = {}
    for i in g.non_target_variables():
        if mb & (1 << i):
            out[i] = RelevanceClass.STRONGLY_RELEVANT
        elif undirected_path_exists(g, i, g.target):
            out[i] = RelevanceClass.WEAKLY_RELEVANT
        else:
            out[i] = RelevanceClass.IRRELEVANT
    return out
