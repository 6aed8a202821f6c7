import itertools

import numpy as np
import pytest

from shapbn.errors import InputError
from shapbn.graph import (
    Dag,
    RelevanceClass,
    classify_relevance,
    d_separated,
    markov_boundary,
    mask_members,
    mask_of,
    parents_children,
    undirected_path_exists,
)

from conftest import d_separated_oracle, names_to_mask, random_dag


def chain_abt():
    return Dag.from_names(["A", "B", "T"], [("A", "B"), ("B", "T")], "T")


def collider_asb():
    return Dag.from_names(["A", "S", "B"], [("A", "S"), ("B", "S")], "S")


@pytest.fixture(scope="module")
def proxy_graph(proxy_sem):
    return proxy_sem.graph


@pytest.fixture(scope="module")
def confounded_graph(confounded_net):
    return confounded_net.graph


class TestDagValidation:
    def test_cycle_rejected(self):
        with pytest.raises(InputError, match="cycle"):
            Dag.from_names(["A", "B"], [("A", "B"), ("B", "A")], "A")

    def test_self_loop_rejected(self):
        with pytest.raises(InputError, match="self-loop"):
            Dag(("A", "B"), frozenset({(0, 0)}), 1)

    def test_duplicate_names_rejected(self):
        with pytest.raises(InputError, match="unique"):
            Dag(("A", "A"), frozenset(), 0)

    def test_unknown_edge_name_rejected(self):
        with pytest.raises(InputError, match="unknown"):
            Dag.from_names(["A"], [("A", "Z")], "A")


class TestDSeparation:
    def test_chain_blocked_by_middle(self):
        g = chain_abt()
        assert d_separated(g, 0, 2, mask_of([1]))

    def test_chain_open_without_conditioning(self):
        g = chain_abt()
        assert not d_separated(g, 0, 2, 0)

    def test_collider_opened_by_conditioning(self):
        g = collider_asb()
        # Enumerating the single path A -> S <- B by hand: the collider S is
        # activated by conditioning, so the path is open.
        assert d_separated_oracle(g, 0, 2, mask_of([1])) is False
        assert not d_separated(g, 0, 2, mask_of([1]))

    def test_collider_closed_marginally(self):
        g = collider_asb()
        assert d_separated(g, 0, 2, 0)

    def test_collider_opened_by_descendant(self):
        g = Dag.from_names(
            ["A", "S", "B", "D"], [("A", "S"), ("B", "S"), ("S", "D")], "S"
        )
        assert not d_separated(g, 0, 2, mask_of([3]))

    def test_endpoint_in_conditioning_set_rejected(self):
        g = chain_abt()
        with pytest.raises(InputError):
            d_separated(g, 0, 2, mask_of([0]))

    def test_unknown_variable_rejected(self):
        g = chain_abt()
        with pytest.raises(InputError):
            d_separated(g, 0, 7, 0)

    @pytest.mark.parametrize("seed", range(30))
    def test_matches_path_enumeration_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 8))
        g = random_dag(rng, n, p=0.4)
        for x in range(n):
            for y in range(x + 1, n):
                rest = [v for v in range(n) if v not in (x, y)]
                for r in range(len(rest) + 1):
                    for zs in itertools.combinations(rest, r):
                        z = mask_of(zs)
                        assert d_separated(g, x, y, z) == d_separated_oracle(
                            g, x, y, z
                        ), (g.edges, x, y, zs)

    @pytest.mark.parametrize("seed", range(10))
    def test_symmetry(self, seed):
        rng = np.random.default_rng(100 + seed)
        g = random_dag(rng, 6, p=0.4)
        for _ in range(20):
            x, y = rng.choice(6, size=2, replace=False)
            z = int(rng.integers(0, 64)) & ~((1 << int(x)) | (1 << int(y)))
            assert d_separated(g, int(x), int(y), z) == d_separated(
                g, int(y), int(x), z
            )

    @pytest.mark.parametrize("seed", range(10))
    def test_adjacent_pairs_never_separated(self, seed):
        rng = np.random.default_rng(200 + seed)
        g = random_dag(rng, 6, p=0.4)
        for x, y in g.edges:
            rest = [v for v in range(6) if v not in (x, y)]
            for r in range(len(rest) + 1):
                for zs in itertools.combinations(rest, r):
                    assert not d_separated(g, x, y, mask_of(zs))


class TestMarkovBoundary:
    def test_proxy_graph(self, proxy_graph):
        assert markov_boundary(proxy_graph) == names_to_mask(
            proxy_graph, ["A", "B", "C"]
        )

    def test_confounded_graph(self, confounded_graph):
        assert markov_boundary(confounded_graph) == names_to_mask(
            confounded_graph, ["A", "B"]
        )

    def test_isolated_target(self):
        g = Dag.from_names(["T", "X"], [], "T")
        assert markov_boundary(g) == 0

    def test_spouse_included(self):
        g = Dag.from_names(["T", "C", "X"], [("T", "C"), ("X", "C")], "T")
        assert markov_boundary(g) == names_to_mask(g, ["C", "X"])

    @pytest.mark.parametrize("seed", range(20))
    def test_boundary_separates_everything_outside(self, seed):
        rng = np.random.default_rng(300 + seed)
        g = random_dag(rng, int(rng.integers(3, 8)), p=0.4)
        mb = markov_boundary(g)
        t = g.target
        for y in range(g.n):
            if y != t and not mb & (1 << y):
                assert d_separated(g, t, y, mb)

    @pytest.mark.parametrize("seed", range(20))
    def test_boundary_minimal(self, seed):
        rng = np.random.default_rng(400 + seed)
        g = random_dag(rng, int(rng.integers(3, 8)), p=0.4)
        mb = markov_boundary(g)
        members = list(mask_members(mb))
        if len(members) > 5:
            pytest.skip("minimality check is exhaustive; capped at |MB| <= 5")
        t = g.target
        sub = (mb - 1) & mb
        while mb:
            outside = [y for y in range(g.n) if y != t and not sub & (1 << y)]
            blanket = all(d_separated(g, t, y, sub) for y in outside)
            assert not blanket, f"proper subset {sub:b} of MB is still a blanket"
            if sub == 0:
                break
            sub = (sub - 1) & mb


class TestParentsChildren:
    def test_proxy_target(self, proxy_graph):
        assert parents_children(proxy_graph, proxy_graph.target) == names_to_mask(
            proxy_graph, ["A", "B", "C"]
        )

    def test_confounded_target(self, confounded_graph):
        assert parents_children(
            confounded_graph, confounded_graph.target
        ) == names_to_mask(confounded_graph, ["A", "B"])

    def test_edgeless(self):
        g = Dag.from_names(["A", "T"], [], "T")
        assert parents_children(g, 0) == 0


class TestPaths:
    def test_chain_connected(self):
        g = chain_abt()
        assert undirected_path_exists(g, 0, 2)

    def test_two_components(self):
        g = Dag.from_names(["A", "B", "X"], [("A", "B")], "B")
        assert not undirected_path_exists(g, 0, 2)

    def test_proxy_connects_through_causes(self, proxy_graph):
        assert undirected_path_exists(
            proxy_graph, proxy_graph.index_of("S"), proxy_graph.target
        )


class TestRelevance:
    def test_confounded_classes(self, confounded_graph):
        classes = classify_relevance(confounded_graph)
        by_name = {confounded_graph.names[i]: c for i, c in classes.items()}
        assert by_name["A"] == RelevanceClass.STRONGLY_RELEVANT
        assert by_name["B"] == RelevanceClass.STRONGLY_RELEVANT
        assert by_name["C"] == RelevanceClass.WEAKLY_RELEVANT

    def test_proxy_classes(self, proxy_graph):
        classes = classify_relevance(proxy_graph)
        by_name = {proxy_graph.names[i]: c for i, c in classes.items()}
        assert by_name["S"] == RelevanceClass.WEAKLY_RELEVANT
        for name in "ABC":
            assert by_name[name] == RelevanceClass.STRONGLY_RELEVANT

    def test_disconnected_is_irrelevant(self):
        g = Dag.from_names(["A", "T", "X"], [("A", "T")], "T")
        classes = classify_relevance(g)
        assert classes[g.index_of("X")] == RelevanceClass.IRRELEVANT

    @pytest.mark.parametrize("seed", range(10))
    def test_strong_iff_boundary(self, seed):
        rng = np.random.default_rng(500 + seed)
        g = random_dag(rng, 7, p=0.3)
        mb = markov_boundary(g)
        for i, c in classify_relevance(g).items():
            assert (c == RelevanceClass.STRONGLY_RELEVANT) == bool(mb & (1 << i))
