from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from dscf.exceptions import DomainError
from dscf.graph.social import build_graph
from dscf.graph.walks import Node2VecPolicy, dump_walk_corpus, random_walk
from dscf.schema.schemas import TrustEdge


def graph_of(edges, n_users, directed=False):
    return build_graph([TrustEdge(source=s, target=t) for s, t in edges], n_users, directed)


@pytest.fixture
def fixture_graph():
    # user 0 has degree 3; user 5 is isolated
    return graph_of([(0, 1), (0, 2), (0, 3), (1, 2), (3, 4), (4, 1)], 6)


class TestBuildGraph:

    def test_undirected_symmetric_and_sorted(self, fixture_graph):
        np.testing.assert_array_equal(fixture_graph.neighbors(0), [1, 2, 3])
        np.testing.assert_array_equal(fixture_graph.neighbors(1), [0, 2, 4])
        assert fixture_graph.has_edge(2, 1) and fixture_graph.has_edge(1, 2)
        assert fixture_graph.degree(5) == 0

    def test_directed_keeps_direction(self):
        graph = graph_of([(0, 1), (1, 2)], 3, directed=True)
        assert graph.has_edge(0, 1) and not graph.has_edge(1, 0)
        assert graph.degree(2) == 0

    def test_duplicates_collapse(self):
        graph = graph_of([(0, 1), (1, 0), (0, 1)], 2)
        assert graph.n_edges == 2

    def test_endpoint_out_of_range(self):
        with pytest.raises(DomainError):
            graph_of([(0, 3)], 3)

    def test_degree_statistics(self, fixture_graph):
        stats = fixture_graph.degree_statistics()
        assert stats.max_degree == 3
        assert stats.isolated_users == 1


class TestRandomWalk:

    def test_legal_transitions_and_uniform_first_step(self, fixture_graph):
        rng = np.random.default_rng(2019)
        first = Counter()
        for _ in range(30000):
            walk = random_walk(fixture_graph, 0, 4, rng)
            path = (walk.root,) + walk.steps
            for a, b in zip(path, path[1:]):
                assert fixture_graph.has_edge(a, b)
            first[walk.steps[0]] += 1
        for neighbor in (1, 2, 3):
            assert abs(first[neighbor] / 30000 - 1 / 3) < 0.01

    def test_root_is_not_a_step_of_length_one(self, fixture_graph):
        walk = random_walk(fixture_graph, 0, 1, np.random.default_rng(0))
        assert len(walk.steps) == 1
        assert walk.steps[0] in (1, 2, 3)

    def test_isolated_root_is_fully_padded(self, fixture_graph):
        walk = random_walk(fixture_graph, 5, 4, np.random.default_rng(0))
        assert walk.steps == (5, 5, 5, 5)
        assert walk.padded and walk.padded_from == 0

    def test_dead_end_pads_with_last_user(self):
        graph = graph_of([(0, 1), (1, 2)], 3, directed=True)
        walk = random_walk(graph, 0, 5, np.random.default_rng(0))
        assert walk.steps == (1, 2, 2, 2, 2)
        assert walk.padded_from == 2

    @pytest.mark.parametrize("root, length", [(-1, 3), (6, 3), (0, 0)])
    def test_invalid_arguments(self, fixture_graph, root, length):
        with pytest.raises(DomainError):
            random_walk(fixture_graph, root, length, np.random.default_rng(0))

    @hypothesis_settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), root=st.integers(0, 4), length=st.integers(1, 12))
    def test_exact_length_and_determinism(self, seed, root, length):
        graph = graph_of([(0, 1), (0, 2), (0, 3), (1, 2), (3, 4), (4, 1)], 6)
        first = random_walk(graph, root, length, np.random.default_rng(seed))
        second = random_walk(graph, root, length, np.random.default_rng(seed))
        assert len(first.steps) == length
        assert first == second

    def test_node2vec_low_return_parameter_backtracks(self, fixture_graph):
        rng = np.random.default_rng(1)
        policy = Node2VecPolicy(p=0.01, q=1.0)
        backtracks = 0
        for _ in range(500):
            walk = random_walk(fixture_graph, 3, 2, rng, policy)
            backtracks += walk.steps[1] == 3
        assert backtracks > 400

    def test_node2vec_rejects_non_positive(self):
        with pytest.raises(DomainError):
            Node2VecPolicy(p=0.0)

    def test_corpus_file(self, fixture_graph, tmp_path):
        rng = np.random.default_rng(0)
        walks = [random_walk(fixture_graph, user, 3, rng) for user in range(6)]
        dump_walk_corpus(tmp_path / "walks.txt", walks, seed=0, length=3)
        lines = (tmp_path / "walks.txt").read_text().splitlines()
        assert lines[0] == "# seed=0 length=3"
        assert len(lines) == 7
        assert all(len(line.split()) == 3 for line in lines[1:])
