import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scgg.graph import (
    Graph,
    ParseError,
    format_edge_list,
    generate_grid,
    graph_stats,
    load_edge_list,
    parse_edge_list,
    prepare_sample,
    reassemble,
    restore_original_labels,
    save_edge_list,
)


def K(n):
    return Graph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))


def P(n):
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def gnp(n, p, seed):
    rng = np.random.default_rng(seed)
    return Graph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p))


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.num_nodes))
    h.add_edges_from(g.edges)
    return h


class TestGraph:
    def test_normalizes_edges(self):
        g = Graph(3, frozenset([(1, 0), (2, 1)]))
        assert g.edges == {(0, 1), (1, 2)}
        assert g.has_edge(1, 0)

    def test_rejects_self_loop_and_range(self):
        with pytest.raises(ValueError):
            Graph(2, frozenset([(1, 1)]))
        with pytest.raises(ValueError):
            Graph(2, frozenset([(0, 2)]))

    def test_duplicate_orientation_collapses(self):
        assert Graph.from_edges(2, [(0, 1), (1, 0)]).num_edges == 1

    def test_relabel_is_induced_subgraph(self):
        g = P(4)
        assert g.relabel([3, 2, 0]).edges == {(0, 1)}


class TestGrid:
    @pytest.mark.parametrize("rows,cols,n,e", [(1, 1, 1, 0), (5, 5, 25, 40), (2, 3, 6, 7)])
    def test_counts(self, rows, cols, n, e):
        g = generate_grid(rows, cols)
        assert (g.num_nodes, g.num_edges) == (n, e)

    @pytest.mark.parametrize("rows,cols", [(0, 3), (3, 0), (-1, 2)])
    def test_invalid(self, rows, cols):
        with pytest.raises(ValueError):
            generate_grid(rows, cols)

    @given(st.integers(2, 12), st.integers(2, 12))
    def test_degrees_and_closed_forms(self, rows, cols):
        g = generate_grid(rows, cols)
        assert g.num_nodes == rows * cols
        assert g.num_edges == rows * (cols - 1) + cols * (rows - 1)
        assert set(g.degrees().tolist()) <= {2, 3, 4}

    def test_matches_networkx_lattice(self):
        assert nx.is_isomorphic(to_nx(generate_grid(4, 6)), nx.grid_2d_graph(4, 6))


class TestEdgeList:
    def test_empty(self):
        assert parse_edge_list("") == []

    def test_path(self):
        (g,) = parse_edge_list("n=3\n0 1\n1 2\n")
        assert g == P(3)

    def test_headers_and_comments(self):
        text = "% a comment\n#graph 0\nn=2\n0 1 % trailing\n#graph 1\nn=1\n"
        gs = parse_edge_list(text)
        assert [g.num_nodes for g in gs] == [2, 1]
        assert gs[0].edges == {(0, 1)}

    @pytest.mark.parametrize("text,lineno", [
        ("n=3\n0 1\n1 x\n", 3),
        ("n=3\n0 3\n", 2),
        ("#graph 0\nn=3\n\n2 2\n", 4),
        ("0 1\n", 1),
        ("n=3\n0 1 2\n", 2),
        ("n=3\n0 1\n1 0\n", 3),
    ])
    def test_parse_errors_carry_line(self, text, lineno):
        with pytest.raises(ParseError) as err:
            parse_edge_list(text)
        assert err.value.lineno == lineno

    def test_round_trip_byte_identical(self, tmp_path):
        graphs = [generate_grid(3, 4), K(4), Graph(3), gnp(9, 0.4, 1)]
        p = tmp_path / "g.txt"
        save_edge_list(graphs, p)
        loaded = load_edge_list(p)
        assert loaded == graphs
        q = tmp_path / "h.txt"
        save_edge_list(loaded, q)
        assert p.read_bytes() == q.read_bytes()

    def test_canonical_text(self):
        assert format_edge_list([P(3)]) == "#graph 0\nn=3\n0 1\n1 2\n"


class TestPrepareSample:
    def test_k3(self):
        s = prepare_sample(K(3), 1, np.random.default_rng(0))
        assert s.g0 == K(2)
        assert s.targets.tolist() == [[1], [1], [0]]

    def test_single_node_g0(self):
        g = gnp(6, 0.5, 3)
        s = prepare_sample(g, 5, np.random.default_rng(1))
        assert s.g0.num_nodes == 1

    @pytest.mark.parametrize("m", [0, 4, -1])
    def test_invalid_m(self, m):
        with pytest.raises(ValueError):
            prepare_sample(P(4), m, np.random.default_rng(0))

    def test_deterministic(self):
        g = gnp(10, 0.3, 0)
        a = prepare_sample(g, 3, np.random.default_rng(7))
        b = prepare_sample(g, 3, np.random.default_rng(7))
        assert a.partition == b.partition
        assert np.array_equal(a.targets, b.targets)

    @pytest.mark.parametrize("seed", range(100))
    def test_p4_reassembly(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 4))
        s = prepare_sample(P(4), m, rng)
        check_invariants(P(4), s)
        assert nx.is_isomorphic(to_nx(reassemble(s)), to_nx(P(4)))

    def test_removed_set_roughly_uniform(self):
        rng = np.random.default_rng(0)
        counts = np.zeros(5)
        for _ in range(2000):
            s = prepare_sample(P(5), 1, rng)
            counts[s.partition.removed[0]] += 1
        assert counts.min() > 330 and counts.max() < 470


def check_invariants(g, s):
    n, m = s.n, s.m
    assert s.g_prime.num_nodes == n + m
    assert s.g0 == s.g_prime.relabel(range(n))
    assert all(i < n for i, _ in s.g_prime.edges)
    t = np.asarray(s.targets)
    assert t.shape == (n + m, m)
    assert set(np.unique(t)) <= {0, 1}
    assert np.array_equal(t[n:], t[n:].T)
    assert not np.diag(t[n:]).any()
    for i in range(n):
        for l in range(m):
            assert t[i, l] == s.g_prime.has_edge(i, n + l)
    intra = int(np.triu(t[n:], 1).sum())
    assert s.g_prime.num_edges == g.num_edges - intra
    assert sorted(s.partition.kept + s.partition.removed) == list(range(g.num_nodes))


class TestReassemble:
    def test_k3(self):
        s = prepare_sample(K(3), 1, np.random.default_rng(4))
        assert nx.is_isomorphic(to_nx(reassemble(s)), to_nx(K(3)))

    def test_no_intra_edges_leaves_g_prime(self):
        g = Graph(5, frozenset([(0, 1), (1, 2), (2, 3)]))
        s = prepare_sample(g, 1, np.random.default_rng(0))
        assert reassemble(s) == s.g_prime

    @pytest.mark.parametrize("seed", range(30))
    def test_random_graph_exact_after_inverse_relabel(self, seed):
        rng = np.random.default_rng(seed)
        g = gnp(8, 0.4, seed)
        m = int(rng.integers(1, 4))
        s = prepare_sample(g, m, rng)
        check_invariants(g, s)
        assert restore_original_labels(reassemble(s), s.partition) == g

    def test_asymmetric_targets_rejected(self):
        s = prepare_sample(K(4), 2, np.random.default_rng(0))
        bad = np.array(s.targets)
        bad[s.n, 1] = 0
        broken = type(s)(s.g0, s.g_prime, bad, s.partition)
        with pytest.raises(ValueError):
            reassemble(broken)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.sampled_from([0.2, 0.5]), st.integers(0, 10_000), st.data())
def test_round_trip_property(n, p, seed, data):
    g = gnp(n, p, seed)
    m = data.draw(st.integers(1, n - 1))
    s = prepare_sample(g, m, np.random.default_rng(seed))
    check_invariants(g, s)
    assert restore_original_labels(reassemble(s), s.partition) == g


def test_stats():
    st_ = graph_stats([generate_grid(5, 5), generate_grid(19, 19)])
    assert (st_["min_nodes"], st_["max_nodes"]) == (25, 361)
    assert st_["avg_nodes"] == pytest.approx(193.0)
    assert graph_stats([])["num_graphs"] == 0
