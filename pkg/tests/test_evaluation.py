import numpy as np
import pytest

from scgg.baselines import isolated_complete, random_density_complete
from scgg.evaluation import (
    EvalReport,
    evaluate_completer,
    read_sweep_csv,
    split_dataset,
    task_rng,
    write_sweep_csv,
)
from scgg.graph import Graph, generate_grid, prepare_sample, reassemble

K4 = Graph(4, frozenset((i, j) for i in range(4) for j in range(i + 1, 4)))


def truth_completer(graphs, m, repetitions, seed):
    """Replays the protocol's own draws so it can hand back the hidden graph."""
    table = {}
    for gi, g in enumerate(graphs):
        for rep in range(repetitions):
            s = prepare_sample(g, m, task_rng(seed, gi, rep))
            table[s.g0] = reassemble(s)
    return lambda g0, m, rng: table[g0]


class TestEvaluate:
    def test_ground_truth_is_zero(self):
        graphs = [generate_grid(3, 3), generate_grid(2, 5), K4]
        comp = truth_completer(graphs, 2, 5, 7)
        rep = evaluate_completer(comp, graphs, 2, repetitions=5, seed=7)
        assert all(v == 0.0 for s in rep.scores.values() for v in s)
        assert rep.aggregate_mean == 0.0 and rep.aggregate_std == 0.0

    def test_isolated_on_k4(self):
        rep = evaluate_completer(isolated_complete, [K4], 1, repetitions=10, seed=0)
        assert rep.scores[0] == [0.75] * 10

    def test_single_repetition_has_zero_std(self):
        rep = evaluate_completer(random_density_complete, [generate_grid(3, 4)], 2, repetitions=1, seed=0)
        assert rep.per_graph[0][2] == 0.0

    def test_seeded(self):
        graphs = [generate_grid(3, 3), generate_grid(4, 3)]
        a = evaluate_completer(random_density_complete, graphs, 2, 3, seed=1)
        b = evaluate_completer(random_density_complete, graphs, 2, 3, seed=1)
        assert a.scores == b.scores

    def test_small_graphs_excluded(self, caplog):
        rep = evaluate_completer(isolated_complete, [Graph(2), K4], 2, repetitions=2, graph_ids=["a", "b"])
        assert list(rep.scores) == ["b"]
        assert "excluding graph a" in caplog.text

    def test_aggregate_std_is_mean_of_stds(self):
        rep = EvalReport(m=1, repetitions=2, per_graph=[(0, 0.5, 0.1), (1, 0.7, 0.3)])
        assert rep.aggregate_mean == pytest.approx(0.6)
        assert rep.aggregate_std == pytest.approx(0.2)

    def test_invalid_repetitions(self):
        with pytest.raises(ValueError):
            evaluate_completer(isolated_complete, [K4], 1, repetitions=0)


class TestSplit:
    def test_sizes(self):
        tr, te = split_dataset(list(range(10)), 0.8, 0)
        assert len(tr) == 8 and len(te) == 2

    def test_deterministic(self):
        assert split_dataset(list(range(10)), 0.8, 3) == split_dataset(list(range(10)), 0.8, 3)

    def test_partition_over_many_seeds(self):
        items = list(range(10))
        for seed in range(1000):
            tr, te = split_dataset(items, 0.8, seed)
            assert sorted(tr + te) == items and not set(tr) & set(te)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2])
    def test_invalid_fraction(self, bad):
        with pytest.raises(ValueError):
            split_dataset([1, 2, 3], bad)

    def test_too_few(self):
        with pytest.raises(ValueError):
            split_dataset([1], 0.5)


class TestCSV:
    def test_report_csv(self, tmp_path):
        rep = EvalReport(m=1, repetitions=2, per_graph=[(0, 0.5, 0.1), (1, 0.7, 0.3)])
        rep.to_csv(tmp_path / "r.csv")
        lines = (tmp_path / "r.csv").read_text().splitlines()
        assert lines == ["graph_id,mean_ged,std_ged", "0,0.500000,0.100000", "1,0.700000,0.300000",
                         "ALL,0.600000,0.200000"]

    def test_sweep_round_trip(self, tmp_path):
        rows = [{"dataset": "grid", "m": m, "method": k, "mean_ged": 0.1 * m, "std_ged": 0.01}
                for m in (1, 2) for k in ("scgg", "random")]
        write_sweep_csv(rows, tmp_path / "s.csv")
        back = read_sweep_csv(tmp_path / "s.csv")
        assert [(r["m"], r["method"]) for r in back] == [(r["m"], r["method"]) for r in rows]
        assert [r["mean_ged"] for r in back] == pytest.approx([r["mean_ged"] for r in rows])
