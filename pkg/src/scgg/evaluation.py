"""Completion-evaluation protocol and report serialization."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .ged import EditCost, UNIT, normalized_ged
from .graph import Graph, prepare_sample, reassemble

logger = logging.getLogger(__name__)

Completer = Callable[[Graph, int, np.random.Generator], Graph]


@dataclass
class EvalReport:
    m: int
    repetitions: int
    per_graph: list = field(default_factory=list)  # (graph id, mean, std)
    scores: dict = field(default_factory=dict)     # graph id -> per-repetition scores

    @property
    def aggregate_mean(self) -> float:
        return float(np.mean([r[1] for r in self.per_graph])) if self.per_graph else float("nan")

    @property
    def aggregate_std(self) -> float:
        # mean of the per-graph standard deviations, not a pooled std
        return float(np.mean([r[2] for r in self.per_graph])) if self.per_graph else float("nan")

    def to_csv(self, path) -> None:
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["graph_id", "mean_ged", "std_ged"])
            for gid, mean, std in self.per_graph:
                w.writerow([gid, f"{mean:.6f}", f"{std:.6f}"])
            w.writerow(["ALL", f"{self.aggregate_mean:.6f}", f"{self.aggregate_std:.6f}"])


def split_dataset(graphs: Sequence, train_frac: float = 0.8, seed: int = 0) -> tuple[list, list]:
    if len(graphs) < 2:
        raise ValueError("need at least two graphs to split")
    if not 0.0 < train_frac < 1.0:
        raise ValueError("train_frac must be in (0, 1)")
    perm = np.random.default_rng(seed).permutation(len(graphs))
    n_train = min(max(int(round(train_frac * len(graphs))), 1), len(graphs) - 1)
    return [graphs[i] for i in perm[:n_train]], [graphs[i] for i in perm[n_train:]]


def task_rng(seed: int, graph_idx: int, rep: int) -> np.random.Generator:
    """Independent stream per (graph, repetition) so results do not depend on task order."""
    return np.random.default_rng(np.random.SeedSequence([seed, graph_idx, rep]))


def evaluate_completer(
    completer: Completer,
    test_graphs: Sequence[Graph],
    m: int,
    repetitions: int = 10,
    seed: int = 0,
    costs: EditCost = UNIT,
    graph_ids: Sequence | None = None,
) -> EvalReport:
    """Remove ``m`` random nodes from each test graph, complete, and score against the original."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    ids = list(graph_ids) if graph_ids is not None else list(range(len(test_graphs)))
    report = EvalReport(m=m, repetitions=repetitions)
    for gi, (gid, g) in enumerate(zip(ids, test_graphs)):
        if g.num_nodes <= m:
            logger.warning("excluding graph %s: %d nodes <= m=%d", gid, g.num_nodes, m)
            continue
        scores = []
        for rep in range(repetitions):
            rng = task_rng(seed, gi, rep)
            sample = prepare_sample(g, m, rng)
            truth = reassemble(sample)
            out = completer(sample.g0, m, rng)
            scores.append(normalized_ged(out, truth, costs))
        report.scores[gid] = scores
        report.per_graph.append((gid, float(np.mean(scores)), float(np.std(scores))))
    return report


def write_sweep_csv(rows: Sequence[dict], path) -> None:
    """Rows with keys dataset, m, method, mean_ged, std_ged."""
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dataset", "m", "method", "mean_ged", "std_ged"])
        for r in rows:
            w.writerow([r["dataset"], r["m"], r["method"], f"{r['mean_ged']:.6f}", f"{r['std_ged']:.6f}"])


def read_sweep_csv(path) -> list[dict]:
    with open(Path(path), newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        r["m"] = int(r["m"])
        r["mean_ged"] = float(r["mean_ged"])
        r["std_ged"] = float(r["std_ged"])
    return rows
