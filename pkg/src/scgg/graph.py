"""Graph container, grid generator, edge-list I/O and training-sample preparation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class ParseError(ValueError):
    """Malformed edge-list file."""

    def __init__(self, msg: str, lineno: int):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _norm_edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..num_nodes-1``.

    Edges are stored as a frozenset of ``(i, j)`` pairs with ``i < j``.
    """

    num_nodes: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.num_nodes < 0:
            raise ValueError("num_nodes must be non-negative")
        norm = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if not (0 <= i < self.num_nodes and 0 <= j < self.num_nodes):
                raise ValueError(f"edge ({i}, {j}) out of range for {self.num_nodes} nodes")
            norm.add(_norm_edge(i, j))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, num_nodes: int, edges: Iterable[tuple[int, int]] = ()) -> "Graph":
        return cls(num_nodes, frozenset(edges))

    @classmethod
    def from_adjacency(cls, adj) -> "Graph":
        adj = np.asarray(adj)
        if adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be square")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        iu, ju = np.nonzero(np.triu(adj, 1))
        return cls(adj.shape[0], frozenset(zip(iu.tolist(), ju.tolist())))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return _norm_edge(i, j) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency(self, dtype=np.float64) -> np.ndarray:
        a = np.zeros((self.num_nodes, self.num_nodes), dtype=dtype)
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1
        return a

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.num_nodes, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def density(self) -> float:
        pairs = self.num_nodes * (self.num_nodes - 1) / 2
        return self.num_edges / pairs if pairs else 0.0

    def relabel(self, order: Sequence[int]) -> "Graph":
        """Induced subgraph on ``order``; node ``order[k]`` becomes ``k``."""
        pos = {int(v): k for k, v in enumerate(order)}
        if len(pos) != len(order):
            raise ValueError("order contains duplicates")
        edges = [(pos[i], pos[j]) for i, j in self.edges if i in pos and j in pos]
        return Graph(len(order), frozenset(_norm_edge(*e) for e in edges))

    def with_nodes(self, extra: int, edges: Iterable[tuple[int, int]] = ()) -> "Graph":
        """Copy with ``extra`` nodes appended and ``edges`` added."""
        return Graph(self.num_nodes + extra, self.edges | frozenset(_norm_edge(*e) for e in edges))

    def __repr__(self):
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"


def generate_grid(rows: int, cols: int) -> Graph:
    if rows < 1 or cols < 1:
        raise ValueError(f"grid dimensions must be positive, got {rows}x{cols}")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, frozenset(edges))


# -- edge-list files --------------------------------------------------------

def parse_edge_list(text: str) -> list[Graph]:
    graphs: list[Graph] = []
    cur_n: int | None = None
    cur_edges: list[tuple[int, int]] = []
    seen: set = set()
    open_block = False

    def flush():
        if open_block:
            if cur_n is None:
                raise ParseError("graph block without n= line", lineno)
            graphs.append(Graph(cur_n, frozenset(cur_edges)))

    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#graph"):
            flush()
            open_block, cur_n, cur_edges, seen = True, None, [], set()
            continue
        if line.startswith("n="):
            if open_block and cur_n is not None:
                raise ParseError("duplicate n= line", lineno)
            try:
                cur_n = int(line[2:])
            except ValueError:
                raise ParseError(f"bad node count {line[2:]!r}", lineno) from None
            if cur_n < 0:
                raise ParseError("negative node count", lineno)
            open_block = True
            continue
        if cur_n is None:
            raise ParseError("edge before n= line", lineno)
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected '<i> <j>', got {line!r}", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer node index in {line!r}", lineno) from None
        if i == j:
            raise ParseError(f"self-loop on node {i}", lineno)
        if not (0 <= i < cur_n and 0 <= j < cur_n):
            raise ParseError(f"node index out of range [0, {cur_n})", lineno)
        e = _norm_edge(i, j)
        if e in seen:
            raise ParseError(f"duplicate edge {e}", lineno)
        seen.add(e)
        cur_edges.append(e)
    flush()
    return graphs


def format_edge_list(graphs: Sequence[Graph]) -> str:
    lines = []
    for k, g in enumerate(graphs):
        lines.append(f"#graph {k}")
        lines.append(f"n={g.num_nodes}")
        lines.extend(f"{i} {j}" for i, j in g.sorted_edges())
    return "\n".join(lines) + ("\n" if lines else "")


def load_edge_list(path) -> list[Graph]:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"))


def save_edge_list(graphs: Sequence[Graph], path) -> None:
    Path(path).write_text(format_edge_list(graphs), encoding="utf-8")


# -- sample preparation -----------------------------------------------------

@dataclass(frozen=True)
class Partition:
    kept: tuple    # original ids in pi_n order
    removed: tuple  # original ids in pi_m order

    @property
    def n(self) -> int:
        return len(self.kept)

    @property
    def m(self) -> int:
        return len(self.removed)


@dataclass(frozen=True)
class PreparedSample:
    """One training instance.

    ``targets`` is an ``(n+m, m)`` 0/1 array: row ``i < n`` holds the links of
    G0 node ``i`` to the new nodes, row ``n+j`` the links of new node ``j`` to
    the other new nodes.
    """

    g0: Graph
    g_prime: Graph
    targets: np.ndarray
    partition: Partition

    @property
    def n(self) -> int:
        return self.g0.num_nodes

    @property
    def m(self) -> int:
        return self.targets.shape[1]


def sample_from_partition(g: Graph, partition: Partition) -> PreparedSample:
    order = list(partition.kept) + list(partition.removed)
    full = g.relabel(order)
    n, m = partition.n, partition.m
    adj = full.adjacency(dtype=np.int8)
    targets = adj[:, n:].copy()
    targets.setflags(write=False)
    g_prime = Graph(n + m, frozenset(e for e in full.edges if e[0] < n))
    return PreparedSample(full.relabel(range(n)), g_prime, targets, partition)


def prepare_sample(g: Graph, m: int, rng: np.random.Generator) -> PreparedSample:
    if not 1 <= m < g.num_nodes:
        raise ValueError(f"need 1 <= m < num_nodes, got m={m}, num_nodes={g.num_nodes}")
    perm = rng.permutation(g.num_nodes)
    removed = perm[:m]
    kept = perm[m:]
    # kept/removed are already uniformly ordered by the permutation; reshuffle
    # kept independently so pi_n does not depend on the removal draw
    kept = rng.permutation(kept)
    part = Partition(tuple(int(v) for v in kept), tuple(int(v) for v in removed))
    return sample_from_partition(g, part)


def reassemble(sample: PreparedSample) -> Graph:
    """Rebuild the full (relabeled) graph from ``g_prime`` and the intra targets."""
    n, m = sample.n, sample.m
    intra = np.asarray(sample.targets[n:])
    if not np.array_equal(intra, intra.T):
        raise ValueError("intra-link targets are not symmetric")
    if np.any(np.diag(intra)):
        raise ValueError("intra-link targets contain a self-loop")
    iu, ju = np.nonzero(np.triu(intra, 1))
    return sample.g_prime.with_nodes(0, [(n + a, n + b) for a, b in zip(iu.tolist(), ju.tolist())])


def restore_original_labels(g: Graph, partition: Partition) -> Graph:
    """Map a graph over sequence positions back to the partition's original ids."""
    order = list(partition.kept) + list(partition.removed)
    return Graph(g.num_nodes, frozenset(_norm_edge(order[i], order[j]) for i, j in g.edges))


def graph_stats(graphs: Sequence[Graph]) -> dict:
    """Dataset statistics in the column order min/max/avg/std nodes, avg sparsity, count."""
    if not graphs:
        return dict(min_nodes=0, max_nodes=0, avg_nodes=0.0, std_nodes=0.0, avg_sparsity=0.0, num_graphs=0)
    sizes = np.array([g.num_nodes for g in graphs], dtype=float)
    sparsity = np.array([1.0 - g.density() for g in graphs])
    return dict(
        min_nodes=int(sizes.min()),
        max_nodes=int(sizes.max()),
        avg_nodes=float(sizes.mean()),
        std_nodes=float(sizes.std()),
        avg_sparsity=float(sparsity.mean()),
        num_graphs=len(graphs),
    )
