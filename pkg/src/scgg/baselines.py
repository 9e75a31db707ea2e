"""Reference completers sharing the ``(g0, m, rng) -> Graph`` signature."""

from __future__ import annotations

import logging

import numpy as np

from .graph import Graph

logger = logging.getLogger(__name__)


def evograph_complete(g0: Graph, m: int, rng: np.random.Generator) -> Graph:
    """EvoGraph-style upscaling, stopped once the m-th new node is attached.

    Each stage adds up to ``|E0|`` edges. One endpoint is an existing node
    drawn with probability proportional to ``degree + 1``; the other is a
    uniformly chosen new node not yet attached, as long as any remain.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    n = g0.num_nodes
    if n < 1:
        raise ValueError("g0 must have at least one node")
    if g0.num_edges == 0:
        logger.warning("edgeless g0: endpoint choice degenerates to uniform")
    stage_size = max(1, g0.num_edges)
    deg = list(g0.degrees()) + [0] * m
    edges = set(g0.edges)
    current = list(range(n))
    candidates = list(range(n, n + m))
    while candidates:
        for _ in range(stage_size):
            w = np.array([deg[v] + 1 for v in current], dtype=float)
            src = current[rng.choice(len(current), p=w / w.sum())]
            dst = candidates.pop(int(rng.integers(len(candidates))))
            edges.add((src, dst))
            deg[src] += 1
            deg[dst] += 1
            current.append(dst)
            if not candidates:
                break
    return Graph(n + m, frozenset(edges))


def random_density_complete(g0: Graph, m: int, rng: np.random.Generator) -> Graph:
    """Attach ``m`` nodes; every new pair is linked with probability equal to g0's density."""
    if m < 1:
        raise ValueError("m must be >= 1")
    n = g0.num_nodes
    p = g0.density()
    # inter pairs first (row-major over G0 nodes), then intra pairs (j < k)
    pairs = [(i, n + j) for i in range(n) for j in range(m)]
    pairs += [(n + j, n + k) for j in range(m) for k in range(j + 1, m)]
    keep = rng.random(len(pairs)) < p
    return g0.with_nodes(m, [e for e, k in zip(pairs, keep) if k])


def isolated_complete(g0: Graph, m: int, rng=None) -> Graph:
    """Add ``m`` isolated nodes."""
    return g0.with_nodes(m)


BASELINES = {
    "evograph": evograph_complete,
    "random": random_density_complete,
}
