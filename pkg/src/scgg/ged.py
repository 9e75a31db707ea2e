"""Graph edit distance: exact branch-and-bound and an assignment-based upper bound.

Nodes are unlabeled, so substituting one node for another is free. The
optimal edit path therefore maps ``min(n1, n2)`` node pairs and deletes or
inserts the rest; both routines search over bijections between the two graphs
padded with isolated dummy nodes to a common size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import Graph

EXACT_MAX_NODES = 10


@dataclass(frozen=True)
class EditCost:
    node_ins: float = 1.0
    node_del: float = 1.0
    edge_ins: float = 1.0
    edge_del: float = 1.0

    def __post_init__(self):
        if min(self.node_ins, self.node_del, self.edge_ins, self.edge_del) < 0:
            raise ValueError("edit costs must be non-negative")


UNIT = EditCost()


def _node_cost(n1: int, n2: int, costs: EditCost) -> float:
    return (n1 - n2) * costs.node_del if n1 >= n2 else (n2 - n1) * costs.node_ins


def _padded(g: Graph, size: int) -> np.ndarray:
    a = np.zeros((size, size), dtype=np.int64)
    for i, j in g.edges:
        a[i, j] = a[j, i] = 1
    return a


def path_cost(g1: Graph, g2: Graph, mapping, costs: EditCost = UNIT) -> float:
    """Cost of the edit path induced by a bijection of the padded node sets.

    ``mapping[u]`` is the image in ``g2`` (padded to ``max(n1, n2)`` nodes) of
    node ``u`` of ``g1`` (padded likewise).
    """
    size = max(g1.num_nodes, g2.num_nodes)
    a1 = _padded(g1, size)
    a2 = _padded(g2, size)
    perm = np.asarray(mapping)
    b = a2[np.ix_(perm, perm)]
    overlap = int(np.triu(a1 * b, 1).sum())
    return (_node_cost(g1.num_nodes, g2.num_nodes, costs)
            + costs.edge_del * (g1.num_edges - overlap)
            + costs.edge_ins * (g2.num_edges - overlap))


def _neighbor_profile(g: Graph) -> list:
    deg = g.degrees()
    nbrs = [[] for _ in range(g.num_nodes)]
    for i, j in g.edges:
        nbrs[i].append(deg[j])
        nbrs[j].append(deg[i])
    return [sorted(v, reverse=True) for v in nbrs]


def _assignment_cost_matrix(g1: Graph, g2: Graph, costs: EditCost) -> np.ndarray:
    n1, n2 = g1.num_nodes, g2.num_nodes
    d1, d2 = g1.degrees().astype(float), g2.degrees().astype(float)
    p1, p2 = _neighbor_profile(g1), _neighbor_profile(g2)
    big = 1e9
    c = np.zeros((n1 + n2, n1 + n2))

    # substitutions: half the edge edits implied by the degree gap, plus a
    # small term comparing neighbor degree profiles to break ties
    gap = d1[:, None] - d2[None, :]
    sub = np.where(gap > 0, gap * costs.edge_del, -gap * costs.edge_ins) / 2.0
    prof = np.zeros((n1, n2))
    for u in range(n1):
        for v in range(n2):
            k = min(len(p1[u]), len(p2[v]))
            if k:
                prof[u, v] = sum(abs(a - b) for a, b in zip(p1[u][:k], p2[v][:k])) / k
    sub = sub + 0.01 * prof
    # prefer the identity on equal-index nodes when all else ties
    tie = np.full((n1, n2), 1e-6)
    if n1 and n2:
        np.fill_diagonal(tie, 0.0)
    c[:n1, :n2] = sub + tie

    c[:n1, n2:] = big
    c[np.arange(n1), n2 + np.arange(n1)] = costs.node_del + costs.edge_del * d1 / 2.0
    c[n1:, :n2] = big
    c[n1 + np.arange(n2), np.arange(n2)] = costs.node_ins + costs.edge_ins * d2 / 2.0
    return c


def _assignment_mapping(g1: Graph, g2: Graph, costs: EditCost) -> np.ndarray:
    """Padded bijection derived from the optimal node assignment."""
    n1, n2 = g1.num_nodes, g2.num_nodes
    size = max(n1, n2)
    rows, cols = linear_sum_assignment(_assignment_cost_matrix(g1, g2, costs))
    mapping = np.full(size, -1, dtype=np.int64)
    used = np.zeros(size, dtype=bool)
    for r, c in zip(rows, cols):
        if r < n1 and c < n2:
            mapping[r] = c
            used[c] = True
    # any node deleted while a real node was inserted is substituted instead,
    # which never costs more for unlabeled nodes; then pair up the dummies
    free = iter(np.flatnonzero(~used).tolist())
    for u in range(size):
        if mapping[u] < 0:
            mapping[u] = next(free)
    return mapping


def _swap_search(a1: np.ndarray, a2: np.ndarray, mapping: np.ndarray, max_iter: int) -> np.ndarray:
    """Best-improvement pairwise swaps maximizing the number of preserved edges."""
    perm = mapping.copy()
    for _ in range(max_iter):
        b = a2[np.ix_(perm, perm)]
        mm = a1 @ b
        d = np.diag(mm)
        gain = mm + mm.T - d[:, None] - d[None, :] + 2 * a1 * b
        np.fill_diagonal(gain, 0)
        k = int(np.argmax(gain))
        a, c = divmod(k, gain.shape[1])
        if gain[a, c] <= 0:
            break
        perm[a], perm[c] = perm[c], perm[a]
    return perm


def approx_mapping(g1: Graph, g2: Graph, costs: EditCost = UNIT, refine: bool = True) -> np.ndarray:
    mapping = _assignment_mapping(g1, g2, costs)
    if refine and len(mapping) > 1:
        size = len(mapping)
        mapping = _swap_search(_padded(g1, size), _padded(g2, size), mapping, max_iter=4 * size)
    return mapping


def ged_approx(g1: Graph, g2: Graph, costs: EditCost = UNIT, refine: bool = True) -> float:
    """Upper bound on the edit distance.

    Nodes are matched by a Hungarian assignment over local degree-based costs;
    with ``refine`` the matching is then improved by pairwise swaps. The
    returned value is the true cost of the resulting edit path.
    """
    if g1.num_nodes == 0 and g2.num_nodes == 0:
        return 0.0
    return float(path_cost(g1, g2, approx_mapping(g1, g2, costs, refine), costs))


def ged_exact(g1: Graph, g2: Graph, costs: EditCost = UNIT) -> float:
    size = max(g1.num_nodes, g2.num_nodes)
    if size > EXACT_MAX_NODES:
        raise ValueError(f"exact GED limited to {EXACT_MAX_NODES} nodes, got {size}; use ged_approx")
    if size == 0:
        return 0.0
    a1 = [0] * size
    a2 = [0] * size
    for i, j in g1.edges:
        a1[i] |= 1 << j
        a1[j] |= 1 << i
    for i, j in g2.edges:
        a2[i] |= 1 << j
        a2[j] |= 1 << i
    deg1 = [bin(x).count("1") for x in a1]
    deg2 = [bin(x).count("1") for x in a2]
    order = sorted(range(size), key=lambda u: -deg1[u])
    c_del, c_ins = costs.edge_del, costs.edge_ins
    c_min = min(c_del, c_ins)
    base = _node_cost(g1.num_nodes, g2.num_nodes, costs)

    best = [ged_approx(g1, g2, costs) - base]
    image = [0] * size
    used = [False] * size

    def bound(k: int) -> float:
        if c_min == 0:
            return 0.0
        r1 = sorted(deg1[order[t]] for t in range(k, size))
        r2 = sorted(deg2[v] for v in range(size) if not used[v])
        l1 = sum(abs(x - y) for x, y in zip(r1, r2))
        return c_min * ((l1 + 1) // 2)

    def dfs(k: int, cost: float):
        if k == size:
            if cost < best[0]:
                best[0] = cost
            return
        if cost + bound(k) >= best[0]:
            return
        u = order[k]
        for v in range(size):
            if used[v]:
                continue
            extra = 0.0
            for t in range(k):
                w = order[t]
                e1 = (a1[u] >> w) & 1
                e2 = (a2[v] >> image[w]) & 1
                if e1 and not e2:
                    extra += c_del
                elif e2 and not e1:
                    extra += c_ins
            if cost + extra >= best[0]:
                continue
            used[v] = True
            image[u] = v
            dfs(k + 1, cost + extra)
            used[v] = False

    dfs(0, 0.0)
    return float(base + best[0])


def ged(g1: Graph, g2: Graph, costs: EditCost = UNIT) -> float:
    """Exact distance when both graphs are small enough, else the approximation."""
    if max(g1.num_nodes, g2.num_nodes) <= EXACT_MAX_NODES:
        return ged_exact(g1, g2, costs)
    return ged_approx(g1, g2, costs)


def normalized_ged(g1: Graph, g2: Graph, costs: EditCost = UNIT) -> float:
    """Edit distance divided by the mean node count of the two graphs."""
    if g1.num_nodes == 0 or g2.num_nodes == 0:
        raise ValueError("normalized GED needs non-empty graphs")
    return ged(g1, g2, costs) / ((g1.num_nodes + g2.num_nodes) / 2.0)
