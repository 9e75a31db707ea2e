"""Two-phase graph completion with a trained model."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .featnet import embed
from .generator import sos_vector
from .graph import Graph


@dataclass
class GenerationTrace:
    probs: list = field(default_factory=list)    # phi per step, np arrays of length m
    samples: list = field(default_factory=list)  # 0/1 int arrays of length m
    n: int = 0

    def phase(self, step: int) -> str:
        return "inter" if step < self.n else "intra"

    def to_csv(self, path) -> None:
        m = len(self.probs[0]) if self.probs else 0
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "phase"] + [f"phi_{k}" for k in range(m)] + [f"s_{k}" for k in range(m)])
            for i, (p, s) in enumerate(zip(self.probs, self.samples)):
                w.writerow([i + 1, self.phase(i)] + [repr(float(v)) for v in p] + [int(v) for v in s])


def decode_intra(samples, n: int) -> set:
    """Intra-edges among new nodes ``n..n+m-1`` from the phase-two samples.

    Edge ``(j, p)`` with ``j < p`` exists iff the later step ``p`` set bit
    ``j``; diagonal bits are ignored.
    """
    edges = set()
    for p, s in enumerate(samples):
        for j in range(p):
            if s[j]:
                edges.add((n + j, n + p))
    return edges


def _run(g0: Graph, m: int, ckpt, draw) -> tuple[Graph, GenerationTrace]:
    model = ckpt.model
    gen = model.generator
    if g0.num_nodes < 1:
        raise ValueError("g0 must have at least one node")
    if not 1 <= m <= gen.m_max:
        raise ValueError(f"m={m} outside checkpoint capacity [1, {gen.m_max}]")
    n = g0.num_nodes
    trace = GenerationTrace(n=n)
    gen.eval()
    with torch.no_grad():
        dtype = gen.out[0].weight.dtype
        h = gen.initial_state(dtype)
        s_prev = sos_vector(m, dtype)

        def advance(r):
            nonlocal h, s_prev
            phi, h = gen.step(r, s_prev, h, m)
            p = phi.numpy().astype(np.float64)
            s = draw(p)
            trace.probs.append(p)
            trace.samples.append(s)
            s_prev = torch.as_tensor(s, dtype=dtype)
            return s

        reps = embed(g0, model.featnet, "eval")
        inter = []
        for i in range(n):
            s = advance(reps[i])
            inter.extend((i, n + l) for l in np.flatnonzero(s).tolist())
        g_prime = g0.with_nodes(m, inter)

        reps_prime = embed(g_prime, model.featnet, "eval")
        intra_samples = [advance(reps_prime[j]) for j in range(n, n + m)]
    return g_prime.with_nodes(0, decode_intra(intra_samples, n)), trace


def complete(g0: Graph, m: int, ckpt, rng: np.random.Generator) -> tuple[Graph, GenerationTrace]:
    """Sample a completion of ``g0`` with ``m`` new nodes (independent Bernoulli per entry)."""
    return _run(g0, m, ckpt, lambda p: (rng.random(p.shape[0]) < p).astype(np.int64))


def complete_greedy(g0: Graph, m: int, ckpt) -> Graph:
    """Deterministic completion: a link is added wherever its probability exceeds 0.5."""
    g, _ = _run(g0, m, ckpt, lambda p: (p > 0.5).astype(np.int64))
    return g


def make_completer(ckpt, greedy: bool = False):
    """Adapt a checkpoint to the ``(g0, m, rng) -> Graph`` completer signature."""
    if greedy:
        return lambda g0, m, rng: complete_greedy(g0, m, ckpt)
    return lambda g0, m, rng: complete(g0, m, ckpt, rng)[0]
