"""Graph feature learning network: two GCN layers followed by one Transformer encoder layer.

The final node representation is the row-wise concatenation of the GCN output
and the Transformer output.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from .graph import Graph

IN_DIM = 2
GCN_DIM = 16
N_HEADS = 8
FF_DIM = 64
OUT_DIM = 2 * GCN_DIM


def initial_features(g: Graph) -> np.ndarray:
    """Structure-only input features: ``[1, degree / max(1, max degree)]`` per node."""
    deg = g.degrees().astype(np.float64)
    scale = max(1.0, float(deg.max())) if g.num_nodes else 1.0
    x = np.ones((g.num_nodes, IN_DIM), dtype=np.float64)
    x[:, 1] = deg / scale
    return x


def normalized_adjacency(g: Graph) -> np.ndarray:
    """``D^-1/2 (A + I) D^-1/2`` with degrees taken from ``A + I``."""
    a = g.adjacency() + np.eye(g.num_nodes)
    d = 1.0 / np.sqrt(a.sum(axis=1))
    return a * d[:, None] * d[None, :]


def gcn_layer(x: torch.Tensor, a_hat: torch.Tensor, w: torch.Tensor, activation=torch.relu) -> torch.Tensor:
    if x.shape[0] != a_hat.shape[0]:
        raise ValueError(f"feature rows {x.shape[0]} != node count {a_hat.shape[0]}")
    if x.shape[1] != w.shape[0]:
        raise ValueError(f"feature width {x.shape[1]} != weight rows {w.shape[0]}")
    out = a_hat @ x @ w
    return activation(out) if activation is not None else out


class FeatNet(nn.Module):
    def __init__(self, dropout: float = 0.1):
        super().__init__()
        self.w1 = nn.Parameter(torch.empty(IN_DIM, GCN_DIM))
        self.w2 = nn.Parameter(torch.empty(GCN_DIM, GCN_DIM))
        self.norm = nn.BatchNorm1d(GCN_DIM)
        self.encoder = nn.TransformerEncoderLayer(
            d_model=GCN_DIM,
            nhead=N_HEADS,
            dim_feedforward=FF_DIM,
            dropout=dropout,
            batch_first=True,
        )
        nn.init.xavier_uniform_(self.w1)
        nn.init.xavier_uniform_(self.w2)

    def batch_norm(self, h: torch.Tensor) -> torch.Tensor:
        """Normalize with the statistics of the node rows in this call, in both modes.

        Running statistics are still tracked during training but never used.
        """
        mean = h.mean(dim=0)
        var = h.var(dim=0, unbiased=False)
        if self.training and h.shape[0] > 1:
            with torch.no_grad():
                mom = self.norm.momentum
                self.norm.running_mean.mul_(1 - mom).add_(mom * mean.to(self.norm.running_mean.dtype))
                unbiased = var * h.shape[0] / (h.shape[0] - 1)
                self.norm.running_var.mul_(1 - mom).add_(mom * unbiased.to(self.norm.running_var.dtype))
                self.norm.num_batches_tracked.add_(1)
        return (h - mean) / torch.sqrt(var + self.norm.eps) * self.norm.weight + self.norm.bias

    def gcn(self, x: torch.Tensor, a_hat: torch.Tensor) -> torch.Tensor:
        h = gcn_layer(x, a_hat, self.w1)
        h = self.batch_norm(h)
        return gcn_layer(h, a_hat, self.w2)

    def transformer_encode(self, x: torch.Tensor) -> torch.Tensor:
        if x.shape[-1] != GCN_DIM:
            raise ValueError(f"transformer input width must be {GCN_DIM}, got {x.shape[-1]}")
        return self.encoder(x.unsqueeze(0)).squeeze(0)

    def forward(self, g: Graph) -> torch.Tensor:
        if g.num_nodes < 1:
            raise ValueError("cannot embed an empty graph")
        dtype = self.w1.dtype
        x = torch.as_tensor(initial_features(g), dtype=dtype)
        a_hat = torch.as_tensor(normalized_adjacency(g), dtype=dtype)
        h = self.gcn(x, a_hat)
        t = self.transformer_encode(h)
        return torch.cat([h, t], dim=1)


def embed(g: Graph, featnet: FeatNet, mode: str = "eval") -> torch.Tensor:
    """Node representations (``num_nodes x 32``) in the requested mode.

    The module's own train/eval flag is restored afterwards.
    """
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    was_training = featnet.training
    featnet.train(mode == "train")
    try:
        if mode == "eval":
            with torch.no_grad():
                return featnet(g)
        return featnet(g)
    finally:
        featnet.train(was_training)
