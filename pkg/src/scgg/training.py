"""Teacher-forced end-to-end training."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, fields
from typing import Sequence

import numpy as np
import torch

from .featnet import embed
from .generator import SCGG, sos_vector, step_loss
from .graph import Graph, PreparedSample, prepare_sample

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    m: int
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 0.003
    seed: int = 0
    resample_per_epoch: bool = False
    m_max: int | None = None
    dropout: float = 0.1

    def __post_init__(self):
        if self.m_max is None:
            self.m_max = self.m
        if self.epochs < 1 or self.batch_size < 1 or self.learning_rate <= 0:
            raise ValueError("epochs, batch_size and learning_rate must be positive")
        if not 1 <= self.m <= self.m_max:
            raise ValueError(f"need 1 <= m <= m_max, got m={self.m}, m_max={self.m_max}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class Checkpoint:
    model: SCGG
    config: TrainConfig
    epoch: int = 0
    loss_history: list = field(default_factory=list)
    numpy_rng_state: dict | None = None
    torch_rng_state: torch.Tensor | None = None

    @property
    def m_max(self) -> int:
        return self.model.m_max


def splice_representations(sample: PreparedSample, model: SCGG, mode: str = "train") -> torch.Tensor:
    """Rows ``0..n-1`` from ``embed(g0)``, rows ``n..n+m-1`` from ``embed(g_prime)``."""
    r = embed(sample.g0, model.featnet, mode)
    r_prime = embed(sample.g_prime, model.featnet, mode)
    return torch.cat([r, r_prime[sample.n:]], dim=0)


def teacher_inputs(targets: torch.Tensor) -> torch.Tensor:
    """Previous-step link vectors: sos followed by all but the last target row."""
    sos = sos_vector(targets.shape[1], dtype=targets.dtype).unsqueeze(0)
    return torch.cat([sos, targets[:-1]], dim=0)


def graph_loss(sample: PreparedSample, model: SCGG, mode: str = "train") -> torch.Tensor:
    """Average step loss over the ``n + m`` teacher-forced steps."""
    dtype = model.generator.out[0].weight.dtype
    reps = splice_representations(sample, model, mode)
    targets = torch.tensor(np.asarray(sample.targets), dtype=dtype)
    was_training = model.generator.training
    model.generator.train(mode == "train")
    try:
        phi = model.generator.sequence(reps, teacher_inputs(targets), sample.m)
    finally:
        model.generator.train(was_training)
    return step_loss(phi, targets).mean()


def batch_loss(samples: Sequence[PreparedSample], model: SCGG, mode: str = "train") -> tuple[torch.Tensor, torch.Tensor]:
    """Mean of :func:`graph_loss` over ``samples``, with one packed GRU call.

    All samples must share the same ``m``.
    """
    ms = {s.m for s in samples}
    if len(ms) != 1:
        raise ValueError(f"samples in one batch must share m, got {sorted(ms)}")
    m = ms.pop()
    dtype = model.generator.out[0].weight.dtype
    targets = [torch.tensor(np.asarray(s.targets), dtype=dtype) for s in samples]
    seqs = [(splice_representations(s, model, mode), teacher_inputs(t)) for s, t in zip(samples, targets)]
    was_training = model.generator.training
    model.generator.train(mode == "train")
    try:
        phis = model.generator.sequences(seqs, m)
    finally:
        model.generator.train(was_training)
    losses = torch.stack([step_loss(p, t).mean() for p, t in zip(phis, targets)])
    return losses.mean(), losses.detach()


def _prepare_all(graphs: Sequence[Graph], m: int, rng: np.random.Generator) -> list[PreparedSample]:
    return [prepare_sample(g, m, rng) for g in graphs]


def train(dataset: Sequence[Graph], cfg: TrainConfig, callback=None) -> Checkpoint:
    """Train a fresh model; fully determined by ``cfg.seed``.

    ``callback(epoch, mean_loss)`` is invoked after every epoch if given.
    """
    if not dataset:
        raise ValueError("nothing to train: empty dataset")
    usable = []
    for k, g in enumerate(dataset):
        if g.num_nodes <= cfg.m:
            logger.warning("skipping graph %d: %d nodes <= m=%d", k, g.num_nodes, cfg.m)
        else:
            usable.append(g)
    if not usable:
        raise ValueError(f"nothing to train: no graph has more than m={cfg.m} nodes")

    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    model = SCGG(cfg.m_max, dropout=cfg.dropout)
    model.train()
    opt = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)

    samples = _prepare_all(usable, cfg.m, rng)
    history = []
    for epoch in range(1, cfg.epochs + 1):
        if cfg.resample_per_epoch and epoch > 1:
            samples = _prepare_all(usable, cfg.m, rng)
        order = rng.permutation(len(samples))
        total = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            opt.zero_grad()
            loss, per_graph = batch_loss([samples[i] for i in batch], model, "train")
            loss.backward()
            opt.step()
            total += float(per_graph.sum())
        mean_loss = total / len(samples)
        history.append(mean_loss)
        logger.debug("epoch %d loss %.6f", epoch, mean_loss)
        if callback is not None:
            callback(epoch, mean_loss)
    logger.info("trained %d epochs, final loss %.4f", cfg.epochs, history[-1])
    model.eval()
    return Checkpoint(
        model=model,
        config=cfg,
        epoch=cfg.epochs,
        loss_history=history,
        numpy_rng_state=rng.bit_generator.state,
        torch_rng_state=torch.get_rng_state(),
    )
