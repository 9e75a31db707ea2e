"""Autoregressive link predictor: a GRU stack over node representations and an MLP head."""

from __future__ import annotations

import torch
from torch import nn
from torch.nn.utils.rnn import pack_sequence, pad_packed_sequence

from .featnet import OUT_DIM, FeatNet

HIDDEN = 128
LAYERS = 4
MLP_HIDDEN = 64
EPS = 1e-7


def sos_vector(m: int, dtype=torch.float32) -> torch.Tensor:
    """Start-of-sequence link vector: all ones."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return torch.ones(m, dtype=dtype)


def step_loss(phi: torch.Tensor, s: torch.Tensor) -> torch.Tensor:
    """Mean binary cross entropy over the ``m`` entries of one step."""
    if phi.shape != s.shape:
        raise ValueError(f"shape mismatch: phi {tuple(phi.shape)} vs s {tuple(s.shape)}")
    p = phi.clamp(EPS, 1.0 - EPS)
    s = s.to(p.dtype)
    return -(s * torch.log(p) + (1 - s) * torch.log1p(-p)).mean(dim=-1)


class Generator(nn.Module):
    def __init__(self, m_max: int):
        super().__init__()
        if m_max < 1:
            raise ValueError("m_max must be >= 1")
        self.m_max = m_max
        self.gru = nn.GRU(OUT_DIM + m_max, HIDDEN, num_layers=LAYERS, batch_first=True)
        self.out = nn.Sequential(
            nn.Linear(HIDDEN, MLP_HIDDEN),
            nn.ReLU(),
            nn.Linear(MLP_HIDDEN, m_max),
        )

    def initial_state(self, dtype=None) -> torch.Tensor:
        dtype = dtype or self.out[0].weight.dtype
        return torch.zeros(LAYERS, HIDDEN, dtype=dtype)

    def pad(self, s: torch.Tensor) -> torch.Tensor:
        """Zero-pad link vectors (last dim ``m``) to ``m_max``."""
        m = s.shape[-1]
        if m > self.m_max:
            raise ValueError(f"m={m} exceeds m_max={self.m_max}")
        return nn.functional.pad(s, (0, self.m_max - m))

    def _check_m(self, m: int):
        if not 1 <= m <= self.m_max:
            raise ValueError(f"m={m} outside [1, {self.m_max}]")

    def step(self, r: torch.Tensor, s_prev: torch.Tensor, h_prev: torch.Tensor, m: int):
        """One recurrence: returns (phi of length m, new hidden state of shape LAYERS x HIDDEN)."""
        self._check_m(m)
        dtype = self.out[0].weight.dtype
        x = torch.cat([r.to(dtype), self.pad(s_prev.to(dtype))]).view(1, 1, -1)
        top, h = self.gru(x, h_prev.unsqueeze(1))
        phi = torch.sigmoid(self.out(top.view(-1)))[:m]
        return phi, h.squeeze(1)

    def sequence(self, reps: torch.Tensor, s_prev: torch.Tensor, m: int, h0: torch.Tensor | None = None):
        """Teacher-forced pass over a whole sequence.

        ``reps`` is ``(T, 32)`` and ``s_prev`` is ``(T, m)`` holding the link
        vector fed at each step. Returns phi of shape ``(T, m)``.
        """
        self._check_m(m)
        dtype = self.out[0].weight.dtype
        x = torch.cat([reps.to(dtype), self.pad(s_prev.to(dtype))], dim=1).unsqueeze(0)
        if h0 is None:
            h0 = self.initial_state(dtype)
        top, _ = self.gru(x, h0.unsqueeze(1))
        return torch.sigmoid(self.out(top.squeeze(0)))[:, :m]

    def sequences(self, batch, m: int) -> list:
        """Teacher-forced pass over several sequences at once.

        ``batch`` holds ``(reps, s_prev)`` pairs as in :meth:`sequence`; the
        sequences are packed so one GRU call serves the whole minibatch. All
        start from the zero state.
        """
        self._check_m(m)
        dtype = self.out[0].weight.dtype
        xs = [torch.cat([r.to(dtype), self.pad(s.to(dtype))], dim=1) for r, s in batch]
        top, lengths = pad_packed_sequence(self.gru(pack_sequence(xs, enforce_sorted=False))[0], batch_first=True)
        phi = torch.sigmoid(self.out(top))[:, :, :m]
        return [phi[k, :int(n)] for k, n in enumerate(lengths)]


class SCGG(nn.Module):
    """Feature network plus generator, trained jointly."""

    def __init__(self, m_max: int, dropout: float = 0.1):
        super().__init__()
        self.featnet = FeatNet(dropout=dropout)
        self.generator = Generator(m_max)

    @property
    def m_max(self) -> int:
        return self.generator.m_max
