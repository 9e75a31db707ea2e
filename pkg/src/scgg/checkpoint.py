"""Binary checkpoint container.

Byte layout (all integers little-endian)::

    offset  size   field
    0       8      magic b"SCGGCKPT"
    8       4      u32 format version (currently 1)
    12      4      u32 header length H
    16      H      UTF-8 JSON header, keys sorted, no whitespace
    16+H    ...    raw tensor blocks, in header["tensors"] order
    end-4   4      u32 CRC-32 of every preceding byte

Each ``header["tensors"]`` entry gives ``name``, ``dtype``, ``shape``,
``offset`` (relative to the start of the block area) and ``nbytes``. Model
parameters and buffers use their ``state_dict`` names; the torch RNG state is
stored under ``__torch_rng__``.
"""

from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path

import numpy as np
import torch

from .generator import SCGG
from .training import Checkpoint, TrainConfig

MAGIC = b"SCGGCKPT"
VERSION = 1
SCHEMA = "scgg.checkpoint/1"
_RNG_KEY = "__torch_rng__"

_DTYPES = {
    torch.float32: "<f4",
    torch.float64: "<f8",
    torch.int64: "<i8",
    torch.uint8: "|u1",
}
_TORCH_DTYPES = {v: k for k, v in _DTYPES.items()}


class CheckpointError(RuntimeError):
    pass


def _tensor_bytes(t: torch.Tensor) -> tuple[str, bytes]:
    if t.dtype not in _DTYPES:
        raise CheckpointError(f"unsupported dtype {t.dtype}")
    code = _DTYPES[t.dtype]
    arr = np.ascontiguousarray(t.detach().cpu().numpy()).astype(code, copy=False)
    return code, arr.tobytes()


def dumps(ckpt: Checkpoint) -> bytes:
    tensors = dict(ckpt.model.state_dict())
    if ckpt.torch_rng_state is not None:
        tensors[_RNG_KEY] = ckpt.torch_rng_state
    table, blocks, offset = [], [], 0
    for name, t in tensors.items():
        code, raw = _tensor_bytes(t)
        table.append({"name": name, "dtype": code, "shape": list(t.shape), "offset": offset, "nbytes": len(raw)})
        blocks.append(raw)
        offset += len(raw)
    header = {
        "schema": SCHEMA,
        "config": ckpt.config.to_dict(),
        "epoch": ckpt.epoch,
        "loss_history": list(ckpt.loss_history),
        "numpy_rng": ckpt.numpy_rng_state,
        "tensors": table,
    }
    hbytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    body = MAGIC + struct.pack("<II", VERSION, len(hbytes)) + hbytes + b"".join(blocks)
    return body + struct.pack("<I", zlib.crc32(body))


def loads(data: bytes) -> Checkpoint:
    if len(data) < 20 or data[:8] != MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic)")
    version, hlen = struct.unpack("<II", data[8:16])
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    (crc,) = struct.unpack("<I", data[-4:])
    if zlib.crc32(data[:-4]) != crc:
        raise CheckpointError("corrupt checkpoint (checksum mismatch or truncated)")
    try:
        header = json.loads(data[16:16 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"corrupt checkpoint header: {exc}") from None
    if header.get("schema") != SCHEMA:
        raise CheckpointError(f"unknown schema {header.get('schema')!r}")

    base = 16 + hlen
    area_end = len(data) - 4
    tensors = {}
    for entry in header["tensors"]:
        start = base + entry["offset"]
        stop = start + entry["nbytes"]
        if stop > area_end:
            raise CheckpointError(f"tensor {entry['name']} runs past end of file")
        arr = np.frombuffer(data[start:stop], dtype=entry["dtype"]).reshape(entry["shape"])
        tensors[entry["name"]] = torch.from_numpy(arr.copy()).to(_TORCH_DTYPES[entry["dtype"]])

    cfg = TrainConfig.from_dict(header["config"])
    rng_state = tensors.pop(_RNG_KEY, None)
    model = SCGG(cfg.m_max, dropout=cfg.dropout)
    if tensors and next(iter(tensors.values())).dtype == torch.float64:
        model.double()
    try:
        model.load_state_dict(tensors, strict=True)
    except RuntimeError as exc:
        raise CheckpointError(f"parameter mismatch: {exc}") from None
    model.eval()
    return Checkpoint(
        model=model,
        config=cfg,
        epoch=header["epoch"],
        loss_history=header["loss_history"],
        numpy_rng_state=header["numpy_rng"],
        torch_rng_state=rng_state,
    )


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    Path(path).write_bytes(dumps(ckpt))


def load_checkpoint(path) -> Checkpoint:
    return loads(Path(path).read_bytes())


def untrained_checkpoint(m_max: int, seed: int = 0, dropout: float = 0.1) -> Checkpoint:
    """Randomly initialized model wrapped as a checkpoint (for tests and smoke runs)."""
    torch.manual_seed(seed)
    model = SCGG(m_max, dropout=dropout)
    model.eval()
    return Checkpoint(model=model, config=TrainConfig(m=m_max, m_max=m_max, seed=seed, dropout=dropout))
