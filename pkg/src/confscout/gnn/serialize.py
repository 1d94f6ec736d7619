"""Binary model container.

Layout (little-endian): 8-byte magic, format version, feature-schema
version, hidden width, output width, layer count (u32 each), batch-norm
eps and momentum (f64), portfolio config ids (i64 x n_out), tensor count
(u32), then per tensor: name length (u16), UTF-8 name, ndim (u8), dims
(u64 each), float64 data.
"""

from __future__ import annotations

import struct

import numpy as np

from .model import GnnModel

MAGIC = b"CSGNN\x00\x01\x00"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


class TruncatedPayloadError(ModelFormatError):
    pass


def save_model(model: GnnModel) -> bytes:
    parts = [
        MAGIC,
        struct.pack("<5I", FORMAT_VERSION, model.schema_version, model.hidden, model.n_out, model.n_layers),
        struct.pack("<2d", model.bn_eps, model.bn_momentum),
        np.asarray(model.config_ids, dtype="<i8").tobytes(),
    ]
    tensors = [("p:" + k, v) for k, v in model.params.items()] + [("b:" + k, v) for k, v in model.buffers.items()]
    parts.append(struct.pack("<I", len(tensors)))
    for name, arr in tensors:
        raw = name.encode("utf-8")
        arr = np.asarray(arr, dtype="<f8")
        parts.append(struct.pack("<HB", len(raw), arr.ndim) + raw)
        parts.append(struct.pack(f"<{arr.ndim}Q", *arr.shape))
        parts.append(arr.tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedPayloadError(f"payload truncated at byte {len(self.data)} (needed {self.pos + n})")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def load_model(data: bytes) -> GnnModel:
    r = _Reader(data)
    magic = r.take(len(MAGIC)) if len(data) >= len(MAGIC) else data
    if magic != MAGIC:
        raise ModelFormatError("not a model payload (bad magic header)")
    version, schema, hidden, n_out, n_layers = r.unpack("<5I")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {version}")
    eps, momentum = r.unpack("<2d")
    config_ids = np.frombuffer(r.take(8 * n_out), dtype="<i8").tolist()
    (n_tensors,) = r.unpack("<I")
    params, buffers = {}, {}
    for _ in range(n_tensors):
        name_len, ndim = r.unpack("<HB")
        name = r.take(name_len).decode("utf-8")
        shape = r.unpack(f"<{ndim}Q")
        count = int(np.prod(shape, dtype=np.int64))
        arr = np.frombuffer(r.take(8 * count), dtype="<f8").reshape(shape).astype(np.float64)
        kind, key = name.split(":", 1)
        (params if kind == "p" else buffers)[key] = arr
    if r.pos != len(data):
        raise ModelFormatError(f"{len(data) - r.pos} trailing bytes after model payload")
    return GnnModel(hidden, n_out, params, buffers, eps, momentum, schema, n_layers, config_ids)
