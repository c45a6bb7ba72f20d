"""Communication layer: top-k compression, wire accounting, transfer timing.

Byte counts are modeled, not measured: a dense payload costs 8 bytes per
coordinate, a sparse payload 8 + 4 (value plus index), both inflated by the
protocol's per-byte framing factor and topped with a per-message overhead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import Gradient

BYTES_PER_VALUE = 8
BYTES_PER_INDEX = 4


@dataclass(frozen=True)
class LinkProfile:
    latency_ms: float
    bandwidth_bytes_per_ms: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.latency_ms) and self.latency_ms >= 0):
            raise ValueError("latency_ms must be finite and nonnegative")
        if not (np.isfinite(self.bandwidth_bytes_per_ms) and self.bandwidth_bytes_per_ms > 0):
            raise ValueError("bandwidth_bytes_per_ms must be finite and positive")


@dataclass(frozen=True)
class ProtocolProfile:
    name: str
    per_message_overhead_bytes: int
    handshake_ms: float
    per_byte_factor: float

    def __post_init__(self) -> None:
        if self.per_message_overhead_bytes < 0:
            raise ValueError("per_message_overhead_bytes must be >= 0")
        if not (np.isfinite(self.handshake_ms) and self.handshake_ms >= 0):
            raise ValueError("handshake_ms must be finite and nonnegative")
        if not (np.isfinite(self.per_byte_factor) and self.per_byte_factor >= 1.0):
            raise ValueError("per_byte_factor must be finite and >= 1")


GRPC_LIKE = ProtocolProfile("grpc-like", per_message_overhead_bytes=128, handshake_ms=2.0, per_byte_factor=1.02)
QUIC_LIKE = ProtocolProfile("quic-like", per_message_overhead_bytes=64, handshake_ms=0.5, per_byte_factor=1.01)
PROTOCOL_PRESETS = {p.name: p for p in (GRPC_LIKE, QUIC_LIKE)}


@dataclass
class SparseUpdate:
    """Top-k selection of a dense vector: ascending indices plus their values."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self) -> None:
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.indices.shape != self.values.shape or self.indices.ndim != 1:
            raise ValueError("indices and values must be 1-D and equal length")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if len(self.indices):
            if self.indices[0] < 0 or self.indices[-1] >= self.dim:
                raise ValueError("indices out of range")
            if np.any(np.diff(self.indices) <= 0):
                raise ValueError("indices must be strictly ascending")


@dataclass(frozen=True)
class DensePayload:
    dim: int

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise ValueError("dim must be >= 0")


@dataclass(frozen=True)
class SparsePayload:
    nnz: int

    def __post_init__(self) -> None:
        if self.nnz < 0:
            raise ValueError("nnz must be >= 0")


def compress_topk(
    grad: Gradient, k_fraction: float, residual: Gradient
) -> tuple[SparseUpdate, Gradient]:
    """Keep the k largest-magnitude entries of grad + residual; bank the rest.

    k = ceil(k_fraction * dim); magnitude ties resolve to the lowest index.
    The selected entries become the transmitted update, everything else is
    returned as the new residual, so transmitted + residual reconstructs
    grad + old residual exactly.
    """
    if not (0.0 < k_fraction <= 1.0):
        raise ValueError(f"k_fraction must be in (0, 1], got {k_fraction!r}")
    grad = np.asarray(grad, dtype=np.float64)
    residual = np.asarray(residual, dtype=np.float64)
    if grad.shape != residual.shape or grad.ndim != 1:
        raise ValueError("grad and residual must be 1-D and equal length")

    carried = grad + residual
    k = math.ceil(k_fraction * carried.size)
    picked = np.argsort(-np.abs(carried), kind="stable")[:k]
    picked.sort()
    update = SparseUpdate(picked, carried[picked].copy(), carried.size)
    new_residual = carried.copy()
    new_residual[picked] = 0.0
    return update, new_residual


def decompress(update: SparseUpdate) -> np.ndarray:
    """Dense vector with the update's values in place and zeros elsewhere."""
    out = np.zeros(update.dim)
    out[update.indices] = update.values
    return out


def wire_bytes(payload: DensePayload | SparsePayload, protocol: ProtocolProfile) -> int:
    """Modeled on-the-wire size of one message carrying the payload."""
    if isinstance(payload, DensePayload):
        raw = BYTES_PER_VALUE * payload.dim
    elif isinstance(payload, SparsePayload):
        raw = (BYTES_PER_VALUE + BYTES_PER_INDEX) * payload.nnz
    else:
        raise TypeError(f"unsupported payload {payload!r}")
    return math.ceil(raw * protocol.per_byte_factor) + protocol.per_message_overhead_bytes


def transfer_time(nbytes: int, link: LinkProfile, protocol: ProtocolProfile) -> float:
    """Milliseconds to move one message: handshake + latency + serialization."""
    if nbytes < 0:
        raise ValueError("nbytes must be >= 0")
    return protocol.handshake_ms + link.latency_ms + nbytes / link.bandwidth_bytes_per_ms


@dataclass
class CommLedger:
    """Per-run message accounting; one entry per completed round."""

    messages: int = 0
    per_round_bytes: list[int] = field(default_factory=list)
    _pending: int = 0

    def record(self, nbytes: int) -> None:
        if nbytes < 0:
            raise ValueError("message size must be >= 0")
        self._pending += int(nbytes)
        self.messages += 1

    def end_round(self) -> int:
        total = self._pending
        self.per_round_bytes.append(total)
        self._pending = 0
        return total

    @property
    def cumulative_bytes(self) -> int:
        return sum(self.per_round_bytes) + self._pending
