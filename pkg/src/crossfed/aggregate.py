"""Model-merging rules and the upload privatizer.

Four ways to fold local work into a global model: sample-weighted averaging,
loss-softmax weighted averaging, server-side gradient descent on averaged
shard gradients, and staleness-damped asynchronous interpolation. The
Gaussian privatizer clips and perturbs uploads before they leave a platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ._seeds import seeded_rng
from .params import Gradient, ParamVector, combine

WEIGHT_SUM_TOLERANCE = 1e-12


@dataclass
class LocalResult:
    """One platform's contribution to a synchronous round."""

    params: ParamVector
    sample_count: int
    local_loss: float
    platform_id: int

    def __post_init__(self) -> None:
        self.params = np.asarray(self.params, dtype=np.float64)
        if self.params.ndim != 1:
            raise ValueError("local params must be a 1-D vector")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if not np.isfinite(self.local_loss):
            raise ValueError("local_loss must be finite")
        if self.platform_id < 0:
            raise ValueError("platform_id must be >= 0")


@dataclass
class DynamicWeights:
    """Softmax-of-negated-losses coefficients, one per platform."""

    alphas: np.ndarray
    source_losses: np.ndarray

    def __post_init__(self) -> None:
        self.alphas = np.asarray(self.alphas, dtype=np.float64)
        self.source_losses = np.asarray(self.source_losses, dtype=np.float64)
        if self.alphas.shape != self.source_losses.shape or self.alphas.ndim != 1:
            raise ValueError("alphas and source_losses must be 1-D and equal length")
        if abs(float(self.alphas.sum()) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ValueError("alphas must sum to 1")
        if np.any(self.alphas <= 0):
            raise ValueError("every alpha must be positive; loss spread too large")


@dataclass(frozen=True)
class FedAvgStrategy:
    pass


@dataclass(frozen=True)
class DynamicWeightedStrategy:
    pass


@dataclass(frozen=True)
class GradientStrategy:
    lr: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.lr) and self.lr > 0):
            raise ValueError("gradient strategy lr must be finite and positive")


@dataclass(frozen=True)
class AsyncStrategy:
    alpha0: float
    staleness_exponent: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha0 <= 1.0):
            raise ValueError("alpha0 must be in (0, 1]")
        if not (np.isfinite(self.staleness_exponent) and self.staleness_exponent >= 0):
            raise ValueError("staleness_exponent must be finite and nonnegative")


AggregationStrategy = Union[
    FedAvgStrategy, DynamicWeightedStrategy, GradientStrategy, AsyncStrategy
]


@dataclass(frozen=True)
class DpSpec:
    """Gaussian mechanism settings: clip to L2 <= clip_norm, noise sigma*clip_norm."""

    clip_norm: float
    sigma: float
    seed: int

    def __post_init__(self) -> None:
        if not self.clip_norm > 0:
            raise ValueError("clip_norm must be positive (may be inf)")
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError("sigma must be finite and nonnegative")
        if self.sigma > 0 and not np.isfinite(self.clip_norm):
            raise ValueError("sigma > 0 requires a finite clip_norm")


def fedavg(results: Sequence[LocalResult]) -> ParamVector:
    """Average local params weighted by sample counts, in platform id order."""
    if not results:
        raise ValueError("fedavg requires at least one local result")
    ordered = sorted(results, key=lambda r: r.platform_id)
    total = sum(r.sample_count for r in ordered)
    return combine([r.sample_count / total for r in ordered], [r.params for r in ordered])


def dynamic_weights(losses: Sequence[float]) -> DynamicWeights:
    """Softmax over negated losses; lower loss earns a larger coefficient."""
    arr = np.asarray(losses, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("dynamic_weights requires at least one loss")
    if not np.all(np.isfinite(arr)):
        raise ValueError("losses must be finite")
    # shift by the minimum loss so the largest exponent is exactly 0
    scores = np.exp(-(arr - arr.min()))
    return DynamicWeights(scores / scores.sum(), arr.copy())


def dynamic_aggregate(results: Sequence[LocalResult]) -> ParamVector:
    """Average local params with loss-softmax weights, in platform id order."""
    if not results:
        raise ValueError("dynamic_aggregate requires at least one local result")
    ordered = sorted(results, key=lambda r: r.platform_id)
    weights = dynamic_weights([r.local_loss for r in ordered])
    return combine(weights.alphas.tolist(), [r.params for r in ordered])


def gradient_aggregate(
    global_params: ParamVector, grads: Sequence[tuple[Gradient, int]], lr: float
) -> ParamVector:
    """One server-side descent step along the sample-weighted mean gradient."""
    if not grads:
        raise ValueError("gradient_aggregate requires at least one gradient")
    global_params = np.asarray(global_params, dtype=np.float64)
    total = sum(count for _, count in grads)
    for _, count in grads:
        if count < 1:
            raise ValueError("sample counts must be >= 1")
    mean_grad = combine([count / total for _, count in grads], [g for g, _ in grads])
    if mean_grad.shape != global_params.shape:
        raise ValueError("gradient dimension does not match global params")
    return global_params - lr * mean_grad


def async_merge(
    global_params: ParamVector, local_params: ParamVector, alpha: float
) -> ParamVector:
    """Interpolate the global model toward one local model by alpha."""
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must be in [0, 1], got {alpha!r}")
    global_params = np.asarray(global_params, dtype=np.float64)
    local_params = np.asarray(local_params, dtype=np.float64)
    if global_params.shape != local_params.shape:
        raise ValueError("global/local dimension mismatch")
    return global_params + alpha * (local_params - global_params)


def staleness_weight(alpha0: float, staleness: int, p: float) -> float:
    """Merge weight alpha0 / (staleness + 1)^p; p = 0 ignores staleness."""
    if not (0.0 < alpha0 <= 1.0):
        raise ValueError("alpha0 must be in (0, 1]")
    if staleness < 0:
        raise ValueError("staleness must be >= 0")
    if not (np.isfinite(p) and p >= 0):
        raise ValueError("staleness exponent must be finite and nonnegative")
    return alpha0 / float(staleness + 1) ** p


class DpMechanism:
    """Stateful Gaussian privatizer; the noise stream is fixed by spec.seed.

    Successive `privatize` calls consume the stream in order, so a run that
    privatizes uploads in a deterministic sequence is itself deterministic.
    """

    def __init__(self, spec: DpSpec):
        self.spec = spec
        self._rng = seeded_rng(spec.seed)

    def privatize(self, update: np.ndarray) -> np.ndarray:
        vec = np.asarray(update, dtype=np.float64)
        if vec.ndim != 1:
            raise ValueError("update must be a 1-D vector")
        if not np.all(np.isfinite(vec)):
            raise ValueError("update contains non-finite entries")
        out = vec.copy()
        if np.isfinite(self.spec.clip_norm):
            norm = float(np.linalg.norm(out))
            if norm > self.spec.clip_norm:
                out *= self.spec.clip_norm / norm
        if self.spec.sigma > 0:
            out += self._rng.normal(0.0, self.spec.sigma * self.spec.clip_norm, out.size)
        return out


def dp_privatize(update: np.ndarray, spec: DpSpec) -> np.ndarray:
    """Clip and perturb a single update; equals the first draw of a fresh mechanism."""
    return DpMechanism(spec).privatize(update)
