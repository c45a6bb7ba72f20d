"""Flat-vector models: initialization, loss, gradients, and the SGD kernel.

Every model lives in a single 1-D float64 array so aggregation rules can
treat all models alike. Two small differentiable classifiers are provided:
multinomial logistic regression and a one-hidden-layer tanh MLP. Losses use
a max-shifted log-softmax, so results stay finite for any finite inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._seeds import seeded_rng

# 1-D float64 arrays; a Gradient always matches its ParamVector's length.
ParamVector = np.ndarray
Gradient = np.ndarray

LOGISTIC_REGRESSION = "logistic-regression"
MLP = "mlp"
MODEL_KINDS = (LOGISTIC_REGRESSION, MLP)

INIT_RANGE = 0.05


@dataclass(frozen=True)
class ModelSpec:
    """Architecture description; `hidden` is only meaningful for the MLP."""

    kind: str
    features: int
    classes: int
    hidden: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}, expected one of {MODEL_KINDS}")
        if self.features < 1:
            raise ValueError("model features must be >= 1")
        if self.classes < 2:
            raise ValueError("model classes must be >= 2")
        if self.kind == MLP:
            if self.hidden is None or self.hidden < 1:
                raise ValueError("mlp model requires hidden >= 1")
        elif self.hidden is not None:
            raise ValueError("hidden is only valid for the mlp model")

    @property
    def param_count(self) -> int:
        if self.kind == LOGISTIC_REGRESSION:
            return self.features * self.classes + self.classes
        assert self.hidden is not None
        return (
            self.features * self.hidden
            + self.hidden
            + self.hidden * self.classes
            + self.classes
        )


@dataclass
class Batch:
    """A contiguous block of samples: feature matrix plus integer labels."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ValueError("batch features must be a 2-D matrix")
        if self.labels.ndim != 1:
            raise ValueError("batch labels must be a 1-D vector")
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError(
                f"batch size mismatch: {self.features.shape[0]} feature rows vs "
                f"{self.labels.shape[0]} labels"
            )
        if self.features.shape[0] < 1:
            raise ValueError("batch must contain at least one sample")
        if self.labels.min() < 0:
            raise ValueError("batch labels must be nonnegative")

    def __len__(self) -> int:
        return self.features.shape[0]


def init_params(spec: ModelSpec, seed: int) -> ParamVector:
    """Fresh parameter vector with entries uniform in [-0.05, 0.05]."""
    rng = seeded_rng(seed)
    return rng.uniform(-INIT_RANGE, INIT_RANGE, spec.param_count)


def _check_params(spec: ModelSpec, params: np.ndarray) -> np.ndarray:
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (spec.param_count,):
        raise ValueError(
            f"parameter vector has shape {params.shape}, expected ({spec.param_count},)"
        )
    return params


def _check_features(spec: ModelSpec, features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != spec.features:
        raise ValueError(
            f"feature matrix has shape {features.shape}, expected (*, {spec.features})"
        )
    return features


def _check_labels(spec: ModelSpec, labels: np.ndarray) -> None:
    if labels.max() >= spec.classes:
        raise ValueError(
            f"label {int(labels.max())} out of range for {spec.classes} classes"
        )


def _require_finite(value: np.ndarray | float, what: str) -> None:
    if not np.all(np.isfinite(value)):
        raise ValueError(f"{what} contains non-finite entries")


def _unpack_logistic(spec: ModelSpec, params: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    split = spec.features * spec.classes
    weight = params[:split].reshape(spec.features, spec.classes)
    bias = params[split:]
    return weight, bias


def _unpack_mlp(
    spec: ModelSpec, params: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    assert spec.hidden is not None
    f, h, c = spec.features, spec.hidden, spec.classes
    offset = 0
    w1 = params[offset : offset + f * h].reshape(f, h)
    offset += f * h
    b1 = params[offset : offset + h]
    offset += h
    w2 = params[offset : offset + h * c].reshape(h, c)
    offset += h * c
    b2 = params[offset:]
    return w1, b1, w2, b2


def _forward(
    spec: ModelSpec, params: np.ndarray, features: np.ndarray
) -> tuple[np.ndarray | None, np.ndarray]:
    """Returns (hidden activations or None, logits)."""
    if spec.kind == LOGISTIC_REGRESSION:
        weight, bias = _unpack_logistic(spec, params)
        return None, features @ weight + bias
    w1, b1, w2, b2 = _unpack_mlp(spec, params)
    hidden = np.tanh(features @ w1 + b1)
    return hidden, hidden @ w2 + b2


def _log_softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def logits(spec: ModelSpec, params: ParamVector, features: np.ndarray) -> np.ndarray:
    """Raw class scores, shape (rows, classes)."""
    params = _check_params(spec, params)
    features = _check_features(spec, features)
    return _forward(spec, params, features)[1]


def forward_loss(spec: ModelSpec, params: ParamVector, batch: Batch) -> float:
    """Mean cross-entropy of the batch under the current parameters."""
    params = _check_params(spec, params)
    features = _check_features(spec, batch.features)
    _check_labels(spec, batch.labels)
    log_probs = _log_softmax(_forward(spec, params, features)[1])
    loss = float(-log_probs[np.arange(len(batch)), batch.labels].mean())
    _require_finite(loss, "loss")
    return loss


def loss_and_grad(
    spec: ModelSpec, params: ParamVector, batch: Batch
) -> tuple[float, Gradient]:
    """Mean cross-entropy and its exact gradient in one forward/backward pass.

    The gradient is flattened in the same layout `init_params` uses, so
    `sgd_step(params, grad, lr)` is well defined on the result.
    """
    params = _check_params(spec, params)
    features = _check_features(spec, batch.features)
    _check_labels(spec, batch.labels)
    size = len(batch)
    rows = np.arange(size)

    hidden, scores = _forward(spec, params, features)
    log_probs = _log_softmax(scores)
    loss = float(-log_probs[rows, batch.labels].mean())

    delta = np.exp(log_probs)
    delta[rows, batch.labels] -= 1.0
    delta /= size

    if spec.kind == LOGISTIC_REGRESSION:
        grad_w = features.T @ delta
        grad_b = delta.sum(axis=0)
        grad = np.concatenate([grad_w.ravel(), grad_b])
    else:
        assert hidden is not None
        _, _, w2, _ = _unpack_mlp(spec, params)
        grad_w2 = hidden.T @ delta
        grad_b2 = delta.sum(axis=0)
        d_hidden = (delta @ w2.T) * (1.0 - hidden * hidden)
        grad_w1 = features.T @ d_hidden
        grad_b1 = d_hidden.sum(axis=0)
        grad = np.concatenate(
            [grad_w1.ravel(), grad_b1, grad_w2.ravel(), grad_b2]
        )

    _require_finite(loss, "loss")
    _require_finite(grad, "gradient")
    return loss, grad


def backward(spec: ModelSpec, params: ParamVector, batch: Batch) -> Gradient:
    """Exact mean-cross-entropy gradient for the batch."""
    return loss_and_grad(spec, params, batch)[1]


def sgd_step(params: ParamVector, grad: Gradient, lr: float) -> ParamVector:
    """One descent step: params - lr * grad."""
    params = np.asarray(params, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if params.shape != grad.shape:
        raise ValueError(
            f"parameter/gradient shape mismatch: {params.shape} vs {grad.shape}"
        )
    out = params - lr * grad
    _require_finite(out, "updated parameters")
    return out


def combine(weights: Sequence[float], vectors: Sequence[ParamVector]) -> ParamVector:
    """Weighted sum of equal-length vectors, accumulated in input order."""
    if len(weights) != len(vectors):
        raise ValueError("combine needs one weight per vector")
    if not vectors:
        raise ValueError("combine requires at least one vector")
    arrays = [np.asarray(v, dtype=np.float64) for v in vectors]
    dim = arrays[0].shape
    for arr in arrays[1:]:
        if arr.shape != dim:
            raise ValueError(f"vector shape mismatch: {arr.shape} vs {dim}")
    out = float(weights[0]) * arrays[0]
    for weight, arr in zip(weights[1:], arrays[1:]):
        out += float(weight) * arr
    _require_finite(out, "combined vector")
    return out
