"""Shared helpers for the test suite: independent oracles and config builders."""

from __future__ import annotations

import math

import numpy as np

from crossfed import (
    AsyncStrategy,
    Batch,
    CompressionSpec,
    DirichletPartition,
    DynamicWeightedStrategy,
    FedAvgStrategy,
    FixedPartition,
    FleetConfig,
    GradientStrategy,
    LinkProfile,
    ModelSpec,
    PlatformSpec,
    QUIC_LIKE,
    RunConfig,
    SyntheticSpec,
    backward,
    forward_loss,
)

FD_STEP = 1e-6


def reference_cross_entropy(spec: ModelSpec, params: np.ndarray, batch: Batch) -> float:
    """Straight-line cross-entropy reimplementation, no shared code path."""
    total = 0.0
    for row, label in zip(batch.features, batch.labels):
        scores = _reference_scores(spec, params, row)
        top = max(scores)
        log_norm = top + math.log(sum(math.exp(s - top) for s in scores))
        total += log_norm - scores[label]
    return total / len(batch)


def _reference_scores(spec: ModelSpec, params: np.ndarray, row: np.ndarray) -> list[float]:
    if spec.kind == "logistic-regression":
        f, c = spec.features, spec.classes
        scores = []
        for j in range(c):
            s = params[f * c + j]
            for i in range(f):
                s += row[i] * params[i * c + j]
            scores.append(float(s))
        return scores
    f, h, c = spec.features, spec.hidden, spec.classes
    w1_end = f * h
    b1_end = w1_end + h
    w2_end = b1_end + h * c
    hidden = []
    for j in range(h):
        s = params[w1_end + j]
        for i in range(f):
            s += row[i] * params[i * h + j]
        hidden.append(math.tanh(s))
    scores = []
    for k in range(c):
        s = params[w2_end + k]
        for j in range(h):
            s += hidden[j] * params[b1_end + j * c + k]
        scores.append(float(s))
    return scores


def finite_difference_grad(spec: ModelSpec, params: np.ndarray, batch: Batch) -> np.ndarray:
    """Central differences of forward_loss, coordinate by coordinate."""
    grad = np.zeros_like(params)
    for j in range(params.size):
        bumped = params.copy()
        bumped[j] += FD_STEP
        up = forward_loss(spec, bumped, batch)
        bumped[j] = params[j] - FD_STEP
        down = forward_loss(spec, bumped, batch)
        grad[j] = (up - down) / (2.0 * FD_STEP)
    return grad


def max_relative_gradient_error(spec: ModelSpec, params: np.ndarray, batch: Batch) -> float:
    """Per-coordinate |analytic - fd| / max(1, |fd|), maximized over coordinates."""
    analytic = backward(spec, params, batch)
    numeric = finite_difference_grad(spec, params, batch)
    scale = np.maximum(1.0, np.abs(numeric))
    return float(np.max(np.abs(analytic - numeric) / scale))


def random_model_case(
    rng: np.random.Generator, kind: str
) -> tuple[ModelSpec, np.ndarray, Batch]:
    """One random (spec, params, batch) triple with small dimensions."""
    features = int(rng.integers(2, 6))
    classes = int(rng.integers(2, 5))
    if kind == "mlp":
        spec = ModelSpec("mlp", features, classes, hidden=int(rng.integers(2, 5)))
    else:
        spec = ModelSpec("logistic-regression", features, classes)
    params = rng.normal(0.0, 1.0, spec.param_count)
    rows = int(rng.integers(1, 6))
    batch = Batch(
        rng.normal(0.0, 2.0, (rows, features)),
        rng.integers(0, classes, rows),
    )
    return spec, params, batch


def centralized_gd(
    spec: ModelSpec,
    start: np.ndarray,
    batch: Batch,
    lr: float,
    steps: int,
) -> list[np.ndarray]:
    """Plain full-batch gradient descent; returns params after each step."""
    params = start.copy()
    trajectory = []
    for _ in range(steps):
        params = params - lr * backward(spec, params, batch)
        trajectory.append(params.copy())
    return trajectory


# ---------------------------------------------------------------------------
# shared run configurations

BENCH_FEATURES = 20
BENCH_CLASSES = 10
BENCH_SAMPLES = 5000
BENCH_SEPARATION = 6.0
BENCH_RATES = (4.0, 2.0, 1.0)
BENCH_LINK = LinkProfile(latency_ms=50.0, bandwidth_bytes_per_ms=1000.0)


def bench_fleet(partition=None) -> FleetConfig:
    platforms = [
        PlatformSpec(i, rate, BENCH_LINK, BENCH_LINK) for i, rate in enumerate(BENCH_RATES)
    ]
    if partition is None:
        partition = DirichletPartition(beta=0.3)
    return FleetConfig(platforms, partition, QUIC_LIKE)


def bench_config(strategy_label: str, seed: int, rounds: int | None = None) -> RunConfig:
    """The skewed 3-platform benchmark used by the heavier comparisons."""
    strategies = {
        "fedavg": (FedAvgStrategy(), None),
        "dynamic": (DynamicWeightedStrategy(), None),
        "gradient": (GradientStrategy(lr=0.1), CompressionSpec(k_fraction=0.1)),
        "async": (AsyncStrategy(alpha0=0.5, staleness_exponent=0.5), None),
    }
    strategy, compression = strategies[strategy_label]
    if rounds is None:
        rounds = 300 if strategy_label == "async" else 100
    model = ModelSpec("logistic-regression", BENCH_FEATURES, BENCH_CLASSES)
    data = SyntheticSpec(BENCH_SAMPLES, BENCH_FEATURES, BENCH_CLASSES, BENCH_SEPARATION, seed)
    return RunConfig(
        model=model,
        data=data,
        fleet=bench_fleet(),
        strategy=strategy,
        rounds=rounds,
        local_epochs=2,
        batch_size=32,
        lr=0.1,
        seed=seed,
        compression=compression,
        eval_fraction=0.2,
    )


def uniform_partition(platforms: int) -> FixedPartition:
    return FixedPartition(tuple([1.0 / platforms] * platforms))


def small_config(strategy, *, seed=7, rounds=4, platforms=2, samples=140,
                 features=4, classes=3, compression=None, dp=None,
                 partition=None, batch_size=16, local_epochs=1, lr=0.2) -> RunConfig:
    """A fast config for plumbing tests."""
    link = LinkProfile(latency_ms=5.0, bandwidth_bytes_per_ms=500.0)
    fleet = FleetConfig(
        [PlatformSpec(i, 2.0 + i, link, link) for i in range(platforms)],
        partition if partition is not None else uniform_partition(platforms),
        QUIC_LIKE,
    )
    return RunConfig(
        model=ModelSpec("logistic-regression", features, classes),
        data=SyntheticSpec(samples, features, classes, 4.0, seed),
        fleet=fleet,
        strategy=strategy,
        rounds=rounds,
        local_epochs=local_epochs,
        batch_size=batch_size,
        lr=lr,
        seed=seed,
        compression=compression,
        dp=dp,
    )
