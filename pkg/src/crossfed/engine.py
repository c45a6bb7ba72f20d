"""Simulated training runs over a fleet of heterogeneous platforms.

`run_sync` executes barrier-synchronized rounds: broadcast, local training,
upload, aggregate, evaluate. `run_async` executes an event loop in which each
platform cycles independently and uploads merge into the global model one at
a time, damped by staleness. Time and bytes are modeled from the platform
and protocol profiles; nothing here measures wall-clock anything.

Determinism: all randomness is derived from the run seed, the data seed, and
the privacy seed. Each platform draws its per-round training seeds from its
own stream (seeded with run seed XOR platform id), so results do not depend
on the order platforms are processed in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._seeds import mask_seed
from .aggregate import (
    AggregationStrategy,
    AsyncStrategy,
    DpMechanism,
    DpSpec,
    DynamicWeightedStrategy,
    FedAvgStrategy,
    GradientStrategy,
    LocalResult,
    async_merge,
    dynamic_aggregate,
    fedavg,
    gradient_aggregate,
    staleness_weight,
)
from .datagen import (
    Dataset,
    DirichletPartition,
    DynamicPartition,
    FixedPartition,
    PartitionPlan,
    PartitionStrategy,
    SyntheticSpec,
    generate_synthetic,
    partition_dirichlet,
    partition_fixed,
    rebalance_dynamic,
)
from .netsim import (
    CommLedger,
    DensePayload,
    LinkProfile,
    ProtocolProfile,
    SparsePayload,
    compress_topk,
    decompress,
    transfer_time,
    wire_bytes,
)
from .params import (
    Batch,
    Gradient,
    ModelSpec,
    ParamVector,
    forward_loss,
    init_params,
    logits,
    loss_and_grad,
    sgd_step,
)

RoundObserver = Callable[[int, ParamVector], None]
MergeObserver = Callable[[int, int, int, ParamVector], None]


@dataclass(frozen=True)
class PlatformSpec:
    """One cloud platform: compute speed plus its two network directions."""

    id: int
    compute_rate: float  # training samples per simulated millisecond
    uplink: LinkProfile
    downlink: LinkProfile

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError("platform id must be >= 0")
        if not (np.isfinite(self.compute_rate) and self.compute_rate > 0):
            raise ValueError("compute_rate must be finite and positive")


@dataclass
class FleetConfig:
    platforms: list[PlatformSpec]
    partition: PartitionStrategy
    protocol: ProtocolProfile

    def __post_init__(self) -> None:
        if not self.platforms:
            raise ValueError("fleet needs at least one platform")
        ids = sorted(p.id for p in self.platforms)
        if ids != list(range(len(self.platforms))):
            raise ValueError("platform ids must be exactly 0..N-1 with no repeats")
        self.platforms = sorted(self.platforms, key=lambda p: p.id)
        if isinstance(self.partition, FixedPartition):
            if len(self.partition.proportions) != len(self.platforms):
                raise ValueError("fixed partition needs one proportion per platform")
        if isinstance(self.partition, DirichletPartition) and self.partition.proportions:
            if len(self.partition.proportions) != len(self.platforms):
                raise ValueError("dirichlet proportions must match the platform count")


@dataclass(frozen=True)
class CompressionSpec:
    k_fraction: float

    def __post_init__(self) -> None:
        if not (0.0 < self.k_fraction <= 1.0):
            raise ValueError("k_fraction must be in (0, 1]")


@dataclass
class RunConfig:
    model: ModelSpec
    data: SyntheticSpec
    fleet: FleetConfig
    strategy: AggregationStrategy
    rounds: int
    local_epochs: int
    batch_size: int
    lr: float
    seed: int
    compression: CompressionSpec | None = None
    dp: DpSpec | None = None
    eval_fraction: float = 0.2

    def __post_init__(self) -> None:
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.local_epochs < 1:
            raise ValueError("local_epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not (np.isfinite(self.lr) and self.lr > 0):
            raise ValueError("lr must be finite and positive")
        if not (0.0 < self.eval_fraction < 1.0):
            raise ValueError("eval_fraction must be strictly between 0 and 1")
        if self.model.features != self.data.features:
            raise ValueError("model features must match the data features")
        if self.model.classes != self.data.classes:
            raise ValueError("model classes must match the data classes")
        if self.compression is not None and not isinstance(self.strategy, GradientStrategy):
            raise ValueError("compression is only defined for the gradient strategy")
        if isinstance(self.fleet.partition, DynamicPartition) and isinstance(
            self.strategy, AsyncStrategy
        ):
            raise ValueError("dynamic partitioning requires a synchronous strategy")
        n_eval = max(1, round(self.data.samples * self.eval_fraction))
        if self.data.samples - n_eval < len(self.fleet.platforms):
            raise ValueError("not enough training samples left after the eval split")


@dataclass
class RoundMetrics:
    """One row of run output; `round` counts merge events in async runs."""

    round: int
    eval_loss: float
    eval_accuracy: float
    round_bytes: int
    cumulative_bytes: int
    simulated_ms: float
    per_platform_losses: tuple[float, ...]


def local_train(
    spec: ModelSpec,
    params: ParamVector,
    shard: Batch,
    epochs: int,
    batch_size: int,
    lr: float,
    seed: int,
) -> tuple[ParamVector, float, Gradient]:
    """Run `epochs` of seeded minibatch SGD on one shard.

    Each epoch shuffles the shard with the call's own generator and walks it
    in batches of `batch_size` (the final batch may be short). Returns the
    trained parameters, the sample-weighted mean loss over the final epoch,
    and the sum of every minibatch gradient applied during the call, which
    is what a gradient-aggregating server consumes as the platform's update.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    params = np.asarray(params, dtype=np.float64)
    size = len(shard)
    rng = np.random.default_rng(mask_seed(seed))
    accumulated = np.zeros_like(params)
    epoch_loss = 0.0
    for _ in range(epochs):
        order = rng.permutation(size)
        weighted = 0.0
        for start in range(0, size, batch_size):
            chosen = order[start : start + batch_size]
            batch = Batch(shard.features[chosen], shard.labels[chosen])
            loss, grad = loss_and_grad(spec, params, batch)
            params = sgd_step(params, grad, lr)
            accumulated += grad
            weighted += loss * chosen.size
        epoch_loss = weighted / size
    return params, epoch_loss, accumulated


def evaluate(spec: ModelSpec, params: ParamVector, eval_set: Batch) -> tuple[float, float]:
    """Mean cross-entropy and argmax accuracy (ties go to the lowest class)."""
    loss = forward_loss(spec, params, eval_set)
    predicted = np.argmax(logits(spec, params, eval_set.features), axis=1)
    return loss, float(np.mean(predicted == eval_set.labels))


def _split_dataset(config: RunConfig) -> tuple[Dataset, Batch]:
    """Generate the dataset and carve the tail off as the held-out eval split."""
    dataset = generate_synthetic(config.data)
    n_eval = max(1, round(len(dataset) * config.eval_fraction))
    n_train = len(dataset) - n_eval
    train = Dataset(dataset.features[:n_train], dataset.labels[:n_train], dataset.classes)
    held_out = Batch(dataset.features[n_train:], dataset.labels[n_train:])
    return train, held_out


def _initial_plan(config: RunConfig, train: Dataset) -> PartitionPlan:
    n_platforms = len(config.fleet.platforms)
    strategy = config.fleet.partition
    if isinstance(strategy, FixedPartition):
        return partition_fixed(train, strategy.proportions, config.seed)
    if isinstance(strategy, DirichletPartition):
        return partition_dirichlet(train, n_platforms, strategy.beta, config.seed)
    if isinstance(strategy, DynamicPartition):
        # dynamic runs start balanced and adapt from measured round times
        return partition_fixed(train, [1.0 / n_platforms] * n_platforms, config.seed)
    raise TypeError(f"unknown partition strategy {strategy!r}")


def _platform_streams(config: RunConfig) -> list[np.random.Generator]:
    return [
        np.random.default_rng(mask_seed(config.seed ^ p.id))
        for p in config.fleet.platforms
    ]


def _next_seed(stream: np.random.Generator) -> int:
    return int(stream.integers(0, 2**63))


def _shard_batch(train: Dataset, indices: np.ndarray) -> Batch:
    return Batch(train.features[indices], train.labels[indices])


def run_sync(config: RunConfig, on_round: RoundObserver | None = None) -> list[RoundMetrics]:
    """Execute barrier-synchronized rounds and return one metrics row each.

    Per round: broadcast the global model, train every platform locally,
    upload params (averaging strategies) or accumulated gradients (gradient
    strategy, optionally top-k compressed with error feedback), aggregate,
    then evaluate on the held-out split. The simulated round time is the
    slowest platform's download + compute + upload; uploads are privatized
    in platform id order when a privacy spec is configured.
    """
    strategy = config.strategy
    if isinstance(strategy, AsyncStrategy):
        raise ValueError("run_sync cannot execute the async strategy; use run_async")

    train, held_out = _split_dataset(config)
    plan = _initial_plan(config, train)
    platforms = config.fleet.platforms
    protocol = config.fleet.protocol
    model = config.model
    dim = model.param_count

    global_params = init_params(model, config.seed)
    streams = _platform_streams(config)
    privatizer = DpMechanism(config.dp) if config.dp is not None else None
    residuals = [np.zeros(dim) for _ in platforms] if config.compression else None

    ledger = CommLedger()
    dense_bytes = wire_bytes(DensePayload(dim), protocol)
    clock = 0.0
    cumulative = 0
    metrics: list[RoundMetrics] = []

    for round_no in range(1, config.rounds + 1):
        download_ms = []
        trained: list[ParamVector] = []
        losses: list[float] = []
        grads: list[Gradient] = []
        compute_ms = []
        for platform, shard_idx in zip(platforms, plan.shards):
            ledger.record(dense_bytes)
            download_ms.append(transfer_time(dense_bytes, platform.downlink, protocol))
            shard = _shard_batch(train, shard_idx)
            new_params, local_loss, accumulated = local_train(
                model,
                global_params,
                shard,
                config.local_epochs,
                config.batch_size,
                config.lr,
                _next_seed(streams[platform.id]),
            )
            trained.append(new_params)
            losses.append(local_loss)
            grads.append(accumulated)
            compute_ms.append(config.local_epochs * len(shard_idx) / platform.compute_rate)

        upload_ms = []
        shard_sizes = plan.sizes
        if isinstance(strategy, GradientStrategy):
            entries: list[tuple[Gradient, int]] = []
            for i, platform in enumerate(platforms):
                update = grads[i]
                if privatizer is not None:
                    update = privatizer.privatize(update)
                if config.compression is not None:
                    assert residuals is not None
                    sparse, residuals[i] = compress_topk(
                        update, config.compression.k_fraction, residuals[i]
                    )
                    nbytes = wire_bytes(SparsePayload(len(sparse.indices)), protocol)
                    update = decompress(sparse)
                else:
                    nbytes = dense_bytes
                ledger.record(nbytes)
                upload_ms.append(transfer_time(nbytes, platform.uplink, protocol))
                entries.append((update, int(shard_sizes[i])))
            global_params = gradient_aggregate(global_params, entries, strategy.lr)
        else:
            results = []
            for i, platform in enumerate(platforms):
                upload = trained[i]
                if privatizer is not None:
                    upload = privatizer.privatize(upload)
                ledger.record(dense_bytes)
                upload_ms.append(transfer_time(dense_bytes, platform.uplink, protocol))
                results.append(
                    LocalResult(upload, int(shard_sizes[i]), losses[i], platform.id)
                )
            if isinstance(strategy, FedAvgStrategy):
                global_params = fedavg(results)
            elif isinstance(strategy, DynamicWeightedStrategy):
                global_params = dynamic_aggregate(results)
            else:
                raise TypeError(f"unknown aggregation strategy {strategy!r}")

        platform_ms = [d + c + u for d, c, u in zip(download_ms, compute_ms, upload_ms)]
        clock += max(platform_ms)
        eval_loss, eval_accuracy = evaluate(model, global_params, held_out)
        round_bytes = ledger.end_round()
        cumulative += round_bytes
        metrics.append(
            RoundMetrics(
                round=round_no,
                eval_loss=eval_loss,
                eval_accuracy=eval_accuracy,
                round_bytes=round_bytes,
                cumulative_bytes=cumulative,
                simulated_ms=clock,
                per_platform_losses=tuple(losses),
            )
        )

        partition = config.fleet.partition
        if (
            isinstance(partition, DynamicPartition)
            and round_no % partition.rebalance_every == 0
            and round_no < config.rounds
        ):
            plan = rebalance_dynamic(plan, platform_ms)

        if on_round is not None:
            on_round(round_no, global_params.copy())

    return metrics


def run_async(config: RunConfig, on_merge: MergeObserver | None = None) -> list[RoundMetrics]:
    """Run the asynchronous event loop until `config.rounds` merges complete.

    Every platform repeatedly downloads the current global model, trains on
    its shard, and uploads; each arriving upload merges immediately with
    weight alpha0 / (staleness + 1)^p, where staleness counts global merges
    since the platform downloaded. Arrival ties resolve by platform id. One
    metrics row is emitted per merge; `round_bytes` bills the completed
    cycle's download and upload, so in-flight work at cut-off costs nothing.
    """
    strategy = config.strategy
    if not isinstance(strategy, AsyncStrategy):
        raise ValueError("run_async requires the async strategy; use run_sync")

    train, held_out = _split_dataset(config)
    plan = _initial_plan(config, train)
    platforms = config.fleet.platforms
    protocol = config.fleet.protocol
    model = config.model
    dim = model.param_count

    global_params = init_params(model, config.seed)
    version = 0
    streams = _platform_streams(config)
    privatizer = DpMechanism(config.dp) if config.dp is not None else None

    ledger = CommLedger()
    dense_bytes = wire_bytes(DensePayload(dim), protocol)
    shards = [_shard_batch(train, idx) for idx in plan.shards]

    @dataclass
    class _Cycle:
        arrival_ms: float
        downloaded_version: int
        trained: ParamVector
        local_loss: float

    def start_cycle(platform: PlatformSpec, start_ms: float) -> _Cycle:
        download = transfer_time(dense_bytes, platform.downlink, protocol)
        trained, local_loss, _ = local_train(
            model,
            global_params,
            shards[platform.id],
            config.local_epochs,
            config.batch_size,
            config.lr,
            _next_seed(streams[platform.id]),
        )
        compute = config.local_epochs * len(shards[platform.id]) / platform.compute_rate
        upload = transfer_time(dense_bytes, platform.uplink, protocol)
        arrival = start_ms + download + compute + upload
        return _Cycle(arrival, version, trained, local_loss)

    in_flight = [start_cycle(p, 0.0) for p in platforms]
    latest_losses = [float("nan")] * len(platforms)
    cumulative = 0
    metrics: list[RoundMetrics] = []

    for merge_no in range(1, config.rounds + 1):
        pid = min(range(len(platforms)), key=lambda i: (in_flight[i].arrival_ms, i))
        cycle = in_flight[pid]
        staleness = version - cycle.downloaded_version
        alpha = staleness_weight(strategy.alpha0, staleness, strategy.staleness_exponent)
        upload = cycle.trained
        if privatizer is not None:
            upload = privatizer.privatize(upload)
        global_params = async_merge(global_params, upload, alpha)
        version += 1
        latest_losses[pid] = cycle.local_loss

        ledger.record(dense_bytes)  # the cycle's download
        ledger.record(dense_bytes)  # the cycle's upload
        round_bytes = ledger.end_round()
        cumulative += round_bytes
        eval_loss, eval_accuracy = evaluate(model, global_params, held_out)
        metrics.append(
            RoundMetrics(
                round=merge_no,
                eval_loss=eval_loss,
                eval_accuracy=eval_accuracy,
                round_bytes=round_bytes,
                cumulative_bytes=cumulative,
                simulated_ms=cycle.arrival_ms,
                per_platform_losses=tuple(latest_losses),
            )
        )
        if on_merge is not None:
            on_merge(merge_no, pid, staleness, global_params.copy())
        in_flight[pid] = start_cycle(platforms[pid], cycle.arrival_ms)

    return metrics
