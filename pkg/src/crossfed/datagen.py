"""Synthetic classification data and shard assignment across platforms.

Datasets are class-conditional Gaussian clusters with unit covariance; the
class means sit `separation` apart along seeded unit directions. Three shard
assignment rules are provided: a fixed proportional split, a Dirichlet label
skew, and a throughput-driven rebalance for adapting shard sizes mid-run.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ._seeds import seeded_rng

PROPORTION_TOLERANCE = 1e-9


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    classes: int

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ValueError("dataset features must be a 2-D matrix")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("dataset needs exactly one label per feature row")
        if self.classes < 2:
            raise ValueError("dataset must have at least 2 classes")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.classes):
            raise ValueError("dataset labels out of range")

    def __len__(self) -> int:
        return self.features.shape[0]


@dataclass(frozen=True)
class SyntheticSpec:
    samples: int
    features: int
    classes: int
    separation: float
    seed: int

    def __post_init__(self) -> None:
        if self.classes < 2:
            raise ValueError("synthetic data needs classes >= 2")
        if self.samples < self.classes:
            raise ValueError("synthetic data needs at least one sample per class")
        if self.features < 1:
            raise ValueError("synthetic data needs features >= 1")
        if not (np.isfinite(self.separation) and self.separation >= 0):
            raise ValueError("separation must be finite and nonnegative")


@dataclass
class PartitionPlan:
    """Shard index lists, one per platform, over a single dataset."""

    shards: list[np.ndarray]

    def __post_init__(self) -> None:
        self.shards = [np.asarray(s, dtype=np.int64) for s in self.shards]

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(s) for s in self.shards], dtype=np.int64)

    def validate(self, total: int) -> None:
        """Raise unless shards are nonempty, disjoint, and cover range(total)."""
        seen: set[int] = set()
        count = 0
        for pid, shard in enumerate(self.shards):
            if len(shard) == 0:
                raise ValueError(f"platform {pid} received an empty shard")
            count += len(shard)
            seen.update(shard.tolist())
        if count != total or seen != set(range(total)):
            raise ValueError("shards must exactly cover the dataset without overlap")


@dataclass(frozen=True)
class FixedPartition:
    proportions: tuple[float, ...]

    def __post_init__(self) -> None:
        _check_proportions(self.proportions)


@dataclass(frozen=True)
class DirichletPartition:
    beta: float
    proportions: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValueError("dirichlet beta must be finite and positive")
        if self.proportions is not None:
            _check_proportions(self.proportions)


@dataclass(frozen=True)
class DynamicPartition:
    rebalance_every: int

    def __post_init__(self) -> None:
        if self.rebalance_every < 1:
            raise ValueError("rebalance_every must be >= 1")


PartitionStrategy = Union[FixedPartition, DirichletPartition, DynamicPartition]


def _check_proportions(proportions: Sequence[float]) -> np.ndarray:
    props = np.asarray(proportions, dtype=np.float64)
    if props.size < 1:
        raise ValueError("proportions must be nonempty")
    if np.any(props < 0) or not np.all(np.isfinite(props)):
        raise ValueError("proportions must be finite and nonnegative")
    if abs(props.sum() - 1.0) > PROPORTION_TOLERANCE:
        raise ValueError(f"proportions sum to {props.sum()!r}, expected 1.0")
    return props


def _largest_remainder(total: int, weights: np.ndarray) -> np.ndarray:
    """Integer sizes summing to `total`, proportional to `weights`.

    Floors the exact quotas, then hands the leftover units to the largest
    fractional remainders; remainder ties go to the lower index.
    """
    weights = np.asarray(weights, dtype=np.float64)
    quotas = total * weights / weights.sum()
    base = np.floor(quotas).astype(np.int64)
    leftover = int(total - base.sum())
    order = np.lexsort((np.arange(weights.size), base - quotas))
    base[order[:leftover]] += 1
    return base


def _class_directions(rng: np.random.Generator, classes: int, features: int) -> np.ndarray:
    """One unit direction per class, mutually orthogonal when space allows."""
    directions = np.zeros((classes, features))
    for c in range(classes):
        while True:
            vec = rng.standard_normal(features)
            if features >= classes:
                for prev in directions[:c]:
                    vec -= (vec @ prev) * prev
            norm = float(np.linalg.norm(vec))
            if norm > 1e-12:
                break
        directions[c] = vec / norm
    return directions


def generate_synthetic(spec: SyntheticSpec) -> Dataset:
    """Class-conditional Gaussian clusters, deterministic per spec.

    Labels are assigned round-robin (so class counts differ by at most one)
    and then shuffled; each feature row is its class mean plus unit noise.
    """
    rng = seeded_rng(spec.seed)
    means = spec.separation * _class_directions(rng, spec.classes, spec.features)
    labels = np.arange(spec.samples, dtype=np.int64) % spec.classes
    labels = labels[rng.permutation(spec.samples)]
    features = means[labels] + rng.standard_normal((spec.samples, spec.features))
    return Dataset(features, labels, spec.classes)


def partition_fixed(dataset: Dataset, proportions: Sequence[float], seed: int) -> PartitionPlan:
    """Shuffle sample indices and split them by fixed proportions."""
    props = _check_proportions(proportions)
    total = len(dataset)
    if total < 1:
        raise ValueError("cannot partition an empty dataset")
    sizes = _largest_remainder(total, props)
    if sizes.min() < 1:
        empty = int(np.argmin(sizes))
        raise ValueError(f"fixed split would leave platform {empty} without samples")
    order = seeded_rng(seed).permutation(total)
    bounds = np.cumsum(sizes)[:-1]
    plan = PartitionPlan(list(np.split(order, bounds)))
    plan.validate(total)
    return plan


def partition_dirichlet(dataset: Dataset, platforms: int, beta: float, seed: int) -> PartitionPlan:
    """Label-skewed split: each class is divided by a Dirichlet(beta) draw.

    Small beta concentrates a class on few platforms, large beta approaches
    a uniform split. Empty shards are repaired by moving one sample at a
    time from the largest shard, so every platform ends nonempty.
    """
    if platforms < 1:
        raise ValueError("need at least one platform")
    total = len(dataset)
    if total < platforms:
        raise ValueError(f"cannot spread {total} samples over {platforms} platforms")
    if not (np.isfinite(beta) and beta > 0):
        raise ValueError("dirichlet beta must be finite and positive")

    rng = seeded_rng(seed)
    shards: list[list[np.ndarray]] = [[] for _ in range(platforms)]
    for cls in range(dataset.classes):
        members = np.flatnonzero(dataset.labels == cls)
        if members.size == 0:
            continue
        share = rng.dirichlet(np.full(platforms, float(beta)))
        sizes = _largest_remainder(members.size, share)
        bounds = np.cumsum(sizes)[:-1]
        for pid, part in enumerate(np.split(members, bounds)):
            shards[pid].append(part)

    merged = [
        np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
        for parts in shards
    ]
    sizes = np.array([len(s) for s in merged])
    while sizes.min() < 1:
        donor = int(np.argmax(sizes))
        taker = int(np.argmin(sizes))
        merged[taker] = np.append(merged[taker], merged[donor][-1])
        merged[donor] = merged[donor][:-1]
        sizes[donor] -= 1
        sizes[taker] += 1

    plan = PartitionPlan(merged)
    plan.validate(total)
    return plan


def rebalance_dynamic(plan: PartitionPlan, measured_round_ms: Sequence[float]) -> PartitionPlan:
    """Resize shards proportional to measured throughput (size / round time).

    Platforms that finished fast get more samples; every platform keeps at
    least one. Moved samples come off the tails of donor shards, donors and
    recipients both visited in platform index order, so the result is
    deterministic for a given plan and measurement vector.
    """
    times = np.asarray(measured_round_ms, dtype=np.float64)
    if times.shape != (len(plan.shards),):
        raise ValueError("need exactly one round-time measurement per platform")
    if not np.all(np.isfinite(times)) or np.any(times <= 0):
        raise ValueError("round times must be finite and positive")

    old_sizes = plan.sizes
    total = int(old_sizes.sum())
    throughput = old_sizes / times
    new_sizes = _largest_remainder(total, throughput)
    while new_sizes.min() < 1:
        new_sizes[int(np.argmax(new_sizes))] -= 1
        new_sizes[int(np.argmin(new_sizes))] += 1

    pool: list[np.ndarray] = []
    kept: list[np.ndarray] = []
    for shard, size in zip(plan.shards, new_sizes):
        keep = min(len(shard), int(size))
        kept.append(shard[:keep].copy())
        if keep < len(shard):
            pool.append(shard[keep:])
    spare = np.concatenate(pool) if pool else np.empty(0, dtype=np.int64)

    cursor = 0
    shards: list[np.ndarray] = []
    for shard, size in zip(kept, new_sizes):
        need = int(size) - len(shard)
        if need > 0:
            shard = np.concatenate([shard, spare[cursor : cursor + need]])
            cursor += need
        shards.append(shard)

    out = PartitionPlan(shards)
    out.validate(total)
    return out


def export_csv(dataset: Dataset, path: str) -> None:
    """Write the dataset as f0..f{d-1},label rows with round-trippable floats."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([f"f{i}" for i in range(dataset.features.shape[1])] + ["label"])
        for row, label in zip(dataset.features, dataset.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


def import_csv(path: str) -> Dataset:
    """Read a dataset written by `export_csv`; classes = max label + 1."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        width = len(header) - 1
        if width < 1 or header[-1] != "label":
            raise ValueError(f"{path}: not a dataset csv")
        features: list[list[float]] = []
        labels: list[int] = []
        for row in reader:
            features.append([float(v) for v in row[:width]])
            labels.append(int(row[width]))
    label_arr = np.asarray(labels, dtype=np.int64)
    return Dataset(np.asarray(features), label_arr, int(label_arr.max()) + 1)
