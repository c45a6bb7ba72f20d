"""Command-line harness: run experiments, compare results, sweep parameters.

Usage:
    crossfed run experiments.json --out results/ [--seed 7]
    crossfed compare --out results/ fedavg_base dynamic_base
    crossfed sweep experiments.json --param lr --values 0.05,0.1,0.2 --out sweeps/
    crossfed validate experiments.json

The experiment file is JSON: a `version` tag, an optional `defaults` object
merged underneath every run, and a `runs` object mapping unique names to run
configurations (full schema in README.md). Each run writes
`<name>.metrics.csv` and `<name>.summary.json` into the output directory.
All reported times are simulated model time, never wall clock.

Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import os
import re
import sys
from typing import Any, Sequence

from .aggregate import (
    AsyncStrategy,
    DpSpec,
    DynamicWeightedStrategy,
    FedAvgStrategy,
    GradientStrategy,
)
from .datagen import DirichletPartition, DynamicPartition, FixedPartition
from .engine import (
    CompressionSpec,
    FleetConfig,
    PlatformSpec,
    RoundMetrics,
    RunConfig,
    run_async,
    run_sync,
)
from .netsim import PROTOCOL_PRESETS, LinkProfile, ProtocolProfile
from .params import ModelSpec
from .datagen import SyntheticSpec

SCHEMA_VERSION = "1"
SWEEPABLE = ("alpha0", "beta", "k_fraction", "local_epochs", "lr")
_NAME_RE = re.compile(r"^[A-Za-z0-9._-]+$")

MS_PER_HOUR = 3.6e6
BYTES_PER_MB = 1e6


class ConfigError(ValueError):
    """Invalid experiment file content; the message names the offending field."""


# ---------------------------------------------------------------------------
# config file parsing


def _reject_duplicates(pairs: list[tuple[str, Any]]) -> dict:
    out: dict[str, Any] = {}
    for key, value in pairs:
        if key in out:
            raise ConfigError(f"duplicate key {key!r} in config")
        out[key] = value
    return out


def _load_json(path: str) -> Any:
    try:
        with open(path) as handle:
            return json.load(handle, object_pairs_hook=_reject_duplicates)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror or exc})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def _check_known(obj: dict, allowed: set[str], path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown field {sorted(unknown)[0]!r}")


def _get(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise ConfigError(f"{path}.{key}: missing required field")
    return obj[key]


def _obj(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected an object")
    return value


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{path}: expected a string")
    return value


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number")
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer")
    return value


def _build(path: str, ctor: Any, /, **kwargs: Any) -> Any:
    try:
        return ctor(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_model(obj: dict, path: str) -> ModelSpec:
    _check_known(obj, {"kind", "features", "classes", "hidden"}, path)
    hidden = obj.get("hidden")
    return _build(
        path,
        ModelSpec,
        kind=_string(_get(obj, "kind", path), f"{path}.kind"),
        features=_integer(_get(obj, "features", path), f"{path}.features"),
        classes=_integer(_get(obj, "classes", path), f"{path}.classes"),
        hidden=None if hidden is None else _integer(hidden, f"{path}.hidden"),
    )


def _parse_data(obj: dict, path: str) -> SyntheticSpec:
    _check_known(obj, {"samples", "features", "classes", "separation", "seed"}, path)
    return _build(
        path,
        SyntheticSpec,
        samples=_integer(_get(obj, "samples", path), f"{path}.samples"),
        features=_integer(_get(obj, "features", path), f"{path}.features"),
        classes=_integer(_get(obj, "classes", path), f"{path}.classes"),
        separation=_number(_get(obj, "separation", path), f"{path}.separation"),
        seed=_integer(_get(obj, "seed", path), f"{path}.seed"),
    )


def _parse_link(obj: dict, path: str) -> LinkProfile:
    _check_known(obj, {"latency_ms", "bandwidth_bytes_per_ms"}, path)
    return _build(
        path,
        LinkProfile,
        latency_ms=_number(_get(obj, "latency_ms", path), f"{path}.latency_ms"),
        bandwidth_bytes_per_ms=_number(
            _get(obj, "bandwidth_bytes_per_ms", path), f"{path}.bandwidth_bytes_per_ms"
        ),
    )


def _parse_platform(obj: dict, path: str) -> PlatformSpec:
    _check_known(obj, {"id", "compute_rate", "uplink", "downlink"}, path)
    return _build(
        path,
        PlatformSpec,
        id=_integer(_get(obj, "id", path), f"{path}.id"),
        compute_rate=_number(_get(obj, "compute_rate", path), f"{path}.compute_rate"),
        uplink=_parse_link(_obj(_get(obj, "uplink", path), f"{path}.uplink"), f"{path}.uplink"),
        downlink=_parse_link(
            _obj(_get(obj, "downlink", path), f"{path}.downlink"), f"{path}.downlink"
        ),
    )


def _parse_partition(obj: dict, path: str):
    kind = _string(_get(obj, "kind", path), f"{path}.kind")
    if kind == "fixed":
        _check_known(obj, {"kind", "proportions"}, path)
        raw = _get(obj, "proportions", path)
        if not isinstance(raw, list):
            raise ConfigError(f"{path}.proportions: expected a list of numbers")
        props = tuple(_number(v, f"{path}.proportions[{i}]") for i, v in enumerate(raw))
        return _build(path, FixedPartition, proportions=props)
    if kind == "dirichlet":
        _check_known(obj, {"kind", "beta", "proportions"}, path)
        props = None
        if obj.get("proportions") is not None:
            raw = obj["proportions"]
            if not isinstance(raw, list):
                raise ConfigError(f"{path}.proportions: expected a list of numbers")
            props = tuple(_number(v, f"{path}.proportions[{i}]") for i, v in enumerate(raw))
        return _build(
            path,
            DirichletPartition,
            beta=_number(_get(obj, "beta", path), f"{path}.beta"),
            proportions=props,
        )
    if kind == "dynamic":
        _check_known(obj, {"kind", "rebalance_every"}, path)
        return _build(
            path,
            DynamicPartition,
            rebalance_every=_integer(
                _get(obj, "rebalance_every", path), f"{path}.rebalance_every"
            ),
        )
    raise ConfigError(f"{path}.kind: unknown partition kind {kind!r}")


def _parse_protocol(value: Any, path: str) -> ProtocolProfile:
    if isinstance(value, str):
        if value not in PROTOCOL_PRESETS:
            raise ConfigError(
                f"{path}: unknown protocol preset {value!r}, "
                f"expected one of {sorted(PROTOCOL_PRESETS)}"
            )
        return PROTOCOL_PRESETS[value]
    obj = _obj(value, path)
    _check_known(
        obj, {"name", "per_message_overhead_bytes", "handshake_ms", "per_byte_factor"}, path
    )
    return _build(
        path,
        ProtocolProfile,
        name=_string(_get(obj, "name", path), f"{path}.name"),
        per_message_overhead_bytes=_integer(
            _get(obj, "per_message_overhead_bytes", path),
            f"{path}.per_message_overhead_bytes",
        ),
        handshake_ms=_number(_get(obj, "handshake_ms", path), f"{path}.handshake_ms"),
        per_byte_factor=_number(
            _get(obj, "per_byte_factor", path), f"{path}.per_byte_factor"
        ),
    )


def _parse_fleet(obj: dict, path: str) -> FleetConfig:
    _check_known(obj, {"platforms", "partition", "protocol"}, path)
    raw = _get(obj, "platforms", path)
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{path}.platforms: expected a nonempty list")
    platforms = [
        _parse_platform(_obj(item, f"{path}.platforms[{i}]"), f"{path}.platforms[{i}]")
        for i, item in enumerate(raw)
    ]
    return _build(
        path,
        FleetConfig,
        platforms=platforms,
        partition=_parse_partition(
            _obj(_get(obj, "partition", path), f"{path}.partition"), f"{path}.partition"
        ),
        protocol=_parse_protocol(_get(obj, "protocol", path), f"{path}.protocol"),
    )


def _parse_strategy(obj: dict, path: str, default_lr: float):
    kind = _string(_get(obj, "kind", path), f"{path}.kind")
    if kind == "fedavg":
        _check_known(obj, {"kind"}, path)
        return FedAvgStrategy()
    if kind == "dynamic-weighted":
        _check_known(obj, {"kind"}, path)
        return DynamicWeightedStrategy()
    if kind == "gradient":
        _check_known(obj, {"kind", "lr"}, path)
        lr = _number(obj["lr"], f"{path}.lr") if "lr" in obj else default_lr
        return _build(path, GradientStrategy, lr=lr)
    if kind == "async":
        _check_known(obj, {"kind", "alpha0", "staleness_exponent"}, path)
        return _build(
            path,
            AsyncStrategy,
            alpha0=_number(_get(obj, "alpha0", path), f"{path}.alpha0"),
            staleness_exponent=_number(
                obj.get("staleness_exponent", 0.0), f"{path}.staleness_exponent"
            ),
        )
    raise ConfigError(f"{path}.kind: unknown strategy kind {kind!r}")


def _parse_dp(obj: dict, path: str) -> DpSpec:
    _check_known(obj, {"clip_norm", "sigma", "seed"}, path)
    clip = _get(obj, "clip_norm", path)
    if isinstance(clip, str):
        if clip != "inf":
            raise ConfigError(f"{path}.clip_norm: expected a number or \"inf\"")
        clip_norm = float("inf")
    else:
        clip_norm = _number(clip, f"{path}.clip_norm")
    return _build(
        path,
        DpSpec,
        clip_norm=clip_norm,
        sigma=_number(_get(obj, "sigma", path), f"{path}.sigma"),
        seed=_integer(_get(obj, "seed", path), f"{path}.seed"),
    )


def _parse_run_config(obj: dict, path: str) -> RunConfig:
    _check_known(
        obj,
        {
            "model",
            "data",
            "fleet",
            "strategy",
            "rounds",
            "local_epochs",
            "batch_size",
            "lr",
            "seed",
            "compression",
            "dp",
            "eval_fraction",
        },
        path,
    )
    lr = _number(_get(obj, "lr", path), f"{path}.lr")
    compression = None
    if obj.get("compression") is not None:
        comp = _obj(obj["compression"], f"{path}.compression")
        _check_known(comp, {"k_fraction"}, f"{path}.compression")
        compression = _build(
            f"{path}.compression",
            CompressionSpec,
            k_fraction=_number(
                _get(comp, "k_fraction", f"{path}.compression"),
                f"{path}.compression.k_fraction",
            ),
        )
    dp = None
    if obj.get("dp") is not None:
        dp = _parse_dp(_obj(obj["dp"], f"{path}.dp"), f"{path}.dp")
    return _build(
        path,
        RunConfig,
        model=_parse_model(_obj(_get(obj, "model", path), f"{path}.model"), f"{path}.model"),
        data=_parse_data(_obj(_get(obj, "data", path), f"{path}.data"), f"{path}.data"),
        fleet=_parse_fleet(_obj(_get(obj, "fleet", path), f"{path}.fleet"), f"{path}.fleet"),
        strategy=_parse_strategy(
            _obj(_get(obj, "strategy", path), f"{path}.strategy"), f"{path}.strategy", lr
        ),
        rounds=_integer(_get(obj, "rounds", path), f"{path}.rounds"),
        local_epochs=_integer(_get(obj, "local_epochs", path), f"{path}.local_epochs"),
        batch_size=_integer(_get(obj, "batch_size", path), f"{path}.batch_size"),
        lr=lr,
        seed=_integer(_get(obj, "seed", path), f"{path}.seed"),
        compression=compression,
        dp=dp,
        eval_fraction=_number(obj.get("eval_fraction", 0.2), f"{path}.eval_fraction"),
    )


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_experiment_file(
    path: str, seed_override: int | None = None
) -> list[tuple[str, RunConfig, dict]]:
    """Parse and validate every run entry; returns (name, config, resolved)."""
    raw = _load_json(path)
    top = _obj(raw, path)
    _check_known(top, {"version", "defaults", "runs"}, path)
    version = _string(_get(top, "version", path), f"{path}.version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"{path}.version: unsupported version {version!r}, expected {SCHEMA_VERSION!r}"
        )
    defaults = _obj(top.get("defaults", {}), f"{path}.defaults")
    runs = _obj(_get(top, "runs", path), f"{path}.runs")
    if not runs:
        raise ConfigError(f"{path}.runs: at least one run entry is required")

    entries = []
    for name, body in runs.items():
        if not _NAME_RE.match(name):
            raise ConfigError(
                f"{path}.runs: entry name {name!r} must match {_NAME_RE.pattern}"
            )
        resolved = _merge(defaults, _obj(body, f"{path}.runs.{name}"))
        if seed_override is not None:
            resolved["seed"] = seed_override
        entries.append((name, _parse_run_config(resolved, f"runs.{name}"), resolved))
    return entries


# ---------------------------------------------------------------------------
# artifacts

METRIC_COLUMNS = (
    "round",
    "eval_loss",
    "eval_accuracy",
    "round_bytes",
    "cumulative_bytes",
    "simulated_ms",
)


def write_metrics_csv(path: str, metrics: Sequence[RoundMetrics]) -> None:
    """One row per round; floats use repr so a parse/serialize cycle is exact."""
    n_platforms = len(metrics[0].per_platform_losses)
    header = list(METRIC_COLUMNS) + [f"per_platform_loss_{i}" for i in range(n_platforms)]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in metrics:
            writer.writerow(
                [
                    row.round,
                    repr(row.eval_loss),
                    repr(row.eval_accuracy),
                    row.round_bytes,
                    row.cumulative_bytes,
                    repr(row.simulated_ms),
                ]
                + [repr(v) for v in row.per_platform_losses]
            )


def read_metrics_csv(path: str) -> list[RoundMetrics]:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if tuple(header[: len(METRIC_COLUMNS)]) != METRIC_COLUMNS:
            raise ValueError(f"{path}: unrecognized metrics header")
        rows = []
        for record in reader:
            rows.append(
                RoundMetrics(
                    round=int(record[0]),
                    eval_loss=float(record[1]),
                    eval_accuracy=float(record[2]),
                    round_bytes=int(record[3]),
                    cumulative_bytes=int(record[4]),
                    simulated_ms=float(record[5]),
                    per_platform_losses=tuple(float(v) for v in record[6:]),
                )
            )
    return rows


def _execute_entry(name: str, config: RunConfig, resolved: dict, out_dir: str) -> dict:
    runner = run_async if isinstance(config.strategy, AsyncStrategy) else run_sync
    metrics = runner(config)
    write_metrics_csv(os.path.join(out_dir, f"{name}.metrics.csv"), metrics)
    summary = {
        "name": name,
        "final_accuracy": metrics[-1].eval_accuracy,
        "best_accuracy": max(m.eval_accuracy for m in metrics),
        "final_loss": metrics[-1].eval_loss,
        "cumulative_bytes": metrics[-1].cumulative_bytes,
        "total_simulated_ms": metrics[-1].simulated_ms,
        "seed": config.seed,
        "config": resolved,
    }
    with open(os.path.join(out_dir, f"{name}.summary.json"), "w") as handle:
        json.dump(summary, handle, indent=2, sort_keys=True)
        handle.write("\n")
    print(
        f"{name}: {len(metrics)} rounds, final accuracy "
        f"{summary['final_accuracy']:.4f}, final loss {summary['final_loss']:.4f}, "
        f"{summary['cumulative_bytes']} bytes, "
        f"{summary['total_simulated_ms'] / MS_PER_HOUR:.4f} simulated hours"
    )
    return summary


# ---------------------------------------------------------------------------
# subcommands


def cmd_run(config_path: str, out_dir: str, seed: int | None = None) -> int:
    entries = load_experiment_file(config_path, seed_override=seed)
    os.makedirs(out_dir, exist_ok=True)
    for name, config, resolved in entries:
        _execute_entry(name, config, resolved, out_dir)
    return 0


def _load_summary(out_dir: str, name: str) -> dict:
    path = os.path.join(out_dir, f"{name}.summary.json")
    if not os.path.exists(path):
        raise ConfigError(f"{path}: no summary found for entry {name!r}")
    with open(path) as handle:
        return json.load(handle)


def _comparison_rows(out_dir: str, names: Sequence[str]) -> list[dict]:
    rows = []
    for name in names:
        summary = _load_summary(out_dir, name)
        rows.append(
            {
                "name": name,
                "cumulative_mb": summary["cumulative_bytes"] / BYTES_PER_MB,
                "simulated_hours": summary["total_simulated_ms"] / MS_PER_HOUR,
                "final_accuracy_pct": 100.0 * summary["final_accuracy"],
                "final_loss": summary["final_loss"],
                "best_accuracy_pct": 100.0 * summary["best_accuracy"],
            }
        )
    return rows


def _render_comparison(out_dir: str, names: Sequence[str]) -> int:
    rows = _comparison_rows(out_dir, names)
    print("Strategy comparison (all times are simulated model time, not wall clock)")
    print("| Strategy | Cumulative MB | Simulated Hours | Final Accuracy % | Final Loss | Best Accuracy % |")
    print("| --- | --- | --- | --- | --- | --- |")
    for row in rows:
        print(
            f"| {row['name']} | {row['cumulative_mb']:.3f} | {row['simulated_hours']:.4f} "
            f"| {row['final_accuracy_pct']:.2f} | {row['final_loss']:.4f} "
            f"| {row['best_accuracy_pct']:.2f} |"
        )
    csv_path = os.path.join(out_dir, "compare.csv")
    with open(csv_path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            [
                "name",
                "cumulative_mb",
                "simulated_hours",
                "final_accuracy_pct",
                "final_loss",
                "best_accuracy_pct",
            ]
        )
        for row in rows:
            writer.writerow(
                [
                    row["name"],
                    repr(row["cumulative_mb"]),
                    repr(row["simulated_hours"]),
                    repr(row["final_accuracy_pct"]),
                    repr(row["final_loss"]),
                    repr(row["best_accuracy_pct"]),
                ]
            )
    return 0


def cmd_compare(out_dir: str, names: Sequence[str]) -> int:
    return _render_comparison(out_dir, names)


def _apply_sweep_value(entry: dict, param: str, token: str) -> None:
    def as_float() -> float:
        try:
            return float(token)
        except ValueError:
            raise ConfigError(f"sweep value {token!r} is not a number") from None

    if param == "lr":
        entry["lr"] = as_float()
    elif param == "local_epochs":
        try:
            entry["local_epochs"] = int(token)
        except ValueError:
            raise ConfigError(f"sweep value {token!r} is not an integer") from None
    elif param == "beta":
        partition = entry.get("fleet", {}).get("partition", {})
        if partition.get("kind") != "dirichlet":
            raise ConfigError("sweeping beta requires a dirichlet partition in the base config")
        partition["beta"] = as_float()
    elif param == "k_fraction":
        compression = entry.get("compression")
        if not isinstance(compression, dict):
            compression = {}
            entry["compression"] = compression
        compression["k_fraction"] = as_float()
    elif param == "alpha0":
        strategy = entry.get("strategy", {})
        if strategy.get("kind") != "async":
            raise ConfigError("sweeping alpha0 requires the async strategy in the base config")
        strategy["alpha0"] = as_float()
    else:  # guarded by argparse choices; kept for programmatic callers
        raise ConfigError(f"unknown sweep parameter {param!r}, expected one of {SWEEPABLE}")


def cmd_sweep(config_path: str, param: str, values: Sequence[str], out_dir: str) -> int:
    if param not in SWEEPABLE:
        raise ConfigError(f"unknown sweep parameter {param!r}, expected one of {SWEEPABLE}")
    tokens = [v.strip() for v in values]
    if not tokens or any(not t for t in tokens):
        raise ConfigError("sweep values must be a nonempty comma-separated list")

    raw = _load_json(config_path)
    top = _obj(raw, config_path)
    _check_known(top, {"version", "defaults", "runs"}, config_path)
    version = _string(_get(top, "version", config_path), f"{config_path}.version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"{config_path}.version: unsupported version {version!r}")
    runs = _obj(_get(top, "runs", config_path), f"{config_path}.runs")
    if len(runs) != 1:
        raise ConfigError(
            f"{config_path}.runs: sweep needs exactly one base run entry, found {len(runs)}"
        )
    base_name, base_body = next(iter(runs.items()))
    if not _NAME_RE.match(base_name):
        raise ConfigError(f"{config_path}.runs: entry name {base_name!r} is not usable")
    merged = _merge(
        _obj(top.get("defaults", {}), f"{config_path}.defaults"),
        _obj(base_body, f"{config_path}.runs.{base_name}"),
    )

    derived = []
    for token in tokens:
        entry = copy.deepcopy(merged)
        _apply_sweep_value(entry, param, token)
        name = f"{base_name}_{param}_{token}"
        if not _NAME_RE.match(name):
            raise ConfigError(f"sweep value {token!r} produces an unusable run name")
        config = _parse_run_config(entry, f"runs.{name}")
        derived.append((name, config, entry))

    os.makedirs(out_dir, exist_ok=True)
    for name, config, resolved in derived:
        _execute_entry(name, config, resolved, out_dir)
    return _render_comparison(out_dir, [name for name, _, _ in derived])


def cmd_validate(config_path: str) -> int:
    entries = load_experiment_file(config_path)
    for name, config, resolved in entries:
        kind = resolved["strategy"]["kind"]
        print(
            f"{name}: ok ({kind}, {config.rounds} rounds, "
            f"{len(config.fleet.platforms)} platforms, seed {config.seed})"
        )
    print(f"{config_path}: {len(entries)} run(s) valid")
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossfed",
        description="Deterministic simulator for federated training across cloud platforms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run every entry in an experiment file")
    p_run.add_argument("config", help="experiment JSON file")
    p_run.add_argument("--out", required=True, help="output directory for metrics/summaries")
    p_run.add_argument("--seed", type=int, default=None, help="override every run seed")

    p_cmp = sub.add_parser("compare", help="tabulate previously written summaries")
    p_cmp.add_argument("--out", required=True, help="directory holding <name>.summary.json files")
    p_cmp.add_argument("names", nargs="+", help="run names, in desired row order")

    p_sweep = sub.add_parser("sweep", help="re-run one config while varying a parameter")
    p_sweep.add_argument("config", help="experiment JSON file with exactly one run entry")
    p_sweep.add_argument("--param", required=True, choices=SWEEPABLE)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--out", required=True)

    p_val = sub.add_parser("validate", help="check an experiment file without running it")
    p_val.add_argument("config")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.config, args.out, args.seed)
        if args.command == "compare":
            return cmd_compare(args.out, args.names)
        if args.command == "sweep":
            return cmd_sweep(args.config, args.param, args.values.split(","), args.out)
        return cmd_validate(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any runtime failure maps to exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
