"""Deterministic desk-scale simulator for federated training across clouds."""

from .aggregate import (
    AggregationStrategy,
    AsyncStrategy,
    DpMechanism,
    DpSpec,
    DynamicWeightedStrategy,
    DynamicWeights,
    FedAvgStrategy,
    GradientStrategy,
    LocalResult,
    async_merge,
    dp_privatize,
    dynamic_aggregate,
    dynamic_weights,
    fedavg,
    gradient_aggregate,
    staleness_weight,
)
from .cli import (
    ConfigError,
    load_experiment_file,
    read_metrics_csv,
    write_metrics_csv,
)
from .datagen import (
    Dataset,
    DirichletPartition,
    DynamicPartition,
    FixedPartition,
    PartitionPlan,
    PartitionStrategy,
    SyntheticSpec,
    export_csv,
    generate_synthetic,
    import_csv,
    partition_dirichlet,
    partition_fixed,
    rebalance_dynamic,
)
from .engine import (
    CompressionSpec,
    FleetConfig,
    PlatformSpec,
    RoundMetrics,
    RunConfig,
    evaluate,
    local_train,
    run_async,
    run_sync,
)
from .netsim import (
    BYTES_PER_INDEX,
    BYTES_PER_VALUE,
    GRPC_LIKE,
    PROTOCOL_PRESETS,
    QUIC_LIKE,
    CommLedger,
    DensePayload,
    LinkProfile,
    ProtocolProfile,
    SparsePayload,
    SparseUpdate,
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
    backward,
    combine,
    forward_loss,
    init_params,
    logits,
    loss_and_grad,
    sgd_step,
)

__version__ = "0.1.0"
