import numpy as np
import pytest

from crossfed import (
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

RAW = ProtocolProfile("raw", per_message_overhead_bytes=0, handshake_ms=0.0, per_byte_factor=1.0)


class TestCompress:
    def test_picks_largest_magnitude(self):
        grad = np.array([3.0, -5.0, 1.0])
        update, residual = compress_topk(grad, 1 / 3, np.zeros(3))
        assert update.indices.tolist() == [1]
        assert update.values.tolist() == [-5.0]
        assert residual.tolist() == [3.0, 0.0, 1.0]

    def test_magnitude_tie_prefers_lower_index(self):
        grad = np.array([2.0, -2.0, 2.0])
        update, _ = compress_topk(grad, 1 / 3, np.zeros(3))
        assert update.indices.tolist() == [0]

    def test_two_of_three(self):
        grad = np.array([2.0, -2.0, 2.0])
        update, residual = compress_topk(grad, 2 / 3, np.zeros(3))
        assert update.indices.tolist() == [0, 1]
        assert residual.tolist() == [0.0, 0.0, 2.0]

    def test_k_rounds_up(self):
        # 10 entries at 0.25 keeps ceil(2.5) = 3
        grad = np.arange(10, dtype=float) + 1.0
        update, _ = compress_topk(grad, 0.25, np.zeros(10))
        assert len(update.values) == 3
        assert update.indices.tolist() == [7, 8, 9]

    def test_full_fraction_keeps_everything(self):
        grad = np.array([1.0, -2.0, 0.0])
        update, residual = compress_topk(grad, 1.0, np.zeros(3))
        assert update.indices.tolist() == [0, 1, 2]
        assert residual.tolist() == [0.0, 0.0, 0.0]

    def test_residual_joins_next_round(self):
        # dropped mass must come back: a value skipped once wins later
        grad = np.array([1.0, 0.9])
        update1, residual = compress_topk(grad, 0.5, np.zeros(2))
        assert update1.indices.tolist() == [0]
        update2, _ = compress_topk(grad, 0.5, residual)
        assert update2.indices.tolist() == [1]
        assert update2.values.tolist() == [1.8]

    def test_conservation_exact(self):
        # transmitted + new residual == gradient + old residual, bitwise
        rng = np.random.default_rng(17)
        for _ in range(200):
            dim = int(rng.integers(1, 40))
            grad = rng.normal(size=dim)
            residual = rng.normal(size=dim)
            fraction = float(rng.uniform(0.05, 1.0))
            update, new_residual = compress_topk(grad, fraction, residual)
            total = new_residual.copy()
            total[update.indices] += update.values
            assert np.array_equal(total, grad + residual)

    def test_indices_strictly_ascending(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            grad = rng.normal(size=30)
            update, _ = compress_topk(grad, 0.3, np.zeros(30))
            assert np.all(np.diff(update.indices) > 0)

    def test_bad_fraction_rejected(self):
        grad = np.zeros(4)
        with pytest.raises(ValueError):
            compress_topk(grad, 0.0, np.zeros(4))
        with pytest.raises(ValueError):
            compress_topk(grad, 1.5, np.zeros(4))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            compress_topk(np.zeros(4), 0.5, np.zeros(3))


class TestDecompress:
    def test_scatter(self):
        update = SparseUpdate(np.array([1, 3]), np.array([5.0, -2.0]), dim=5)
        assert decompress(update).tolist() == [0.0, 5.0, 0.0, -2.0, 0.0]

    def test_compose_with_compress(self):
        grad = np.array([4.0, 1.0, -3.0, 0.5])
        update, residual = compress_topk(grad, 0.5, np.zeros(4))
        assert np.array_equal(decompress(update) + residual, grad)


class TestSparseUpdate:
    def test_rejects_unsorted_indices(self):
        with pytest.raises(ValueError):
            SparseUpdate(np.array([3, 1]), np.array([1.0, 2.0]), dim=5)

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            SparseUpdate(np.array([2, 2]), np.array([1.0, 2.0]), dim=5)

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            SparseUpdate(np.array([0, 1]), np.array([1.0]), dim=5)

    def test_rejects_index_out_of_range(self):
        with pytest.raises(ValueError):
            SparseUpdate(np.array([4]), np.array([1.0]), dim=4)
        with pytest.raises(ValueError):
            SparseUpdate(np.array([-1]), np.array([1.0]), dim=4)


class TestWireBytes:
    def test_dense_baseline(self):
        assert wire_bytes(DensePayload(1000), RAW) == 8000

    def test_sparse_baseline(self):
        raw64 = ProtocolProfile("raw64", 64, 0.0, 1.0)
        assert wire_bytes(SparsePayload(100), raw64) == 1264

    def test_dense_grpc_example(self):
        assert wire_bytes(DensePayload(1000), GRPC_LIKE) == 8288

    def test_factor_rounds_up(self):
        bump = ProtocolProfile("bump", 0, 0.0, 1.001)
        # 8 * 1.001 = 8.008 rounds to 9
        assert wire_bytes(DensePayload(1), bump) == 9

    def test_presets(self):
        assert GRPC_LIKE.per_message_overhead_bytes == 128
        assert GRPC_LIKE.handshake_ms == 2.0
        assert GRPC_LIKE.per_byte_factor == 1.02
        assert QUIC_LIKE.per_message_overhead_bytes == 64
        assert QUIC_LIKE.handshake_ms == 0.5
        assert QUIC_LIKE.per_byte_factor == 1.01
        assert PROTOCOL_PRESETS["grpc-like"] is GRPC_LIKE
        assert PROTOCOL_PRESETS["quic-like"] is QUIC_LIKE

    def test_sparse_beats_dense_below_two_thirds(self):
        # 12 bytes per kept entry vs 8 per dense value: sparse wins whenever
        # nnz < 2/3 of the dimension, for any protocol
        rng = np.random.default_rng(2)
        for protocol in (RAW, GRPC_LIKE, QUIC_LIKE):
            for _ in range(50):
                dim = int(rng.integers(3, 5000))
                nnz = int(rng.integers(1, max(2, (2 * dim) // 3)))
                if 3 * nnz >= 2 * dim:
                    continue
                sparse = wire_bytes(SparsePayload(nnz), protocol)
                dense = wire_bytes(DensePayload(dim), protocol)
                assert sparse < dense

    def test_break_even_at_two_thirds(self):
        assert wire_bytes(SparsePayload(2), RAW) == wire_bytes(DensePayload(3), RAW)

    def test_constants(self):
        assert BYTES_PER_VALUE == 8
        assert BYTES_PER_INDEX == 4

    def test_unknown_payload_rejected(self):
        with pytest.raises(TypeError):
            wire_bytes("not a payload", RAW)

    def test_validation(self):
        with pytest.raises(ValueError):
            ProtocolProfile("bad", -1, 0.0, 1.0)
        with pytest.raises(ValueError):
            ProtocolProfile("bad", 0, -0.5, 1.0)
        with pytest.raises(ValueError):
            ProtocolProfile("bad", 0, 0.0, 0.9)
        with pytest.raises(ValueError):
            DensePayload(-1)
        with pytest.raises(ValueError):
            SparsePayload(-1)


class TestTransferTime:
    def test_additive_parts(self):
        link = LinkProfile(latency_ms=10.0, bandwidth_bytes_per_ms=100.0)
        # 2 handshake + 10 latency + 500/100 transmit
        assert transfer_time(500, link, GRPC_LIKE) == pytest.approx(17.0)

    def test_zero_bytes_still_pays_latency(self):
        link = LinkProfile(5.0, 1000.0)
        assert transfer_time(0, link, QUIC_LIKE) == pytest.approx(5.5)

    def test_bandwidth_scales(self):
        slow = LinkProfile(0.0, 10.0)
        fast = LinkProfile(0.0, 1000.0)
        gap = transfer_time(8000, slow, RAW) - transfer_time(8000, fast, RAW)
        assert gap == pytest.approx(800.0 - 8.0)

    def test_link_validation(self):
        with pytest.raises(ValueError):
            LinkProfile(-1.0, 100.0)
        with pytest.raises(ValueError):
            LinkProfile(1.0, 0.0)

    def test_negative_bytes_rejected(self):
        with pytest.raises(ValueError):
            transfer_time(-1, LinkProfile(1.0, 1.0), RAW)


class TestCommLedger:
    def test_round_accumulation(self):
        ledger = CommLedger()
        ledger.record(100)
        ledger.record(50)
        assert ledger.end_round() == 150
        ledger.record(25)
        assert ledger.end_round() == 25
        assert ledger.per_round_bytes == [150, 25]
        assert ledger.cumulative_bytes == 175
        assert ledger.messages == 3

    def test_pending_counts_toward_cumulative(self):
        ledger = CommLedger()
        ledger.record(40)
        assert ledger.cumulative_bytes == 40

    def test_empty_round(self):
        ledger = CommLedger()
        assert ledger.end_round() == 0
        assert ledger.cumulative_bytes == 0

    def test_rejects_negative(self):
        ledger = CommLedger()
        with pytest.raises(ValueError):
            ledger.record(-5)
