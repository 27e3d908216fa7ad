"""Adapter configuration round-trips and parameter arithmetic."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amdkit.finetune import (
    InvalidConfigError,
    LoraConfig,
    ModelShape,
    UnknownTargetMatrixError,
    emit_config,
    lora_param_count,
    parse_config,
)

SHAPE_13B = ModelShape.square_attention(hidden_dim=5120, num_layers=40, total_params=13_000_000_000)


class TestConfig:
    def test_defaults_emitted_verbatim(self):
        doc = emit_config(LoraConfig())
        assert doc["learning_rate"] == 2e-5
        assert doc["lora_r"] == 64
        assert doc["lora_alpha"] == 16
        assert doc["lora_dropout"] == 0.1
        assert doc["weight_decay"] == 0.01
        assert doc["scheduler"] == "cosine"
        assert doc["warmup_ratio"] == 0.03
        assert doc["target_matrices"] == ["query", "value"]

    def test_invalid_r(self):
        with pytest.raises(InvalidConfigError) as err:
            emit_config(LoraConfig(lora_r=0))
        assert err.value.field_name == "lora_r"

    def test_invalid_dropout_and_warmup(self):
        with pytest.raises(InvalidConfigError):
            emit_config(LoraConfig(lora_dropout=1.0))
        with pytest.raises(InvalidConfigError):
            emit_config(LoraConfig(warmup_ratio=1.0))

    def test_round_trip(self):
        cfg = LoraConfig(lora_r=8, target_matrices=("query",))
        assert parse_config(emit_config(cfg)) == cfg

    @given(
        st.integers(1, 512),
        st.floats(0.0, 0.99),
        st.floats(0.0, 0.99),
    )
    @settings(max_examples=50)
    def test_round_trip_property(self, r, dropout, warmup):
        cfg = LoraConfig(lora_r=r, lora_dropout=dropout, warmup_ratio=warmup)
        assert parse_config(emit_config(cfg)) == cfg


class TestParamCount:
    def test_13b_shape(self):
        # 64 * (5120 + 5120) * 40 layers * 2 matrices
        adapter, fraction = lora_param_count(SHAPE_13B, LoraConfig())
        assert adapter == 52_428_800
        assert fraction == pytest.approx(0.00403, abs=2e-4)

    def test_tiny_shape(self):
        shape = ModelShape(4, 1, 1000, {"query": (4, 4)})
        adapter, _ = lora_param_count(shape, LoraConfig(lora_r=1, target_matrices=("query",)))
        assert adapter == 8  # 1 * (4 + 4)

    def test_unknown_target(self):
        with pytest.raises(UnknownTargetMatrixError):
            lora_param_count(SHAPE_13B, LoraConfig(target_matrices=("query", "gate")))

    @given(st.integers(1, 128), st.integers(1, 64), st.integers(8, 4096))
    @settings(max_examples=60)
    def test_closed_form(self, r, layers, dim):
        # independent oracle: explicit loop over layers and matrices
        shape = ModelShape.square_attention(dim, layers, 10**9)
        cfg = LoraConfig(lora_r=r)
        adapter, fraction = lora_param_count(shape, cfg)
        expected = 0
        for _ in range(layers):
            for name in cfg.target_matrices:
                d_in, d_out = shape.matrix_dims[name]
                expected += r * (d_in + d_out)
        assert adapter == expected
        assert fraction == expected / shape.total_params

    @given(st.integers(1, 256), st.integers(1, 48))
    @settings(max_examples=60)
    def test_linear_in_r_and_layers(self, r, layers):
        shape1 = ModelShape.square_attention(512, layers, 10**8)
        shape2 = ModelShape.square_attention(512, 2 * layers, 10**8)
        a1, _ = lora_param_count(shape1, LoraConfig(lora_r=r))
        a2, _ = lora_param_count(shape1, LoraConfig(lora_r=2 * r))
        a3, _ = lora_param_count(shape2, LoraConfig(lora_r=r))
        assert a2 == 2 * a1
        assert a3 == 2 * a1
