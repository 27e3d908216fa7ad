"""Low-rank adapter fine-tune configuration export and size arithmetic.

Training itself happens elsewhere (GPU stacks consume the emitted config);
this module pins the exact hyperparameter set used for the deployed
summarization model and verifies the adapter size arithmetic: every matrix
of shape (d_in, d_out) targeted by a rank-r adapter contributes
r * (d_in + d_out) parameters per layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class InvalidConfigError(ValueError):
    def __init__(self, field_name: str, detail: str):
        self.field_name = field_name
        super().__init__(f"invalid {field_name}: {detail}")


class UnknownTargetMatrixError(ValueError):
    def __init__(self, name: str, known: list[str]):
        self.name = name
        super().__init__(f"unknown target matrix {name!r}; shape defines {known}")


@dataclass(frozen=True)
class LoraConfig:
    learning_rate: float = 2e-5
    lora_r: int = 64
    lora_alpha: int = 16
    lora_dropout: float = 0.1
    weight_decay: float = 0.01
    scheduler: str = "cosine"
    warmup_ratio: float = 0.03
    target_matrices: tuple[str, ...] = ("query", "value")

    def validate(self) -> None:
        if self.lora_r < 1:
            raise InvalidConfigError("lora_r", f"must be >= 1, got {self.lora_r}")
        if not 0.0 <= self.lora_dropout < 1.0:
            raise InvalidConfigError("lora_dropout", f"must be in [0, 1), got {self.lora_dropout}")
        if not 0.0 <= self.warmup_ratio < 1.0:
            raise InvalidConfigError("warmup_ratio", f"must be in [0, 1), got {self.warmup_ratio}")
        if self.learning_rate <= 0:
            raise InvalidConfigError("learning_rate", f"must be > 0, got {self.learning_rate}")
        if not self.target_matrices:
            raise InvalidConfigError("target_matrices", "must name at least one matrix")


@dataclass(frozen=True)
class ModelShape:
    """Architecture facts needed for adapter arithmetic, supplied as data so
    the calculator works for any transformer, not one hardcoded model."""

    hidden_dim: int
    num_layers: int
    total_params: int
    matrix_dims: dict[str, tuple[int, int]] = field(default_factory=dict)

    @classmethod
    def square_attention(cls, hidden_dim: int, num_layers: int, total_params: int) -> "ModelShape":
        """Common case: attention projections are hidden x hidden."""
        dims = {name: (hidden_dim, hidden_dim) for name in ("query", "key", "value", "output")}
        return cls(hidden_dim, num_layers, total_params, dims)


def emit_config(cfg: LoraConfig) -> dict:
    """Round-trippable configuration document with every setting verbatim."""
    cfg.validate()
    return {
        "learning_rate": cfg.learning_rate,
        "lora_r": cfg.lora_r,
        "lora_alpha": cfg.lora_alpha,
        "lora_dropout": cfg.lora_dropout,
        "weight_decay": cfg.weight_decay,
        "scheduler": cfg.scheduler,
        "warmup_ratio": cfg.warmup_ratio,
        "target_matrices": list(cfg.target_matrices),
    }


def parse_config(document: dict) -> LoraConfig:
    cfg = LoraConfig(
        learning_rate=float(document["learning_rate"]),
        lora_r=int(document["lora_r"]),
        lora_alpha=int(document["lora_alpha"]),
        lora_dropout=float(document["lora_dropout"]),
        weight_decay=float(document["weight_decay"]),
        scheduler=str(document["scheduler"]),
        warmup_ratio=float(document["warmup_ratio"]),
        target_matrices=tuple(document["target_matrices"]),
    )
    cfg.validate()
    return cfg


def lora_param_count(shape: ModelShape, cfg: LoraConfig) -> tuple[int, float]:
    """(adapter parameter count, fraction of the full model's weights).

    adapter = sum over targeted matrices and layers of r * (d_in + d_out).
    """
    cfg.validate()
    if shape.hidden_dim < 1 or shape.num_layers < 1 or shape.total_params < 1:
        raise InvalidConfigError("shape", "all dimensions must be positive")
    adapter = 0
    for name in cfg.target_matrices:
        if name not in shape.matrix_dims:
            raise UnknownTargetMatrixError(name, sorted(shape.matrix_dims))
        d_in, d_out = shape.matrix_dims[name]
        adapter += cfg.lora_r * (d_in + d_out) * shape.num_layers
    return adapter, adapter / shape.total_params
