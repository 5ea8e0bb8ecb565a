"""
聚合流数据模型
"""
import math
from dataclasses import dataclass, field

from config import config
from core.errors import ConfigError, ValidationError
from core.models import DivergenceKind


@dataclass(frozen=True)
class AggregateItem:
    """流中的一项：某个点的第 i 个坐标，整值到达"""
    point_id: str
    coord_index: int
    value: float

    def __post_init__(self):
        if int(self.coord_index) != self.coord_index or self.coord_index < 0:
            raise ValidationError(f"坐标下标必须是非负整数，当前 {self.coord_index}")
        if not 0.0 <= float(self.value) <= 1.0:
            raise ValidationError(f"坐标值必须在 [0, 1] 内，当前 {self.value}")
        object.__setattr__(self, "point_id", str(self.point_id))
        object.__setattr__(self, "coord_index", int(self.coord_index))
        object.__setattr__(self, "value", float(self.value))

    def to_dict(self) -> dict:
        return {"id": self.point_id, "i": self.coord_index, "v": self.value}


@dataclass(frozen=True)
class StreamConfig:
    """
    草图参数

    m = ⌈c_a/eps_l2²⌉ 个桶，R = ⌈c_b·ln(1/delta)⌉ 次重复；嵌入网格由 (kind, d, eps_embed) 决定。
    """
    kind: DivergenceKind
    d: int
    eps_embed: float
    eps_l2: float
    delta: float
    seed: int = 0
    width_constant: float = field(default_factory=lambda: float(config.SKETCH_WIDTH_CONSTANT))
    reps_constant: float = field(default_factory=lambda: float(config.SKETCH_REPS_CONSTANT))

    def __post_init__(self):
        kind = DivergenceKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        if not kind.has_kernel:
            raise ValidationError("草图只支持 JS 与 χ²（Hellinger 请直接用 √ 映射）")
        if int(self.d) != self.d or self.d < 1:
            raise ValidationError(f"d 必须是正整数，当前 {self.d}")
        for name in ("eps_embed", "eps_l2", "delta"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ValidationError(f"{name} 必须在 (0, 1) 内，当前 {value}")
        if self.width_constant <= 0 or self.reps_constant <= 0:
            raise ConfigError("width_constant / reps_constant 必须 > 0")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def width(self) -> int:
        return int(math.ceil(self.width_constant / self.eps_l2 ** 2 - 1e-9))

    @property
    def reps(self) -> int:
        return max(1, int(math.ceil(self.reps_constant * math.log(1.0 / self.delta) - 1e-9)))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value, "d": self.d, "eps_embed": self.eps_embed, "eps_l2": self.eps_l2,
            "delta": self.delta, "seed": self.seed, "width_constant": self.width_constant,
            "reps_constant": self.reps_constant,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StreamConfig":
        return cls(
            kind=DivergenceKind.parse(data["kind"]), d=int(data["d"]),
            eps_embed=float(data["eps_embed"]), eps_l2=float(data["eps_l2"]),
            delta=float(data["delta"]), seed=int(data["seed"]),
            width_constant=float(data["width_constant"]), reps_constant=float(data["reps_constant"]),
        )
