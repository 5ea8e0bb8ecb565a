"""
线性草图
对确定性嵌入做分桶随机符号投影（count-sketch 形式），每次重复取桶平方和，跨重复取中位数
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Set

import numpy as np

from core.errors import DimensionError, DuplicateCoordinateError, SketchMismatchError, ValidationError
from core.models import DivergenceKind
from core.rng import RNG_ID
from embed.deterministic import embed_coordinate
from embed.grid import GridSpec, build_grid
from .hashing import HASH_ID, SketchHasher, get_hasher
from .models import AggregateItem, StreamConfig

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class LinearSketch:
    """
    一个点（或若干点的线性组合）的草图

    单写者；counters 形状 (R, m)。seen 记录已处理的坐标，防止聚合模型下的重复到达。
    """
    config: StreamConfig
    grid: GridSpec = field(repr=False)
    counters: np.ndarray = field(repr=False)
    point_id: str = ""
    seen: Set[int] = field(default_factory=set)

    @property
    def kind(self) -> DivergenceKind:
        return self.config.kind

    @property
    def width(self) -> int:
        return self.config.width

    @property
    def reps(self) -> int:
        return self.config.reps

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def grid_digest(self) -> str:
        return self.grid.digest

    @property
    def hasher(self) -> SketchHasher:
        return get_hasher(self.config.seed, self.reps, self.width)

    @property
    def is_complete(self) -> bool:
        """是否已收到全部 d 个坐标"""
        return len(self.seen) == self.config.d

    def header(self) -> dict:
        return {
            **self.config.to_dict(), "R": self.reps, "m": self.width,
            "grid_digest": self.grid_digest, "rng_id": RNG_ID, "hash_id": HASH_ID,
        }

    def check_compatible(self, other: "LinearSketch"):
        mine, theirs = self.header(), other.header()
        for key in mine:
            if mine[key] != theirs.get(key):
                raise SketchMismatchError(f"草图参数 {key} 不一致: {mine[key]} vs {theirs.get(key)}")

    def copy(self) -> "LinearSketch":
        return LinearSketch(self.config, self.grid, self.counters.copy(), self.point_id, set(self.seen))

    def merge(self, other: "LinearSketch") -> "LinearSketch":
        """计数器相加；两边的坐标集合必须不相交"""
        self.check_compatible(other)
        overlap = self.seen & other.seen
        if overlap:
            raise DuplicateCoordinateError(f"合并的草图有重叠坐标: {sorted(overlap)[:5]}")
        return LinearSketch(self.config, self.grid, self.counters + other.counters,
                            self.point_id or other.point_id, self.seen | other.seen)

    def subtract(self, other: "LinearSketch") -> "LinearSketch":
        """计数器相减，得到差向量的草图"""
        self.check_compatible(other)
        return LinearSketch(self.config, self.grid, self.counters - other.counters, "", set())

    __add__ = merge
    __sub__ = subtract

    def to_dict(self) -> dict:
        return {"id": self.point_id, "seen": sorted(self.seen), "counters": self.counters.tolist()}


def new_sketch(
    kind: "str | DivergenceKind",
    d: int,
    eps_embed: float,
    eps_l2: float,
    delta: float,
    seed: int = 0,
    point_id: str = "",
    width_constant: Optional[float] = None,
    reps_constant: Optional[float] = None,
) -> LinearSketch:
    """
    新建空草图，绑定网格 build_grid(kind, d, eps_embed)

    Raises:
        ConfigError: 网格超过内存上限
    """
    extra = {}
    if width_constant is not None:
        extra["width_constant"] = float(width_constant)
    if reps_constant is not None:
        extra["reps_constant"] = float(reps_constant)
    cfg = StreamConfig(kind=DivergenceKind.parse(kind), d=d, eps_embed=eps_embed, eps_l2=eps_l2,
                       delta=delta, seed=seed, **extra)
    return sketch_from_config(cfg, point_id)


def sketch_from_config(cfg: StreamConfig, point_id: str = "") -> LinearSketch:
    grid = build_grid(cfg.kind, cfg.d, cfg.eps_embed)
    return LinearSketch(cfg, grid, np.zeros((cfg.reps, cfg.width)), str(point_id))


def _add_block(sketch: LinearSketch, coord_index: int, block: np.ndarray):
    flat, signs = sketch.hasher.block(coord_index, sketch.grid.block_len)
    weights = signs * block[None, :]
    size = sketch.reps * sketch.width
    sketch.counters += np.bincount(flat.ravel(), weights=weights.ravel(), minlength=size).reshape(sketch.counters.shape)


def process_item(sketch: LinearSketch, item: AggregateItem) -> LinearSketch:
    """
    处理一个聚合项：计算该坐标的嵌入块，按哈希加到计数器上

    Raises:
        ValidationError: 坐标越界或点 id 不符
        DuplicateCoordinateError: 同一坐标第二次到达
    """
    if item.coord_index >= sketch.config.d:
        raise ValidationError(f"坐标下标 {item.coord_index} 超出 d={sketch.config.d}")
    if sketch.point_id and item.point_id != sketch.point_id:
        raise ValidationError(f"草图属于点 {sketch.point_id}，收到点 {item.point_id} 的坐标")
    if item.coord_index in sketch.seen:
        raise DuplicateCoordinateError(f"点 {item.point_id} 的坐标 {item.coord_index} 重复到达")

    sketch.seen.add(item.coord_index)
    if item.value > 0:
        _add_block(sketch, item.coord_index, embed_coordinate(sketch.grid, item.value))
    logger.debug(f"草图 {sketch.point_id}: 坐标 {item.coord_index} = {item.value}")
    return sketch


def sketch_vector(sketch: LinearSketch, vector: np.ndarray) -> LinearSketch:
    """把一整条嵌入向量（长度 4·J·d）一次性加到草图上"""
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (sketch.grid.dimension,):
        raise DimensionError(f"向量长度 {vector.shape} ≠ 4·J·d = {sketch.grid.dimension}")
    n = sketch.grid.block_len
    for i in range(sketch.config.d):
        block = vector[i * n:(i + 1) * n]
        if np.any(block):
            _add_block(sketch, i, block)
    return sketch


def estimate_divergence(sa: LinearSketch, sb: LinearSketch) -> float:
    """
    ‖emb(p) − emb(q)‖² 的估计：每次重复取 Σ_b (ΔC)²，跨重复取中位数

    Raises:
        SketchMismatchError: 种子、参数或网格摘要不一致
    """
    sa.check_compatible(sb)
    diff = sa.counters - sb.counters
    return float(np.median(np.einsum("rb,rb->r", diff, diff)))


def space_audit(sketch: LinearSketch) -> dict:
    """分开报告草图计数器数与隐式嵌入维度"""
    counters = sketch.reps * sketch.width
    return {
        "d": sketch.config.d,
        "J": sketch.grid.J,
        "embedding_dimension": sketch.grid.dimension,
        "width": sketch.width,
        "reps": sketch.reps,
        "counters": counters,
        "compression": sketch.grid.dimension / counters,
    }


def sketch_from_dict(cfg: StreamConfig, data: dict) -> LinearSketch:
    """由 to_dict 的结果恢复"""
    sketch = sketch_from_config(cfg, str(data.get("id", "")))
    counters = np.asarray(data["counters"], dtype=np.float64)
    if counters.shape != sketch.counters.shape:
        raise SketchMismatchError(f"计数器形状 {counters.shape} ≠ {sketch.counters.shape}")
    sketch.counters = counters
    sketch.seen = {int(i) for i in data.get("seen", [])}
    return sketch
