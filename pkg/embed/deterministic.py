"""
确定性加性误差嵌入（JS / χ²）与 Hellinger 的精确平方根映射

坐标 i 占据 [i·4J, (i+1)·4J)：前 2J 个是 √v·cos(ω_j ln v)·root_j，后 2J 个是 sin。
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from core.errors import DimensionError, EmbeddingMismatchError, ValidationError
from core.models import Distribution
from .grid import GridSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DetEmbedding:
    """一个点的确定性嵌入"""
    grid: GridSpec
    vector: np.ndarray = field(repr=False)
    id: str = ""

    def __post_init__(self):
        if self.vector.shape != (self.grid.dimension,):
            raise DimensionError(f"嵌入长度 {self.vector.shape} ≠ 4·J·d = {self.grid.dimension}")

    def block(self, i: int) -> np.ndarray:
        """坐标 i 的块"""
        n = self.grid.block_len
        return self.vector[i * n:(i + 1) * n]

    def distance(self, other: "DetEmbedding") -> float:
        if self.grid.digest != other.grid.digest:
            raise EmbeddingMismatchError(f"网格不一致: {self.grid.digest} vs {other.grid.digest}")
        return l22_distance(self.vector, other.vector)


def embed_coordinates(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    """
    批量计算坐标块

    Args:
        grid: 网格
        values: [0,1] 内的坐标值，形状 (m,)

    Returns:
        形状 (m, 4J)；值为 0 的行全为 0
    """
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if np.any(values < 0) or np.any(values > 1):
        raise ValidationError("坐标值必须在 [0, 1] 内")

    positive = values > 0
    logs = np.log(np.where(positive, values, 1.0))
    amps = np.sqrt(values)[:, None] * grid.interval_roots[None, :]
    phase = logs[:, None] * grid.cell_omegas[None, :]
    out = np.concatenate([amps * np.cos(phase), amps * np.sin(phase)], axis=1)
    out[~positive] = 0.0
    return out


def embed_coordinate(grid: GridSpec, value: float) -> np.ndarray:
    """单个坐标的 4J 维块"""
    return embed_coordinates(grid, np.array([value]))[0]


def embed_point(grid: GridSpec, p: Distribution) -> DetEmbedding:
    """
    整点嵌入：各坐标块按坐标顺序拼接

    Raises:
        DimensionError: p.d != grid.d
    """
    if p.d != grid.d:
        raise DimensionError(f"点的维度 {p.d} 与网格 d={grid.d} 不一致")
    vector = embed_coordinates(grid, p.values).reshape(-1)
    return DetEmbedding(grid=grid, vector=vector, id=p.id)


def embedded_distance(grid: GridSpec, p: Distribution, q: Distribution) -> float:
    """‖emb(p) − emb(q)‖²，不保留整条向量"""
    if p.d != grid.d or q.d != grid.d:
        raise DimensionError(f"点的维度与网格 d={grid.d} 不一致")
    diff = embed_coordinates(grid, p.values) - embed_coordinates(grid, q.values)
    return float(np.einsum("ij,ij->", diff, diff))


def hellinger_embed(p: Distribution) -> np.ndarray:
    """逐坐标开方；‖√p − √q‖² 正是 Hellinger"""
    return np.sqrt(p.values)


def l22_distance(a, b) -> float:
    """Σ(aᵢ − bᵢ)²"""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"长度不一致: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.dot(diff.ravel(), diff.ravel()))
