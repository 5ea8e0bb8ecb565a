"""
Johnson–Lindenstrauss 随机投影
矩阵 k×D，元素 N(0,1)/√k；按 4096 列分块生成，每块由 derive_seed(seed, "jl:<块号>") 决定，
块内按行分批抽取，任何时候都不需要整个矩阵在内存里
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from config import config
from core.errors import DimensionError, ValidationError
from core.rng import make_rng

logger = logging.getLogger(__name__)

COLUMN_BLOCK = 4096
_ROW_CHUNK = 1024


def target_dimension(n: int, eps: float, jl_constant: Optional[float] = None) -> int:
    """k = ⌈c_jl·ln n/(ε/4)²⌉"""
    if n < 2:
        raise ValidationError("降维至少需要 2 个点")
    if not 0 < eps < 1:
        raise ValidationError(f"eps 必须在 (0, 1) 内，当前 {eps}")
    c = float(config.JL_CONSTANT if jl_constant is None else jl_constant)
    return int(math.ceil(c * math.log(n) / (eps / 4.0) ** 2 - 1e-9))


@dataclass(frozen=True)
class JLProjection:
    """可由 (seed, k, D) 重新生成的高斯投影"""
    k: int
    D: int
    seed: int

    def __post_init__(self):
        if self.k < 1 or self.D < 1:
            raise ValidationError(f"JL 维度必须为正: k={self.k}, D={self.D}")

    def blocks(self) -> Iterator[Tuple[slice, slice, np.ndarray]]:
        """逐块产出 (行切片, 列切片, 子矩阵)"""
        scale = 1.0 / math.sqrt(self.k)
        for b, start in enumerate(range(0, self.D, COLUMN_BLOCK)):
            cols = slice(start, min(start + COLUMN_BLOCK, self.D))
            width = cols.stop - cols.start
            rng = make_rng(self.seed, f"jl:{b}")
            for r0 in range(0, self.k, _ROW_CHUNK):
                rows = slice(r0, min(r0 + _ROW_CHUNK, self.k))
                yield rows, cols, rng.standard_normal((rows.stop - rows.start, width)) * scale

    @property
    def matrix(self) -> np.ndarray:
        """整矩阵（只在小维度时使用）"""
        out = np.empty((self.k, self.D))
        for rows, cols, block in self.blocks():
            out[rows, cols] = block
        return out


def project_rows(proj: JLProjection, X: np.ndarray) -> np.ndarray:
    """批量投影，X 形状 (n, D) → (n, k)"""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != proj.D:
        raise DimensionError(f"输入形状 {X.shape} 与投影源维度 D={proj.D} 不一致")
    out = np.zeros((X.shape[0], proj.k))
    for rows, cols, block in proj.blocks():
        out[:, rows] += X[:, cols] @ block.T
    return out


def jl_project(proj: JLProjection, x) -> np.ndarray:
    """单个向量 Gx"""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (proj.D,):
        raise DimensionError(f"向量长度 {x.shape} ≠ D={proj.D}")
    return project_rows(proj, x[None, :])[0]
