"""
嵌入持久化
.npz 文件：header（JSON 字符串）、ids、vectors（n × D）
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

import numpy as np

from core.errors import EmbeddingMismatchError, ValidationError
from core.io import atomic_write
from .deterministic import l22_distance
from .grid import GridSpec, build_grid

logger = logging.getLogger(__name__)

# 比较两个嵌入文件时必须一致的键
_IDENTITY_KEYS = ("mode", "kind", "d", "layout", "grid_digest", "sample_digest")


@dataclass
class EmbeddingBundle:
    """一批点的嵌入及其参数头"""
    header: dict
    ids: List[str]
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.ids):
            raise ValidationError(f"嵌入矩阵形状 {self.vectors.shape} 与 {len(self.ids)} 个 id 不匹配")

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[1])

    def index(self, point_id: str) -> int:
        try:
            return self.ids.index(point_id)
        except ValueError:
            raise ValidationError(f"嵌入中没有点 {point_id}") from None

    def distance(self, i: int, j: int) -> float:
        return l22_distance(self.vectors[i], self.vectors[j])

    def check_compatible(self, other: "EmbeddingBundle"):
        """参数头不一致时抛出 EmbeddingMismatchError"""
        for key in _IDENTITY_KEYS:
            if self.header.get(key) != other.header.get(key):
                raise EmbeddingMismatchError(
                    f"嵌入参数 {key} 不一致: {self.header.get(key)} vs {other.header.get(key)}")


def save_embeddings(path: Path, bundle: EmbeddingBundle):
    """原子写出 .npz"""
    atomic_write(path, lambda f: np.savez(
        f,
        header=np.array(json.dumps(bundle.header, sort_keys=True)),
        ids=np.array(bundle.ids, dtype=str),
        vectors=bundle.vectors,
    ))
    logger.info(f"嵌入已保存: {path} ({len(bundle.ids)} 个点, 维度 {bundle.dimension})")


def load_embeddings(path: Path) -> EmbeddingBundle:
    """读取 .npz 嵌入文件"""
    path = Path(path)
    try:
        with np.load(path, allow_pickle=False) as data:
            header = json.loads(str(data["header"]))
            ids = [str(i) for i in data["ids"]]
            vectors = np.array(data["vectors"], dtype=np.float64)
    except (OSError, KeyError, ValueError) as e:
        raise ValidationError(f"无法读取嵌入文件 {path}: {e}") from e
    return EmbeddingBundle(header=header, ids=ids, vectors=vectors)


def grid_from_header(header: dict) -> GridSpec:
    """按参数头重建网格并核对 J、step 与摘要"""
    grid = build_grid(header["kind"], int(header["d"]), float(header["eps"]))
    if grid.J != int(header["J"]) or grid.digest != header.get("grid_digest", grid.digest):
        raise EmbeddingMismatchError(f"参数头与重建的网格不一致: J={header['J']} vs {grid.J}")
    return grid
