"""
合成数据集
"""
import logging
from typing import List

import numpy as np

from core.errors import ValidationError
from core.models import Distribution, validate
from core.rng import make_rng

logger = logging.getLogger(__name__)

FAMILIES = ("uniform-dirichlet", "sparse", "corner-heavy")

SPARSE_DROP = 0.8
CORNER_MASS = 0.95


def generate(n: int, d: int, family: str = "uniform-dirichlet", seed: int = 0) -> List[Distribution]:
    """
    生成 n 个 Δ_d 上的点

    - uniform-dirichlet: Dirichlet(1,…,1)
    - sparse: 随机置零 80% 的坐标后归一化，每行至少保留一个
    - corner-heavy: 95% 质量集中在随机一个坐标，其余按 Dirichlet 分配
    """
    if n < 1 or d < 1:
        raise ValidationError(f"n 与 d 必须 ≥ 1，当前 n={n}, d={d}")
    if family not in FAMILIES:
        raise ValidationError(f"未知的数据族: {family}（可选 {', '.join(FAMILIES)}）")

    rng = make_rng(seed, f"gen:{family}")
    base = rng.dirichlet(np.ones(d), size=n)

    if family == "sparse":
        keep = rng.random((n, d)) >= SPARSE_DROP
        empty = ~keep.any(axis=1)
        keep[np.flatnonzero(empty), rng.integers(0, d, size=int(empty.sum()))] = True
        base = base * keep
    elif family == "corner-heavy":
        corners = rng.integers(0, d, size=n)
        base = (1.0 - CORNER_MASS) * base
        base[np.arange(n), corners] += CORNER_MASS

    points = [validate(row, normalize=True, id=f"p{i}") for i, row in enumerate(base)]
    logger.info(f"已生成 {n} 个点: {family} d={d} seed={seed}")
    return points
