"""
回到单纯形：等距映射到零和超平面 L ⊂ ℝ^{k+1}，再缩放进质心附近的小球
"""
import logging
from typing import Tuple

import numpy as np

from core.errors import ConfigError, ValidationError

logger = logging.getLogger(__name__)


def remap_rows(Y: np.ndarray) -> np.ndarray:
    """
    Helmert 基下的等距映射，(n, k) → (n, k+1)

    第 j 个基向量 (j = 1…k) 为 (1,…,1, −j, 0,…)/√(j(j+1))，前 j 个分量为 1；
    用反向累加 O(k) 计算，不构造矩阵。
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    k = Y.shape[1]
    j = np.arange(1, k + 1, dtype=np.float64)
    a = Y / np.sqrt(j * (j + 1.0))
    tail = np.cumsum(a[:, ::-1], axis=1)[:, ::-1]
    out = np.zeros((Y.shape[0], k + 1))
    out[:, :k] = tail
    out[:, 1:] -= j * a
    return out


def remap_to_zero_sum_plane(y) -> np.ndarray:
    """ℝ^k → L = {x ∈ ℝ^{k+1} | Σx = 0}，保持距离"""
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    return remap_rows(y[None, :])[0]


def ball_radius(k: int, eps: float, c0: float) -> float:
    """r = c0·ε/(k+1)，必须严格小于 1/(k+1)"""
    if not c0 > 0:
        raise ValidationError(f"c0 必须 > 0，当前 {c0}")
    r = c0 * eps / (k + 1)
    if r >= 1.0 / (k + 1):
        raise ConfigError(f"球半径 r = c0·ε/(k+1) = {r} ≥ 1/(k+1)，会越出单纯形")
    return r


def scale_into_ball(points: np.ndarray, k: int, eps: float, c0: float) -> Tuple[np.ndarray, float]:
    """
    先在 L 内平移到均值为 0，再统一乘 β = min(1, r/ρ_max)，最后平移到质心

    Returns:
        (Δ_{k+1} 上的点, β)
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[1] != k + 1:
        raise ValidationError(f"点的维度 {points.shape[1]} ≠ k+1 = {k + 1}")
    r = ball_radius(k, eps, c0)

    centered = points - points.mean(axis=0, keepdims=True)
    rho = float(np.max(np.linalg.norm(centered, axis=1)))
    beta = 1.0 if rho == 0 else min(1.0, r / rho)
    out = 1.0 / (k + 1) + beta * centered
    logger.debug(f"缩放进球: r={r:.3e} ρ_max={rho:.3e} β={beta:.3e}")
    return out, beta
