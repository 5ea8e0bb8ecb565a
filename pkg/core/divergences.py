"""
闭式散度计算
JS（自然对数）、Hellinger、对称 χ²，以及通用 f-散度接口
"""
import logging
from typing import Union

import numpy as np
from scipy.special import xlogy

from .errors import DimensionError, ValidationError
from .models import DivergenceKind, Distribution, FDivergenceSpec, generator

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# 坐标越界容差（归一化后的舍入）
_COORD_TOL = 1e-9

# |t| 低于此值时用级数计算 (1+t)ln(1+t) + (1-t)ln(1-t)
_SERIES_CUTOFF = 1e-2


def _js_shape(t: np.ndarray) -> np.ndarray:
    """
    g(t) = (1+t)ln(1+t) + (1-t)ln(1-t) = Σ t^{2n} / (n(2n-1))

    f_J(x,y) = ((x+y)/2)·g((x-y)/(x+y))，在 x≈y 时避免抵消误差。
    """
    t = np.asarray(t, dtype=np.float64)
    direct = xlogy(1.0 + t, 1.0 + t) + xlogy(1.0 - t, 1.0 - t)
    t2 = t * t
    series = np.zeros_like(t)
    power = np.ones_like(t)
    for n in range(1, 8):
        power = power * t2
        series = series + power / (n * (2 * n - 1))
    return np.where(np.abs(t) < _SERIES_CUTOFF, series, direct)


def _check_unit_interval(x: np.ndarray, name: str):
    if np.any(x < -_COORD_TOL) or np.any(x > 1.0 + _COORD_TOL) or not np.all(np.isfinite(x)):
        raise ValidationError(f"{name} 必须在 [0, 1] 内")


def scalar_divergence(kind: "str | DivergenceKind", x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """
    单坐标散度 f_J / f_H / f_χ

    支持标量或数组（逐元素）。0·ln(0/·) 按极限约定取 0，不做平滑。

    Args:
        kind: 散度种类
        x, y: [0,1] 内的实数或数组

    Returns:
        非负实数（输入都是标量时返回 float）
    """
    kind = DivergenceKind.parse(kind)
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_unit_interval(x, "x")
    _check_unit_interval(y, "y")
    x = np.clip(x, 0.0, 1.0)
    y = np.clip(y, 0.0, 1.0)

    diff = x - y
    total = x + y
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind is DivergenceKind.JS:
            t = np.where(total > 0, diff / np.where(total > 0, total, 1.0), 0.0)
            out = 0.5 * total * _js_shape(t)
        elif kind is DivergenceKind.HELLINGER:
            root_sum = np.sqrt(x) + np.sqrt(y)
            out = np.where(root_sum > 0, diff * diff / np.where(root_sum > 0, root_sum * root_sum, 1.0), 0.0)
        else:
            out = np.where(total > 0, diff * diff / np.where(total > 0, total, 1.0), 0.0)

    out = np.maximum(out, 0.0)
    return float(out) if scalar else out


def divergence_rows(kind: "str | DivergenceKind", p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """按最后一维求和的散度，p、q 形状相同（可批量）"""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DimensionError(f"维度不一致: {p.shape} vs {q.shape}")
    return np.sum(scalar_divergence(kind, p, q), axis=-1)


def divergence(kind: "str | DivergenceKind", p: Distribution, q: Distribution) -> float:
    """
    D(p, q) = Σ_i f(p_i, q_i)

    Raises:
        DimensionError: p.d != q.d
    """
    if p.d != q.d:
        raise DimensionError(f"维度不一致: {p.d} vs {q.d}")
    return float(divergence_rows(kind, p.values, q.values))


def pairwise_divergences(kind: "str | DivergenceKind", points: np.ndarray) -> np.ndarray:
    """n×d 点集的两两散度矩阵（对称，对角为 0）"""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        row = divergence_rows(kind, np.broadcast_to(points[i], points[i + 1:].shape), points[i + 1:])
        out[i, i + 1:] = row
        out[i + 1:, i] = row
    return out


def f_divergence(spec: FDivergenceSpec, p: Distribution, q: Distribution) -> float:
    """
    通用 f-散度 D_f(p,q) = Σ p_i·f(q_i/p_i)

    极限约定：0·f(0/0)=0，a·f(0/a)=a·f(0)，0·f(a/0)=a·lim f(u)/u。
    """
    if p.d != q.d:
        raise DimensionError(f"维度不一致: {p.d} vs {q.d}")
    total = 0.0
    for pi, qi in zip(p.values, q.values):
        if pi == 0 and qi == 0:
            continue
        if pi == 0:
            total += qi * spec.slope_at_infinity
        elif qi == 0:
            total += pi * spec.f_at_zero()
        else:
            total += pi * spec.f(qi / pi)
    return float(total)


def second_derivative_at_one(kind: "str | DivergenceKind") -> float:
    """生成函数在 1 处的二阶导 f''(1)：JS 0.5，Hellinger 0.5，χ² 1"""
    return generator(kind).f_second_at_one
