"""
自适应 Simpson 积分
核函数的 CDF 表、谱积分校验和矩积分都用它
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence, Tuple

from config import config
from core.errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureConfig:
    """积分参数"""
    abs_tol: float = field(default_factory=lambda: float(config.QUAD_ABS_TOL))
    max_depth: int = field(default_factory=lambda: int(config.QUAD_MAX_DEPTH))
    # 至少细分几层，防止振荡被积函数在粗网格上“碰巧”收敛
    min_depth: int = 3

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ConfigError(f"abs_tol 必须 > 0，当前 {self.abs_tol}")
        if self.max_depth < 1:
            raise ConfigError(f"max_depth 必须 ≥ 1，当前 {self.max_depth}")


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h / 3.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 60,
    min_depth: int = 0,
) -> Tuple[float, float]:
    """
    自适应 Simpson 积分

    递归二分，子区间容差减半；收敛时做一次 Richardson 外推。

    Args:
        f: 被积函数（标量输入输出）
        a: 下限
        b: 上限
        tol: 绝对误差容限
        max_depth: 最大递归深度
        min_depth: 最少细分深度

    Returns:
        (积分值, 误差估计)
    """
    if a == b:
        return 0.0, 0.0
    if a > b:
        value, err = adaptive_simpson(f, b, a, tol, max_depth, min_depth)
        return -value, err

    hit_cap = [False]

    def _adaptive(a: float, b: float, fa: float, fm: float, fb: float,
                  s_whole: float, depth: int, tol: float) -> Tuple[float, float]:
        m = (a + b) / 2.0
        h = (b - a) / 2.0
        lm = (a + m) / 2.0
        rm = (m + b) / 2.0
        flm = f(lm)
        frm = f(rm)

        s_left = _simpson(fa, flm, fm, h / 2.0)
        s_right = _simpson(fm, frm, fb, h / 2.0)
        s_combined = s_left + s_right
        error_estimate = (s_combined - s_whole) / 15.0

        if depth >= min_depth and abs(error_estimate) < tol:
            return s_combined + error_estimate, abs(error_estimate)
        if depth >= max_depth:
            hit_cap[0] = True
            return s_combined + error_estimate, abs(error_estimate)

        left, left_err = _adaptive(a, m, fa, flm, fm, s_left, depth + 1, tol / 2.0)
        right, right_err = _adaptive(m, b, fm, frm, fb, s_right, depth + 1, tol / 2.0)
        return left + right, left_err + right_err

    fa = f(a)
    fb = f(b)
    fm = f((a + b) / 2.0)
    s_whole = _simpson(fa, fm, fb, (b - a) / 2.0)
    value, err = _adaptive(a, b, fa, fm, fb, s_whole, 0, tol)

    if hit_cap[0]:
        logger.debug(f"积分 [{a}, {b}] 达到最大深度 {max_depth}，误差估计 {err:.3e}")
    return value, err


def integrate(
    f: Callable[[float], float],
    breakpoints: Sequence[float],
    quad: QuadratureConfig = None,
) -> Tuple[float, float]:
    """
    分段积分：在相邻断点之间各做一次自适应 Simpson

    容差按区间长度分摊，总误差不超过 quad.abs_tol（按估计）。
    """
    quad = quad or QuadratureConfig()
    points = sorted(float(p) for p in breakpoints)
    span = points[-1] - points[0]
    if span <= 0:
        return 0.0, 0.0

    total, total_err = 0.0, 0.0
    for lo, hi in zip(points[:-1], points[1:]):
        if hi <= lo:
            continue
        tol = quad.abs_tol * (hi - lo) / span
        value, err = adaptive_simpson(f, lo, hi, tol, quad.max_depth, quad.min_depth)
        total += value
        total_err += err
    return total, total_err
