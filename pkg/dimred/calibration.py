"""
质心附近的欧氏等价：D_f(p, q) ≈ C·‖p − q‖²，C = f''(1)(k+1)/2
"""
import logging
from typing import Optional, Tuple

import numpy as np

from config import config
from core.divergences import divergence_rows, second_derivative_at_one
from core.errors import ConvergenceError, ValidationError
from core.models import DivergenceKind
from core.rng import make_rng

logger = logging.getLogger(__name__)

_BATCH = 100


def local_constant(kind: "str | DivergenceKind", k: int) -> float:
    """坐标 ≈ 1/(k+1) 时 D_f/‖·‖² 的极限 f''(1)(k+1)/2"""
    return second_derivative_at_one(kind) * (k + 1) / 2.0


def sample_ball_pairs(k: int, r: float, count: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    在 Δ_{k+1} 质心为中心、半径 r 的球（限制在 L 内）里随机取 count 对点

    方向为 L 内的各向同性高斯方向，半径为 r·U。
    """
    def draw() -> np.ndarray:
        g = rng.standard_normal((count, k + 1))
        g -= g.mean(axis=1, keepdims=True)
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return 1.0 / (k + 1) + g * (r * rng.random((count, 1)))

    return draw(), draw()


def ratio_errors(kind: "str | DivergenceKind", k: int, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """|D_f/(C·‖p−q‖²) − 1|，逐对"""
    sq = np.sum((P - Q) ** 2, axis=1)
    keep = sq > 0
    div = divergence_rows(kind, P[keep], Q[keep])
    return np.abs(div / (local_constant(kind, k) * sq[keep]) - 1.0)


def calibrate_radius(kind: "str | DivergenceKind", k: int, eps: float, c0_init: Optional[float] = None,
                     pairs: Optional[int] = None, max_halvings: Optional[int] = None, seed: int = 0) -> float:
    """
    从 r = c0·ε/(k+1) 开始折半，直到球内采样的点对全部满足 |D_f/(C‖·‖²) − 1| ≤ ε/4

    Args:
        kind: 散度类型
        k: 目标单纯形维度（点位于 Δ_{k+1}）
        eps: 总失真 ε
        c0_init: 初始 c0，默认 config.BALL_C0
        pairs: 每个半径至少检验的点对数，默认 config.CALIBRATION_PAIRS
        max_halvings: 折半次数上限，默认 config.CALIBRATION_MAX_HALVINGS
        seed: 采样种子

    Returns:
        通过检验的半径 r（< 1/(k+1)）

    Raises:
        ConvergenceError: 折半次数用尽
    """
    kind = DivergenceKind.parse(kind)
    if not 0 < eps < 1:
        raise ValidationError(f"eps 必须在 (0, 1) 内，当前 {eps}")
    c0 = float(config.BALL_C0 if c0_init is None else c0_init)
    if not c0 > 0:
        raise ValidationError(f"c0 必须 > 0，当前 {c0}")
    pairs = int(config.CALIBRATION_PAIRS if pairs is None else pairs)
    max_halvings = int(config.CALIBRATION_MAX_HALVINGS if max_halvings is None else max_halvings)

    r = c0 * eps / (k + 1)
    halvings = 0
    while r >= 1.0 / (k + 1):
        r /= 2.0
        halvings += 1

    tol = eps / 4.0
    while halvings <= max_halvings:
        rng = make_rng(seed, f"calibrate:{halvings}")
        worst = 0.0
        checked = 0
        while checked < pairs and worst <= tol:
            batch = min(_BATCH, pairs - checked)
            P, Q = sample_ball_pairs(k, r, batch, rng)
            errors = ratio_errors(kind, k, P, Q)
            if errors.size:
                worst = max(worst, float(errors.max()))
            checked += batch
        if worst <= tol:
            logger.info(f"校准半径: {kind.value} k={k} r={r:.3e} (折半 {halvings} 次, 最大偏差 {worst:.2e})")
            return r
        logger.warning(f"半径 r={r:.3e} 处偏差 {worst:.3e} > ε/4 = {tol:.3e}，折半")
        r /= 2.0
        halvings += 1

    raise ConvergenceError(f"校准半径在 {max_halvings} 次折半后仍未满足 ε/4 = {tol}")
