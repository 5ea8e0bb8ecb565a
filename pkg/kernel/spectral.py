"""
谱分解：被积函数 h(x,y,ω)、核密度 κ、CDF / 分位数 / 区间质量

f(x,y) = σ·∫ h(x,y,ω)·κ(ω) dω
  JS:  κ(ω) = 2·sech(πω) / (ln4·(1+4ω²))，σ = ln 2（κ 给出以 bit 计的 JS，换回自然对数）
  χ²:  κ(ω) = sech(πω)，σ = 1
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from config import config
from core.errors import UnsupportedKernel, ValidationError
from core.models import DivergenceKind
from .quadrature import QuadratureConfig, adaptive_simpson, integrate

logger = logging.getLogger(__name__)

_LN4 = math.log(4.0)

# κ 的积分断点：峰值在 0，之后指数衰减
_BREAKPOINTS = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0)

# 分位数二分迭代次数（单元宽度 0.005 → 约 5e-15）
_BISECT_ITERS = 40


def _as_output(out: np.ndarray, scalar: bool):
    return float(out) if scalar else out


def _sech_pi(omega: np.ndarray) -> np.ndarray:
    """sech(πω)，大 |ω| 时不溢出"""
    e = np.exp(-math.pi * np.abs(omega))
    return 2.0 * e / (1.0 + e * e)


def _js_density(omega: np.ndarray) -> np.ndarray:
    return 2.0 * _sech_pi(omega) / (_LN4 * (1.0 + 4.0 * omega * omega))


def _scalar_density(kind: DivergenceKind) -> Callable[[float], float]:
    """积分内层用的标量版本，避免逐点构造 numpy 数组"""
    def sech_pi(w: float) -> float:
        e = math.exp(-math.pi * abs(w))
        return 2.0 * e / (1.0 + e * e)

    if kind is DivergenceKind.JS:
        return lambda w: 2.0 * sech_pi(w) / (_LN4 * (1.0 + 4.0 * w * w))
    return sech_pi


def _js_far_tail(a: np.ndarray) -> np.ndarray:
    """∫_a^∞ κ_JS 的主项，用于表外 (a > limit)"""
    return (4.0 / _LN4) * np.exp(-math.pi * a) / (math.pi * (1.0 + 4.0 * a * a))


def h(x, y, omega):
    """
    h(x,y,ω) = ‖√x·e^{iω ln x} − √y·e^{iω ln y}‖²

    按 (√x−√y)² + 4√(xy)·sin²(ω(ln x − ln y)/2) 计算，结果非负；
    x 或 y 为 0 时对应项为零向量。
    """
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0 and np.ndim(omega) == 0
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    omega = np.asarray(omega, dtype=np.float64)
    if np.any(x < 0) or np.any(x > 1) or np.any(y < 0) or np.any(y > 1):
        raise ValidationError("h 的参数 x, y 必须在 [0, 1] 内")

    log_ratio = np.log(np.where(x > 0, x, 1.0)) - np.log(np.where(y > 0, y, 1.0))
    half = 0.5 * omega * log_ratio
    root_diff = np.sqrt(x) - np.sqrt(y)
    out = root_diff * root_diff + 4.0 * np.sqrt(x * y) * np.sin(half) ** 2
    return _as_output(out, scalar)


def kappa(kind: "str | DivergenceKind", omega):
    """核密度 κ(ω)；Hellinger 没有谱密度"""
    kind = DivergenceKind.parse(kind)
    if not kind.has_kernel:
        raise UnsupportedKernel("Hellinger 有精确的有限维映射，没有谱密度（请用 hellinger_embed）")
    scalar = np.ndim(omega) == 0
    omega = np.asarray(omega, dtype=np.float64)
    out = _js_density(omega) if kind is DivergenceKind.JS else _sech_pi(omega)
    return _as_output(out, scalar)


class _JSTailTable:
    """
    S(ω) = ∫_ω^∞ κ_JS 在 [0, limit] 等距节点上的表

    单元积分用自适应 Simpson，倒序累加；节点间用带精确导数 −κ 的三次 Hermite 插值。
    """

    def __init__(self, step: float, limit: float, quad: QuadratureConfig):
        n = int(round(limit / step))
        self.limit = float(limit)
        self.nodes = np.linspace(0.0, self.limit, n + 1)

        density = _scalar_density(DivergenceKind.JS)
        cell_tol = quad.abs_tol / n
        cells = np.array([
            adaptive_simpson(density, self.nodes[k], self.nodes[k + 1], cell_tol, quad.max_depth)[0]
            for k in range(n)
        ])

        tail_end = float(_js_far_tail(np.float64(self.limit)))
        self.values = tail_end + np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
        self._spline = CubicHermiteSpline(self.nodes, self.values, -_js_density(self.nodes))
        logger.info(f"JS 核 CDF 表已建立: {n} 个单元, 总质量 {2 * self.values[0]:.12f}")

    def survival_nonneg(self, a: np.ndarray) -> np.ndarray:
        """a ≥ 0 时的 S(a)"""
        inside = np.minimum(a, self.limit)
        with np.errstate(over="ignore", invalid="ignore"):
            far = _js_far_tail(np.where(np.isfinite(a), a, self.limit))
        out = np.where(a <= self.limit, self._spline(inside), far)
        return np.where(np.isinf(a), 0.0, np.maximum(out, 0.0))

    def invert(self, s: np.ndarray) -> np.ndarray:
        """求 a ≥ 0 使 S(a) = s，s ∈ (0, 1/2]"""
        idx = np.searchsorted(-self.values, -s, side="left")
        idx = np.clip(idx, 1, len(self.nodes) - 1)
        lo = self.nodes[idx - 1]
        hi = self.nodes[idx]
        beyond = s < self.values[-1]
        lo = np.where(beyond, self.limit, lo)
        hi = np.where(beyond, self.limit + 60.0, hi)
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            above = self.survival_nonneg(mid) > s
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class KernelSpec:
    """
    一种散度的谱核

    density / cdf / sf / quantile 都接受 numpy 数组（逐元素）。
    tail_constant C 满足 ∫_t^∞ κ ≤ C·e^{−t}；divergence_scale σ 满足 f = σ·∫hκ。
    """
    kind: DivergenceKind
    density: Callable = field(repr=False)
    cdf: Callable = field(repr=False)
    sf: Callable = field(repr=False)
    quantile: Callable = field(repr=False)
    tail_constant: float
    divergence_scale: float


def _build_js(quad: QuadratureConfig) -> KernelSpec:
    table = _JSTailTable(float(config.KERNEL_TABLE_STEP), float(config.KERNEL_TABLE_LIMIT), quad)

    def sf(omega):
        omega = np.asarray(omega, dtype=np.float64)
        pos = table.survival_nonneg(np.abs(omega))
        return np.where(omega >= 0, pos, 1.0 - pos)

    def cdf(omega):
        return sf(-np.asarray(omega, dtype=np.float64))

    def quantile(u):
        u = np.asarray(u, dtype=np.float64)
        tail = np.minimum(u, 1.0 - u)
        a = table.invert(tail)
        return np.where(u == 0.5, 0.0, np.where(u > 0.5, a, -a))

    return KernelSpec(DivergenceKind.JS, _js_density, cdf, sf, quantile,
                      tail_constant=4.0, divergence_scale=math.log(2.0))


def _build_chi2() -> KernelSpec:
    # 1/2 + arctan(sinh(πω))/π 的等价写法 (2/π)·arctan(e^{πω})，两侧尾部都不丢精度
    def cdf(omega):
        omega = np.asarray(omega, dtype=np.float64)
        with np.errstate(over="ignore"):
            return np.minimum((2.0 / math.pi) * np.arctan(np.exp(math.pi * omega)), 1.0)

    def sf(omega):
        return cdf(-np.asarray(omega, dtype=np.float64))

    # asinh(tan(π(u−1/2)))/π 在 u 靠近 0 或 1 时丢精度；改用 e^{πω} = tan(πu/2)，按较小的尾部计算
    def quantile(u):
        u = np.asarray(u, dtype=np.float64)
        lower = np.log(np.tan(0.5 * math.pi * np.minimum(u, 0.5))) / math.pi
        upper = -np.log(np.tan(0.5 * math.pi * np.minimum(1.0 - u, 0.5))) / math.pi
        return np.where(u <= 0.5, lower, upper)

    return KernelSpec(DivergenceKind.CHI_SQUARED, _sech_pi, cdf, sf, quantile,
                      tail_constant=3.0, divergence_scale=1.0)


@lru_cache(maxsize=None)
def _cached_kernel(kind: DivergenceKind) -> KernelSpec:
    if kind is DivergenceKind.JS:
        return _build_js(QuadratureConfig(min_depth=0))
    return _build_chi2()


def get_kernel(kind: "str | DivergenceKind") -> KernelSpec:
    """获取（并缓存）某种散度的核"""
    kind = DivergenceKind.parse(kind)
    if not kind.has_kernel:
        raise UnsupportedKernel("Hellinger 没有谱核")
    return _cached_kernel(kind)


def kernel_cdf(kind: "str | DivergenceKind", omega):
    """P(Ω ≤ ω)"""
    scalar = np.ndim(omega) == 0
    return _as_output(get_kernel(kind).cdf(omega), scalar)


def kernel_quantile(kind: "str | DivergenceKind", u):
    """CDF 的逆，u ∈ (0, 1)"""
    scalar = np.ndim(u) == 0
    arr = np.asarray(u, dtype=np.float64)
    if np.any(arr <= 0) or np.any(arr >= 1) or not np.all(np.isfinite(arr)):
        raise ValidationError("分位数参数 u 必须在 (0, 1) 内")
    return _as_output(get_kernel(kind).quantile(arr), scalar)


def interval_mass(kind: "str | DivergenceKind", a, b):
    """
    ∫_a^b κ(ω) dω（未开方），截断到 ≥ 0

    按区间所在侧用生存函数相减，远尾的小质量不会被 1 − 1 抵消。
    """
    spec = get_kernel(kind)
    scalar = np.ndim(a) == 0 and np.ndim(b) == 0
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if np.any(a > b):
        raise ValidationError("interval_mass 需要 a ≤ b")

    right = spec.sf(a) - spec.sf(b)
    left = spec.sf(-b) - spec.sf(-a)
    straddle = 1.0 - spec.sf(-a) - spec.sf(b)
    out = np.where(a >= 0, right, np.where(b <= 0, left, straddle))
    return _as_output(np.maximum(out, 0.0), scalar)


def _positive_breakpoints(limit: float):
    return [p for p in _BREAKPOINTS if p < limit] + [limit]


def spectral_divergence(
    kind: "str | DivergenceKind",
    x: float,
    y: float,
    quad: Optional[QuadratureConfig] = None,
    limit: Optional[float] = None,
) -> float:
    """
    数值积分 σ·∫ h(x,y,ω)·κ(ω) dω

    h 与 κ 都是偶函数，只积 [0, limit] 再乘 2。limit 为 None 时积到表上限，
    再加上 |ω| > limit 的尾部（h 在快速振荡下均值为 x+y）；给定 limit 时只积截断区间。
    """
    spec = get_kernel(kind)
    quad = quad or QuadratureConfig()
    x = float(x)
    y = float(y)
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValidationError("x, y 必须在 [0, 1] 内")

    upper = float(config.KERNEL_TABLE_LIMIT) if limit is None else float(limit)
    density = _scalar_density(spec.kind)
    base = (math.sqrt(x) - math.sqrt(y)) ** 2
    cross = 4.0 * math.sqrt(x * y)
    log_ratio = (math.log(x) - math.log(y)) if cross > 0 else 0.0

    def integrand(w: float) -> float:
        return (base + cross * math.sin(0.5 * w * log_ratio) ** 2) * density(w)

    value, _ = integrate(integrand, _positive_breakpoints(upper), quad)
    total = 2.0 * value
    if limit is None:
        total += (x + y) * 2.0 * float(spec.sf(upper))
    return spec.divergence_scale * total


def moment_integral(kind: "str | DivergenceKind", power: float = 4.0,
                    quad: Optional[QuadratureConfig] = None) -> float:
    """∫ (1+2|ω|)^power·κ(ω) dω；power=4 时 JS ≈ 8.94，χ² ≈ 22.77"""
    spec = get_kernel(kind)
    quad = quad or QuadratureConfig()
    upper = float(config.KERNEL_TABLE_LIMIT)
    density = _scalar_density(spec.kind)
    integrand = lambda w: (1.0 + 2.0 * abs(w)) ** power * density(w)
    value, _ = integrate(integrand, _positive_breakpoints(upper), quad)
    return 2.0 * value


def tail_mass(kind: "str | DivergenceKind", t):
    """P(|Ω| > t)"""
    spec = get_kernel(kind)
    scalar = np.ndim(t) == 0
    return _as_output(2.0 * spec.sf(np.abs(np.asarray(t, dtype=np.float64))), scalar)


def truncation_radius(kind: "str | DivergenceKind", eps: float) -> float:
    """t = ln(C/ε)，此时 C·e^{−t} = ε"""
    if not eps > 0:
        raise ValidationError("eps 必须 > 0")
    return math.log(get_kernel(kind).tail_constant / eps)


def quantized_integral(kind: "str | DivergenceKind", x: float, y: float, step: float, J: int) -> float:
    """
    左端点阶梯积分 σ·Σ_{j=−J}^{J−1} h(x,y,ω_j)·∫_{ω_j}^{ω_{j+1}} κ

    正是确定性嵌入的平方距离在单坐标上的值。
    """
    spec = get_kernel(kind)
    omegas = np.arange(-J, J, dtype=np.float64) * step
    masses = interval_mass(spec.kind, omegas, omegas + step)
    return float(spec.divergence_scale * np.sum(h(x, y, omegas) * masses))


def kernel_table(kind: "str | DivergenceKind", lo: float = -5.0, hi: float = 5.0, n: int = 201) -> np.ndarray:
    """(ω, κ, CDF) 表，形状 (n, 3)"""
    spec = get_kernel(kind)
    if n < 2 or not lo < hi:
        raise ValidationError("kernel_table 需要 lo < hi 且 n ≥ 2")
    omegas = np.linspace(lo, hi, n)
    return np.column_stack([omegas, spec.density(omegas), spec.cdf(omegas)])
