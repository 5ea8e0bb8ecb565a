"""
数据模型定义
概率单纯形上的点、散度种类、f-散度生成函数
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ValidationError

# 单纯形成员的求和容差
SIMPLEX_TOL = 1e-9


class DivergenceKind(str, Enum):
    """支持的三种散度"""
    JS = "js"
    HELLINGER = "hellinger"
    CHI_SQUARED = "chi2"

    @classmethod
    def parse(cls, name: "str | DivergenceKind") -> "DivergenceKind":
        """从命令行字符串解析，接受常见别名"""
        if isinstance(name, DivergenceKind):
            return name
        aliases = {
            "js": cls.JS, "jensen-shannon": cls.JS,
            "hellinger": cls.HELLINGER, "he": cls.HELLINGER,
            "chi2": cls.CHI_SQUARED, "chisquared": cls.CHI_SQUARED,
            "chi-squared": cls.CHI_SQUARED,
        }
        key = str(name).strip().lower()
        if key not in aliases:
            raise ValidationError(f"未知散度种类: {name}（可选 js / hellinger / chi2）")
        return aliases[key]

    @property
    def has_kernel(self) -> bool:
        """是否有谱密度（Hellinger 有精确的有限维映射，不需要）"""
        return self is not DivergenceKind.HELLINGER


@dataclass(frozen=True, eq=False)
class Distribution:
    """
    Δ_d 上的一个点

    构造后不可变；values 是只读的 float64 数组。
    """
    values: np.ndarray
    id: str = ""

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def d(self) -> int:
        """维度（支撑集大小）"""
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.d

    def __eq__(self, other) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None

    def to_list(self) -> list:
        return [float(v) for v in self.values]

    def to_dict(self) -> dict:
        return {"id": self.id, "p": self.to_list()}


def validate(values: Sequence[float], normalize: bool = False, id: str = "") -> Distribution:
    """
    校验并构造 Distribution

    Args:
        values: 原始实数序列
        normalize: 为 True 时先除以总和
        id: 点的标识

    Returns:
        Distribution

    Raises:
        ValidationError: 空序列、非有限值、负坐标、零质量或不在单纯形上
    """
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValidationError("分布不能为空")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("分布包含非有限值 (nan/inf)")
    if np.any(arr < 0):
        idx = int(np.argmax(arr < 0))
        raise ValidationError(f"坐标 {idx} 为负: {arr[idx]}")

    total = float(arr.sum())
    if normalize:
        if total <= 0:
            raise ValidationError("总质量为 0，无法归一化")
        arr = arr / total
    elif abs(total - 1.0) > SIMPLEX_TOL:
        raise ValidationError(f"坐标和为 {total!r}，不在 1 ± {SIMPLEX_TOL} 内（可使用 --normalize）")

    # 容差内的和允许单个坐标略超 1
    arr = np.minimum(arr, 1.0)
    return Distribution(values=arr, id=id)


@dataclass(frozen=True)
class FDivergenceSpec:
    """
    f-散度的生成函数描述

    f 是 (0,∞) 上的凸函数；slope_at_infinity 是 lim f(u)/u，
    用于 0·f(a/0) 的极限约定。构造时检查 well-behaved 条件。
    """
    kind: DivergenceKind
    f: Callable[[float], float] = field(repr=False)
    f_second_at_one: float
    slope_at_infinity: float

    def __post_init__(self):
        f1 = self.f(1.0)
        if abs(f1) > 1e-12:
            raise ValidationError(f"{self.kind.value}: f(1) = {f1} ≠ 0")
        h = 1e-5
        slope = (self.f(1.0 + h) - self.f(1.0 - h)) / (2 * h)
        if abs(slope) > 1e-8:
            raise ValidationError(f"{self.kind.value}: f'(1) ≈ {slope} ≠ 0")
        if not self.f_second_at_one > 0:
            raise ValidationError(f"{self.kind.value}: f''(1) 必须 > 0")

    def f_at_zero(self) -> float:
        """lim_{u→0} f(u)"""
        return float(self.f(0.0))

    def numeric_second_derivative(self, h: float = 1e-4) -> float:
        """中心差分估计 f''(1)"""
        return (self.f(1.0 + h) - 2.0 * self.f(1.0) + self.f(1.0 - h)) / (h * h)


def _js_generator(t: float) -> float:
    if t == 0:
        return math.log(2.0)
    return t * math.log(2.0 * t / (1.0 + t)) + math.log(2.0 / (1.0 + t))


def _hellinger_generator(t: float) -> float:
    return (math.sqrt(t) - 1.0) ** 2


def _chi2_generator(t: float) -> float:
    return (t - 1.0) ** 2 / (t + 1.0)


_GENERATORS: dict = {}


def generator(kind: "str | DivergenceKind") -> FDivergenceSpec:
    """返回某种散度的生成函数描述（缓存）"""
    kind = DivergenceKind.parse(kind)
    spec: Optional[FDivergenceSpec] = _GENERATORS.get(kind)
    if spec is None:
        if kind is DivergenceKind.JS:
            spec = FDivergenceSpec(kind, _js_generator, 0.5, math.log(2.0))
        elif kind is DivergenceKind.HELLINGER:
            spec = FDivergenceSpec(kind, _hellinger_generator, 0.5, 1.0)
        else:
            spec = FDivergenceSpec(kind, _chi2_generator, 1.0, 1.0)
        _GENERATORS[kind] = spec
    return spec
