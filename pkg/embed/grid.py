"""
确定性嵌入的频率网格
ω_j = j·step，j = −J…J，step = ε/(32d)；每个单元的振幅 √(σ·∫κ) 预先算好
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, List, Optional

import numpy as np

from config import config
from core.errors import ConfigError, UnsupportedKernel, ValidationError
from core.models import DivergenceKind
from core.rng import digest
from kernel.spectral import get_kernel, interval_mass

logger = logging.getLogger(__name__)

LAYOUT = "coord-major-cos-sin"

# 截断半径 ln(c·d/ε) 中的 c
_TRUNCATION_FACTOR = {DivergenceKind.JS: 8.0, DivergenceKind.CHI_SQUARED: 6.0}


def _ceil(x: float) -> int:
    # 公式值恰为整数时不因舍入多出一格
    return int(math.ceil(x - 1e-9))


def _check_params(kind: DivergenceKind, d: int, eps: float):
    if not kind.has_kernel:
        raise UnsupportedKernel("Hellinger 不需要网格，请使用 hellinger_embed")
    if int(d) != d or d < 1:
        raise ValidationError(f"d 必须是正整数，当前 {d}")
    if not 0 < eps < 1:
        raise ValidationError(f"eps 必须在 (0, 1) 内，当前 {eps}")


def grid_half_width(kind: "str | DivergenceKind", d: int, eps: float) -> int:
    """J = ⌈(32d/ε)·ln(8d/ε)⌉（JS）或 ⌈(32d/ε)·ln(6d/ε)⌉（χ²）"""
    kind = DivergenceKind.parse(kind)
    _check_params(kind, d, eps)
    return _ceil((32.0 * d / eps) * math.log(_TRUNCATION_FACTOR[kind] * d / eps))


@dataclass(frozen=True, eq=False)
class GridSpec:
    """
    一组 (kind, d, eps) 共享的网格

    interval_roots[j] 对应单元 [ω_{j−J}, ω_{j−J+1})，已乘上 √σ，
    因此嵌入的平方距离直接以自然对数计。
    """
    kind: DivergenceKind
    eps: float
    d: int
    J: int
    step: float
    interval_roots: np.ndarray = field(repr=False)

    @property
    def omegas(self) -> np.ndarray:
        """ω_j，j = −J…J"""
        return np.arange(-self.J, self.J + 1, dtype=np.float64) * self.step

    @property
    def cell_omegas(self) -> np.ndarray:
        """各单元左端点 ω_j，j = −J…J−1"""
        return np.arange(-self.J, self.J, dtype=np.float64) * self.step

    @property
    def block_len(self) -> int:
        return 4 * self.J

    @property
    def dimension(self) -> int:
        return 4 * self.J * self.d

    @property
    def digest(self) -> str:
        return digest("grid", self.kind.value, self.d, repr(float(self.eps)), self.J, repr(float(self.step)))

    @property
    def covered_mass(self) -> float:
        """网格覆盖的 κ 质量（不含 σ）"""
        return float(np.sum(self.interval_roots ** 2) / get_kernel(self.kind).divergence_scale)

    def header(self) -> dict:
        return {
            "kind": self.kind.value, "d": self.d, "eps": self.eps, "J": self.J,
            "step": self.step, "layout": LAYOUT, "grid_digest": self.digest,
        }


def check_memory(dimension: int, formula: str, guard: Optional[int] = None):
    """维度超过内存上限时拒绝"""
    guard = int(config.MEMORY_GUARD if guard is None else guard)
    if dimension > guard:
        raise ConfigError(f"{formula} = {dimension} 超过内存上限 {guard}（可调 embed.memory_guard）")


@lru_cache(maxsize=32)
def _build_grid(kind: DivergenceKind, d: int, eps: float, guard: int) -> GridSpec:
    J = grid_half_width(kind, d, eps)
    check_memory(4 * J * d, f"4·J·d = 4·{J}·{d}", guard)

    step = eps / (32.0 * d)
    spec = get_kernel(kind)
    left = np.arange(-J, J, dtype=np.float64) * step
    masses = interval_mass(kind, left, left + step)
    roots = np.sqrt(spec.divergence_scale * masses)
    roots.setflags(write=False)

    grid = GridSpec(kind=kind, eps=float(eps), d=int(d), J=J, step=step, interval_roots=roots)
    logger.info(f"网格已建立: {kind.value} d={d} eps={eps} J={J} 维度={grid.dimension} "
                f"覆盖质量={grid.covered_mass:.10f}")
    return grid


def build_grid(kind: "str | DivergenceKind", d: int, eps: float, guard: Optional[int] = None) -> GridSpec:
    """
    构建（并缓存）网格

    Raises:
        UnsupportedKernel: Hellinger
        ValidationError: d 或 eps 越界
        ConfigError: 4·J·d 超过内存上限
    """
    kind = DivergenceKind.parse(kind)
    _check_params(kind, d, eps)
    return _build_grid(kind, int(d), float(eps), int(config.MEMORY_GUARD if guard is None else guard))


def dimension_table(kind: "str | DivergenceKind", eps: float, ds: Iterable[int]) -> List[dict]:
    """不同 d 下的 J 与 4·J·d，只算公式不建网格"""
    rows = []
    for d in ds:
        J = grid_half_width(kind, d, eps)
        rows.append({"d": int(d), "J": J, "dimension": 4 * J * int(d)})
    return rows
