"""
从核密度 κ 抽取频率（逆变换采样）
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from config import config
from core.errors import ConfigError, UnsupportedKernel, ValidationError
from core.models import DivergenceKind
from core.rng import RNG_ID, digest, make_rng
from kernel.spectral import kernel_quantile

logger = logging.getLogger(__name__)

LAYOUT = "coord-major-cos-sin"

# 方差上界常数：Var ≤ c·f²
VARIANCE_CONSTANT = {DivergenceKind.JS: 36, DivergenceKind.CHI_SQUARED: 23}


@dataclass(frozen=True, eq=False)
class FrequencySample:
    """s 个独立同分布于 κ 的频率，可由 (kind, s, seed) 重新生成"""
    kind: DivergenceKind
    omegas: np.ndarray = field(repr=False)
    seed: int
    s: int

    @property
    def digest(self) -> str:
        return digest("sample", self.kind.value, self.s, self.seed, RNG_ID)

    def header(self) -> dict:
        return {
            "kind": self.kind.value, "s": self.s, "seed": self.seed, "rng_id": RNG_ID,
            "layout": LAYOUT, "sample_digest": self.digest,
        }


def _open_unit_interval(rng: np.random.Generator, s: int) -> np.ndarray:
    """(0,1) 内的均匀数：53 位整数取格点中点，永不为 0 或 1"""
    return (rng.integers(0, 2 ** 53, size=s, dtype=np.int64) + 0.5) / 2.0 ** 53


def draw_frequencies(kind: "str | DivergenceKind", s: int, seed: int) -> FrequencySample:
    """
    抽取 s 个频率

    Args:
        kind: JS 或 χ²
        s: 样本数
        seed: 种子（与 kind 一起派生子种子）

    Returns:
        FrequencySample
    """
    kind = DivergenceKind.parse(kind)
    if not kind.has_kernel:
        raise UnsupportedKernel("Hellinger 没有谱密度，无需采样")
    if int(s) != s or s < 1:
        raise ValidationError(f"样本数 s 必须 ≥ 1，当前 {s}")

    rng = make_rng(seed, f"frequencies:{kind.value}")
    omegas = np.asarray(kernel_quantile(kind, _open_unit_interval(rng, int(s))), dtype=np.float64)
    omegas.setflags(write=False)
    logger.debug(f"已抽取 {s} 个频率 ({kind.value}, seed={seed})")
    return FrequencySample(kind=kind, omegas=omegas, seed=int(seed), s=int(s))


def required_samples(kind: "str | DivergenceKind", n: int, d: int, eps: float,
                     guard: Optional[int] = None) -> int:
    """
    s = ⌈36·n²·d²/ε²⌉（JS）或 ⌈23·n²·d²/ε²⌉（χ²）

    Raises:
        ConfigError: 2·s·d 超过内存上限
    """
    kind = DivergenceKind.parse(kind)
    if not kind.has_kernel:
        raise UnsupportedKernel("Hellinger 不需要采样")
    if n < 1 or d < 1 or not 0 < eps <= 1:
        raise ValidationError("需要 n ≥ 1, d ≥ 1, 0 < eps < 1")

    c = VARIANCE_CONSTANT[kind]
    exact = c * float(n) ** 2 * float(d) ** 2 / eps ** 2
    guard = int(config.MEMORY_GUARD if guard is None else guard)
    if not math.isfinite(exact) or 2.0 * exact * d > guard:
        raise ConfigError(f"s = ⌈{c}·n²·d²/ε²⌉ ≈ {exact:.3g}，2·s·d 超过内存上限 {guard}")
    return int(math.ceil(exact - 1e-9))
