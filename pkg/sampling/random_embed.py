"""
随机乘性误差嵌入
每个坐标 2s 个分量：√(σ·p_i/s)·cos(ω_j ln p_i) 与 sin 项，平方距离即 σ·h 的样本均值
"""
import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from core.errors import DimensionError, EmbeddingMismatchError, ValidationError
from core.models import Distribution, DivergenceKind
from embed.deterministic import l22_distance
from kernel.spectral import get_kernel, h
from .frequencies import FrequencySample, draw_frequencies

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RandEmbedding:
    """一个点的随机嵌入，长度 2·s·d"""
    sample: FrequencySample
    vector: np.ndarray = field(repr=False)
    id: str = ""

    @property
    def d(self) -> int:
        return self.vector.shape[0] // (2 * self.sample.s)

    def distance(self, other: "RandEmbedding") -> float:
        if self.sample.digest != other.sample.digest:
            raise EmbeddingMismatchError(f"采样摘要不一致: {self.sample.digest} vs {other.sample.digest}")
        if self.vector.shape != other.vector.shape:
            raise DimensionError(f"嵌入长度不一致: {self.vector.shape} vs {other.vector.shape}")
        return l22_distance(self.vector, other.vector)


def rand_embed_coordinates(sample: FrequencySample, values: np.ndarray) -> np.ndarray:
    """批量坐标块，形状 (m, 2s)"""
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if np.any(values < 0) or np.any(values > 1):
        raise ValidationError("坐标值必须在 [0, 1] 内")

    scale = get_kernel(sample.kind).divergence_scale / sample.s
    positive = values > 0
    logs = np.log(np.where(positive, values, 1.0))
    amps = np.sqrt(scale * values)[:, None]
    phase = logs[:, None] * sample.omegas[None, :]
    out = np.concatenate([amps * np.cos(phase), amps * np.sin(phase)], axis=1)
    out[~positive] = 0.0
    return out


def rand_embed_point(sample: FrequencySample, p: Distribution) -> RandEmbedding:
    """整点随机嵌入（坐标主序，每块先 cos 后 sin）"""
    vector = rand_embed_coordinates(sample, p.values).reshape(-1)
    return RandEmbedding(sample=sample, vector=vector, id=p.id)


def moment_check(kind: "str | DivergenceKind", x: float, y: float, s: int, seed: int) -> Tuple[float, float]:
    """
    σ·h(x,y,Ω) 在 Ω ~ κ 下的 Monte Carlo 均值与（无偏）方差

    均值应接近 f(x,y)；方差上界 36·f_J²（JS）/ 23·f_χ²（χ²）。
    """
    kind = DivergenceKind.parse(kind)
    if s < 2:
        raise ValidationError("moment_check 需要 s ≥ 2")
    sample = draw_frequencies(kind, s, seed)
    values = get_kernel(kind).divergence_scale * h(x, y, sample.omegas)
    return float(np.mean(values)), float(np.var(values, ddof=1))
