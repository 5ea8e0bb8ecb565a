"""
保结构降维 Δ_d → Δ_{k+1}
1. 嵌入 ℓ₂²（Hellinger 精确；JS/χ² 用确定性或随机嵌入）
2. JL 投影到 ℝ^k
3. 等距映射到零和超平面 L
4. 缩放进质心附近半径 r 的球
"""
import json
import logging
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import config
from core.divergences import divergence, divergence_rows, pairwise_divergences
from core.errors import ConfigError, DimensionError, ValidationError
from core.io import atomic_write_text
from core.models import DivergenceKind, Distribution
from core.rng import RNG_ID, derive_seed
from embed.deterministic import embed_point, hellinger_embed
from embed.grid import build_grid, check_memory
from sampling.frequencies import draw_frequencies
from sampling.random_embed import rand_embed_point
from .calibration import calibrate_radius, local_constant
from .projection import JLProjection, project_rows, target_dimension
from .simplex_map import remap_rows, scale_into_ball

logger = logging.getLogger(__name__)

EMBEDDING_MODES = ("det", "rand")


@dataclass
class ReducedPointSet:
    """降维结果；原始散度 ≈ D_f(降维后) / divergence_scale"""
    kind: DivergenceKind
    points: np.ndarray = field(repr=False)
    ids: List[str]
    k: int
    geometric_scale: float
    local_constant: float
    ball_radius: float
    c0: float
    eps: float
    seed: int
    d: int
    embedding: str
    embed_dimension: int

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def divergence_scale(self) -> float:
        """s_cal = C·β²"""
        return self.local_constant * self.geometric_scale ** 2

    def distributions(self) -> List[Distribution]:
        return [Distribution(values=row, id=pid) for row, pid in zip(self.points, self.ids)]

    def header(self) -> dict:
        return {
            "kind": self.kind.value, "n": self.n, "d": self.d, "k": self.k, "eps": self.eps,
            "seed": self.seed, "rng_id": RNG_ID, "c0": self.c0, "r": self.ball_radius,
            "beta": self.geometric_scale, "local_constant": self.local_constant,
            "divergence_scale": self.divergence_scale, "embedding": self.embedding,
            "embed_dimension": self.embed_dimension,
        }

    def audit(self, original: Sequence[Distribution]) -> Tuple[List[dict], dict]:
        """
        逐对比较原始散度与换算后的降维散度

        Returns:
            (rows, summary)；ratio = D_f(降维)/(s_cal·D_f(原始))，两者都为 0 时记 1
        """
        if len(original) != self.n:
            raise DimensionError(f"原始点数 {len(original)} ≠ 降维点数 {self.n}")
        scale = self.divergence_scale
        rows = []
        for i, j in combinations(range(self.n), 2):
            d_orig = divergence(self.kind, original[i], original[j])
            d_red = float(divergence_rows(self.kind, self.points[i], self.points[j]))
            if d_orig > 0:
                ratio = d_red / (scale * d_orig)
            else:
                ratio = 1.0 if d_red == 0 else float("inf")
            rows.append({
                "i": i, "j": j, "id_i": self.ids[i], "id_j": self.ids[j],
                "D_original": d_orig, "D_reduced": d_red, "ratio": ratio,
            })

        ratios = np.array([row["ratio"] for row in rows])
        within = int(np.sum(np.abs(ratios - 1.0) <= self.eps))
        summary = {
            "pairs": len(rows),
            "min_ratio": float(ratios.min()) if rows else 1.0,
            "max_ratio": float(ratios.max()) if rows else 1.0,
            "max_distortion": float(np.max(np.abs(ratios - 1.0))) if rows else 0.0,
            "within_eps": within,
            "eps": self.eps,
        }
        return rows, summary

    def to_jsonl(self) -> str:
        lines = [json.dumps(self.header())]
        for pid, row in zip(self.ids, self.points):
            lines.append(json.dumps({"id": pid, "p_reduced": [float(v) for v in row]}))
        return "\n".join(lines) + "\n"

    def save(self, path: Path):
        atomic_write_text(Path(path), self.to_jsonl())
        logger.info(f"降维结果已保存: {path}")


def load_reduced(path: Path) -> Tuple[dict, List[Distribution]]:
    """读取 reduce 输出：参数头 + 降维后的点"""
    path = Path(path)
    try:
        lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
        header = json.loads(lines[0])
        points = [
            Distribution(values=rec["p_reduced"], id=str(rec["id"]))
            for rec in map(json.loads, lines[1:])
        ]
    except (OSError, ValueError, KeyError, IndexError) as e:
        raise ValidationError(f"无法读取降维文件 {path}: {e}") from e
    return header, points


def embedding_budget(kind: "str | DivergenceKind", points: Sequence[Distribution], eps: float) -> float:
    """
    确定性嵌入的加性误差预算 ε/4·min 正的两两散度

    这样加性误差对每一对都不超过相对的 ε/4。所有点都相同时取 ε/4。
    """
    D = pairwise_divergences(kind, np.stack([p.values for p in points]))
    positive = D[D > 0]
    if positive.size == 0:
        return eps / 4.0
    return float(eps / 4.0 * positive.min())


def embed_for_reduction(kind: DivergenceKind, points: Sequence[Distribution], eps: float, seed: int,
                        embedding: str = "det", samples: Optional[int] = None) -> np.ndarray:
    """第 1 步：所有点的 ℓ₂² 嵌入，形状 (n, D)"""
    if kind is DivergenceKind.HELLINGER:
        return np.stack([hellinger_embed(p) for p in points])

    d = points[0].d
    if embedding == "det":
        eps_embed = embedding_budget(kind, points, eps)
        try:
            grid = build_grid(kind, d, eps_embed)
        except ConfigError as e:
            raise ConfigError(f"{e}；确定性嵌入预算 ε_embed={eps_embed:.3e} 太小，可改用 --embedding rand") from e
        logger.info(f"第 1 步: 确定性嵌入 ε_embed={eps_embed:.3e} 维度={grid.dimension}")
        return np.stack([embed_point(grid, p).vector for p in points])

    if embedding == "rand":
        s = int(config.DEFAULT_SAMPLES if samples is None else samples)
        check_memory(2 * s * d, f"2·s·d = 2·{s}·{d}")
        sample = draw_frequencies(kind, s, derive_seed(seed, "reduce-sample"))
        logger.info(f"第 1 步: 随机嵌入 s={s} 维度={2 * s * d}")
        return np.stack([rand_embed_point(sample, p).vector for p in points])

    raise ValidationError(f"未知的嵌入方式: {embedding}（可选 {', '.join(EMBEDDING_MODES)}）")


def reduce(kind: "str | DivergenceKind", points: Sequence[Distribution], eps: float, seed: int = 0,
           embedding: str = "det", samples: Optional[int] = None, c0: Optional[float] = None,
           jl_constant: Optional[float] = None) -> ReducedPointSet:
    """
    把 n 个 Δ_d 上的点降到 Δ_{k+1}，k = ⌈c_jl·ln n/(ε/4)²⌉

    Args:
        kind: 散度类型
        points: 输入点（n ≥ 2，维度一致）
        eps: 总失真 ε ∈ (0, 1)
        seed: 随机种子，JL、采样与校准各自派生子种子
        embedding: JS/χ² 的第 1 步方式 "det" 或 "rand"；Hellinger 忽略
        samples: rand 模式的频率采样数
        c0: 初始球半径系数，默认 config.BALL_C0
        jl_constant: JL 常数 c_jl，默认 config.JL_CONSTANT

    Returns:
        ReducedPointSet

    Raises:
        ValidationError / DimensionError: 输入不合法
        ConfigError: 维度超过内存上限
        ConvergenceError: 半径校准未收敛
    """
    kind = DivergenceKind.parse(kind)
    points = list(points)
    if len(points) < 2:
        raise ValidationError("降维至少需要 2 个点")
    if not 0 < eps < 1:
        raise ValidationError(f"eps 必须在 (0, 1) 内，当前 {eps}")
    d = points[0].d
    for p in points:
        if p.d != d:
            raise DimensionError(f"点 {p.id!r} 的维度 {p.d} ≠ {d}")

    n = len(points)
    X = embed_for_reduction(kind, points, eps, seed, embedding, samples)

    k = target_dimension(n, eps, jl_constant)
    proj = JLProjection(k=k, D=X.shape[1], seed=derive_seed(seed, "jl"))
    logger.info(f"第 2 步: JL 投影 D={proj.D} → k={k}")
    Y = project_rows(proj, X)

    Z = remap_rows(Y)

    r = calibrate_radius(kind, k, eps, c0, seed=derive_seed(seed, "calibrate"))
    c0_used = r * (k + 1) / eps
    reduced, beta = scale_into_ball(Z, k, eps, c0_used)

    result = ReducedPointSet(
        kind=kind, points=reduced, ids=[p.id or str(i) for i, p in enumerate(points)], k=k,
        geometric_scale=beta, local_constant=local_constant(kind, k), ball_radius=r, c0=c0_used,
        eps=float(eps), seed=int(seed), d=d,
        embedding="exact" if kind is DivergenceKind.HELLINGER else embedding,
        embed_dimension=int(X.shape[1]),
    )
    logger.info(f"降维完成: {kind.value} n={n} d={d} → k+1={k + 1}, β={beta:.3e}, "
                f"s_cal={result.divergence_scale:.3e}")
    return result
