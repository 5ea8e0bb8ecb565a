"""
不变量自检（verify 子命令）
每个检查返回 (是否通过, 说明)；规模控制在桌面机几十秒内
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from core.divergences import divergence, scalar_divergence
from core.models import Distribution, validate
from core.rng import make_rng
from dimred.reducer import reduce
from embed.deterministic import embedded_distance
from embed.grid import build_grid, dimension_table, grid_half_width
from kernel.spectral import h, spectral_divergence, tail_mass, truncation_radius
from stream.sketch import new_sketch, space_audit

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _points(seed: int, label: str, n: int, d: int) -> List[Distribution]:
    rng = make_rng(seed, label)
    return [validate(v, id=f"p{i}") for i, v in enumerate(rng.dirichlet(np.ones(d), size=n))]


def check_kernel_identity(seed: int) -> Tuple[bool, str]:
    rng = make_rng(seed, "verify:identity")
    worst = 0.0
    for kind in ("js", "chi2"):
        for x, y in rng.random((20, 2)):
            exact = float(scalar_divergence(kind, x, y))
            worst = max(worst, abs(spectral_divergence(kind, x, y) - exact))
    return worst <= 1e-7, f"最大偏差 {worst:.2e}（界 1e-7）"


def check_h_bounds(seed: int) -> Tuple[bool, str]:
    rng = make_rng(seed, "verify:h")
    x, y = rng.random(10_000), rng.random(10_000)
    w = rng.uniform(-50, 50, 10_000)
    hv = h(x, y, w)
    hell = scalar_divergence("hellinger", x, y)
    ok = bool(np.all(hv >= 0) and np.all(hv <= 2) and np.all(hv <= hell * (1 + 2 * np.abs(w)) ** 2 + 1e-12))
    return ok, f"0 ≤ h ≤ 2 且 h ≤ f_H(1+2|ω|)²，max h = {hv.max():.4f}"


def check_ordering(seed: int) -> Tuple[bool, str]:
    rng = make_rng(seed, "verify:order")
    x, y = rng.random(10_000), rng.random(10_000)
    fh = scalar_divergence("hellinger", x, y)
    fc = scalar_divergence("chi2", x, y)
    fj = scalar_divergence("js", x, y)
    ok = bool(np.all(fh <= fc + 1e-12) and np.all(fc <= 2 * fj + 1e-12))
    return ok, "f_H ≤ f_χ ≤ 2f_J（1e4 对）"


def check_truncation(seed: int) -> Tuple[bool, str]:
    masses = []
    for kind in ("js", "chi2"):
        for eps in (0.2, 0.05):
            masses.append((kind, eps, tail_mass(kind, truncation_radius(kind, eps))))
    ok = all(m <= eps for _, eps, m in masses)
    return ok, ", ".join(f"{k}@{e}: {m:.3e}" for k, e, m in masses)


def check_det_embedding(seed: int) -> Tuple[bool, str]:
    eps, d = 0.2, 2
    worst = 0.0
    for kind in ("js", "chi2"):
        grid = build_grid(kind, d, eps)
        if grid.dimension != 4 * grid_half_width(kind, d, eps) * d:
            return False, f"{kind} 维度与 4·J·d 不符"
        pts = _points(seed, f"verify:det:{kind}", 100, d)
        for p, q in zip(pts[::2], pts[1::2]):
            worst = max(worst, abs(embedded_distance(grid, p, q) - divergence(kind, p, q)))
    return worst <= eps, f"d=2 ε=0.2 最大加性误差 {worst:.2e}"


def check_growth(seed: int) -> Tuple[bool, str]:
    rows = dimension_table("js", 0.1, (2, 4, 8, 16))
    dims = [r["dimension"] for r in rows]
    ratios = [b / a for a, b in zip(dims, dims[1:])]
    ok = all(4.0 <= r <= 5.0 for r in ratios)
    return ok, "4·J·d: " + ", ".join(f"d={r['d']}→{r['dimension']}" for r in rows)


def check_sketch_space(seed: int) -> Tuple[bool, str]:
    small = space_audit(new_sketch("js", 8, 0.05, 0.1, 0.05, seed))
    large = space_audit(new_sketch("js", 64, 0.05, 0.1, 0.05, seed))
    ok = small["counters"] == large["counters"]
    return ok, (f"计数器 {small['counters']}，嵌入维度 d=8: {small['embedding_dimension']}, "
                f"d=64: {large['embedding_dimension']}")


def check_reduction(seed: int) -> Tuple[bool, str]:
    pts = _points(seed, "verify:dimred", 8, 16)
    res = reduce("hellinger", pts, eps=0.5, seed=seed)
    on_simplex = bool(np.all(res.points > 0) and np.all(np.abs(res.points.sum(axis=1) - 1) <= 1e-9))
    _, summary = res.audit(pts)
    ok = on_simplex and summary["within_eps"] == summary["pairs"]
    return ok, f"k+1={res.k + 1}，比值 [{summary['min_ratio']:.3f}, {summary['max_ratio']:.3f}]"


CHECKS: List[Tuple[str, Callable[[int], Tuple[bool, str]]]] = [
    ("谱核恒等式", check_kernel_identity),
    ("h 的界", check_h_bounds),
    ("散度大小顺序", check_ordering),
    ("截断尾质量", check_truncation),
    ("确定性嵌入误差", check_det_embedding),
    ("嵌入维度增长", check_growth),
    ("草图空间", check_sketch_space),
    ("降维失真", check_reduction),
]


def run_checks(seed: int = 0) -> List[CheckResult]:
    results = []
    for name, fn in CHECKS:
        try:
            passed, detail = fn(seed)
        except Exception as e:
            logger.exception(f"检查 {name} 出错")
            passed, detail = False, f"异常: {e}"
        results.append(CheckResult(name, bool(passed), detail))
        logger.info(f"{'✓' if passed else '✗'} {name}: {detail}")
    return results
