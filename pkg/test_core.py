#!/usr/bin/env python3
"""
核心模块测试：单纯形校验、闭式散度与上界、f-散度生成函数、文件读写、随机数

运行：
    python3 test_core.py
"""
import logging
import math
import sys
import tempfile
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

from core import (
    DivergenceKind, Distribution, ValidationError, DimensionError,
    validate, scalar_divergence, divergence, pairwise_divergences,
    f_divergence, generator, second_derivative_at_one, derive_seed, make_rng,
)
from core.io import read_distributions, write_distributions
from cli.datasets import generate
from embed import build_grid, embed_point
from kernel import h

logging.basicConfig(level=logging.WARNING)
logger = logging.getLogger("test")

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


# ─────────────────────────────────────────────────────────────────────────────
# 辅助

def ok(msg):
    print(f"  ✓  {msg}")

def fail(msg, err=""):
    print(f"  ✗  {msg}", f"→ {err}" if err else "")

def section(title):
    print(f"\n{'─'*50}")
    print(f"  {title}")
    print(f"{'─'*50}")


def _raises(exc, fn, *args, **kwargs):
    try:
        fn(*args, **kwargs)
    except exc:
        return True
    return False


# ─────────────────────────────────────────────────────────────────────────────
# 1. 单纯形校验

def test_validate():
    section("1. 单纯形校验")
    p = validate([0.25, 0.75], id="a")
    assert p.d == 2 and p.id == "a"
    assert not p.values.flags.writeable
    ok("合法分布构造，values 只读")

    assert _raises(ValidationError, validate, [])
    assert _raises(ValidationError, validate, [0.5, float("nan")])
    assert _raises(ValidationError, validate, [1.2, -0.2])
    assert _raises(ValidationError, validate, [0.5, 0.4])
    ok("空 / nan / 负坐标 / 和不为 1 均被拒绝")

    assert _raises(ValidationError, validate, [0.0, 0.0], normalize=True)
    q = validate([2.0, 6.0], normalize=True)
    assert np.allclose(q.values, [0.25, 0.75])
    ok("normalize=True 按总和归一化，零质量拒绝")

    validate([0.5, 0.5 + 5e-10])
    ok("和的容差 1e-9")

    edge = validate([1.0 + 5e-10])
    assert edge.values.max() <= 1.0
    embed_point(build_grid("js", 1, 0.5), edge)
    h(edge.values[0], 0.5, 1.0)
    assert validate([1.0 + 5e-10, 0.0]).values[0] == 1.0
    ok("容差内略超 1 的坐标截到 1，可直接用于 h 与嵌入")

    assert validate([0.5, 0.5]) == validate([0.5, 0.5])
    assert DivergenceKind.parse("Jensen-Shannon") is DivergenceKind.JS
    assert DivergenceKind.parse("chi-squared") is DivergenceKind.CHI_SQUARED
    assert _raises(ValidationError, DivergenceKind.parse, "kl")
    ok("相等比较与散度名称解析")


# ─────────────────────────────────────────────────────────────────────────────
# 2. 闭式散度与上界

def test_closed_forms():
    section("2. 闭式散度")
    assert abs(scalar_divergence("js", 1.0, 0.0) - math.log(2.0)) < 1e-15
    assert abs(scalar_divergence("hellinger", 0.5, 0.25) - 0.0857864376269) < 1e-12
    assert abs(scalar_divergence("chi2", 0.9, 0.1) - 0.64) < 1e-15
    assert scalar_divergence("chi2", 0.0, 0.0) == 0.0
    assert scalar_divergence("js", 0.3, 0.3) == 0.0
    ok("单坐标示例值")

    p = validate([1.0, 0.0])
    q = validate([0.0, 1.0])
    assert abs(divergence("js", p, q) - 2 * math.log(2.0)) < 1e-14
    assert abs(divergence("hellinger", p, q) - 2.0) < 1e-14
    assert abs(divergence("chi2", p, q) - 2.0) < 1e-14
    ok("正交分布：JS = 2 ln 2，He = χ² = 2")

    assert _raises(DimensionError, divergence, "js", p, validate([1.0, 0.0, 0.0]))
    ok("维度不一致 → DimensionError")

    x = 0.4
    for delta in (1e-9, 1e-5, 1e-3):
        approx = delta ** 2 / (4 * x)
        got = scalar_divergence("js", x, x + delta)
        assert got > 0
        assert abs(got - approx) <= 2 * (delta / x) * approx
    ok("x≈y 时 JS 无抵消误差")

    rng = make_rng(7, "pairwise")
    pts = rng.dirichlet(np.ones(5), size=6)
    mat = pairwise_divergences("chi2", pts)
    assert np.allclose(mat, mat.T) and np.all(np.diag(mat) == 0)
    assert abs(mat[1, 4] - divergence("chi2", validate(pts[1]), validate(pts[4]))) < 1e-14
    ok("两两散度矩阵对称且与逐对计算一致")


def test_divergence_bounds():
    section("3. 散度上界")
    maxima = {"js": 2 * math.log(2.0), "hellinger": 2.0, "chi2": 2.0}
    worst = dict.fromkeys(maxima, 0.0)
    for d in (2, 8, 64):
        for family in ("uniform-dirichlet", "sparse", "corner-heavy"):
            pts = np.stack([p.values for p in generate(40, d, family, seed=d)])
            for kind, bound in maxima.items():
                mat = pairwise_divergences(kind, pts)
                assert mat.max() <= bound + 1e-12, (kind, d, family, mat.max())
                worst[kind] = max(worst[kind], float(mat.max()))
    ok("Dirichlet / 稀疏 / 角点 × d ∈ {2, 8, 64}: " +
       ", ".join(f"{k} 最大 {v:.4f}" for k, v in worst.items()))


@settings(max_examples=300, deadline=None)
@given(unit, unit)
def test_ordering_chain(x, y):
    """f_H ≤ f_χ ≤ 2·f_J"""
    fh = scalar_divergence("hellinger", x, y)
    fc = scalar_divergence("chi2", x, y)
    fj = scalar_divergence("js", x, y)
    assert fh <= fc + 1e-12
    assert fc <= 2 * fj + 1e-12


@settings(max_examples=200, deadline=None)
@given(unit, unit)
def test_symmetry_and_nonnegativity(x, y):
    for kind in DivergenceKind:
        a = scalar_divergence(kind, x, y)
        assert a >= 0
        assert abs(a - scalar_divergence(kind, y, x)) < 1e-15


# ─────────────────────────────────────────────────────────────────────────────
# 4. f-散度生成函数

def test_generators():
    section("4. f-散度生成函数")
    for kind, expected in ((DivergenceKind.JS, 0.5), (DivergenceKind.HELLINGER, 0.5),
                           (DivergenceKind.CHI_SQUARED, 1.0)):
        spec = generator(kind)
        assert abs(spec.f(1.0)) < 1e-12
        assert second_derivative_at_one(kind) == expected
        assert abs(spec.numeric_second_derivative() - expected) < 1e-5
        ok(f"{kind.value}: f(1)=0, f''(1)={expected}")

    rng = make_rng(11, "fdiv")
    for _ in range(20):
        a, b = rng.dirichlet(np.ones(4), size=2)
        a[0] = 0.0
        a /= a.sum()
        p, q = validate(a), validate(b)
        for kind in DivergenceKind:
            assert abs(f_divergence(generator(kind), p, q) - divergence(kind, p, q)) < 1e-12
    ok("Σ p·f(q/p) 与闭式一致（含零坐标极限约定）")


# ─────────────────────────────────────────────────────────────────────────────
# 5. 文件读写

def test_io():
    section("5. 分布文件读写")
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        pts = [validate([0.1, 0.2, 0.7], id="0"), validate([1 / 3, 1 / 3, 1 / 3], id="1")]

        write_distributions(tmp / "a.csv", pts)
        back = read_distributions(tmp / "a.csv")
        assert [p.id for p in back] == ["0", "1"]
        assert all(np.array_equal(p.values, b.values) for p, b in zip(pts, back))
        ok("CSV 精确回读，id 为行号")

        named = [validate([0.5, 0.5], id="left"), validate([0.9, 0.1], id="right")]
        write_distributions(tmp / "b.jsonl", named)
        back = read_distributions(tmp / "b.jsonl")
        assert [p.id for p in back] == ["left", "right"]
        ok("JSON lines 保留 id")

        (tmp / "c.csv").write_text("1,1\n2,6\n", encoding="utf-8")
        assert _raises(ValidationError, read_distributions, tmp / "c.csv")
        back = read_distributions(tmp / "c.csv", normalize=True)
        assert np.allclose(back[1].values, [0.25, 0.75])
        ok("--normalize 语义")

        (tmp / "d.csv").write_text("0.5,0.5\n0.5,abc\n", encoding="utf-8")
        try:
            read_distributions(tmp / "d.csv")
            raise AssertionError("应当报错")
        except ValidationError as e:
            assert "第 2 行" in str(e)
        ok("解析错误带行号")


# ─────────────────────────────────────────────────────────────────────────────
# 6. 随机数

def test_rng():
    section("6. 随机数派生")
    assert derive_seed(1, "a") == derive_seed(1, "a")
    assert derive_seed(1, "a") != derive_seed(1, "b")
    assert derive_seed(1, "a") != derive_seed(2, "a")
    assert np.array_equal(make_rng(3, "x").random(5), make_rng(3, "x").random(5))
    ok("同种子同标签可复现，不同标签互相独立")


# ─────────────────────────────────────────────────────────────────────────────
# 主入口

def main():
    print("=" * 50)
    print("  核心模块测试")
    print("=" * 50)

    tests = [
        ("单纯形校验", test_validate),
        ("闭式散度", test_closed_forms),
        ("散度上界", test_divergence_bounds),
        ("f_H ≤ f_χ ≤ 2f_J", test_ordering_chain),
        ("对称与非负", test_symmetry_and_nonnegativity),
        ("生成函数", test_generators),
        ("文件读写", test_io),
        ("随机数", test_rng),
    ]
    results = []
    for name, fn in tests:
        try:
            fn()
            results.append((name, True))
        except Exception as e:
            import traceback; traceback.print_exc()
            fail(name, e)
            results.append((name, False))

    print(f"\n{'='*50}")
    passed = sum(1 for _, r in results if r)
    for name, result in results:
        print(f"  {'✓' if result else '✗'}  {name}")
    print(f"\n  {passed}/{len(results)} 项通过")
    print("=" * 50)
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
