#!/usr/bin/env python3
"""
聚合流与线性草图测试：线性、顺序无关、可合并、估计精度、空间核算、文件读写

运行：
    python3 test_stream.py
"""
import logging
import math
import sys
import tempfile
from pathlib import Path

import numpy as np

from core import (
    DivergenceKind, DuplicateCoordinateError, SketchMismatchError, ValidationError,
    validate, divergence, make_rng,
)
from embed import build_grid, embed_point
from stream import (
    AggregateItem, StreamConfig, new_sketch, process_item, sketch_vector, estimate_divergence,
    space_audit, replay_stream, points_to_stream, read_stream, write_stream, save_sketches,
    load_sketches, pairwise_estimates, get_hasher,
)

logging.basicConfig(level=logging.WARNING)
logger = logging.getLogger("test")


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


def _sketch_point(p, kind, eps_embed, eps_l2, delta, seed, order=None):
    sk = new_sketch(kind, p.d, eps_embed, eps_l2, delta, seed, point_id=p.id)
    for i in (order if order is not None else range(p.d)):
        process_item(sk, AggregateItem(p.id, i, p.values[i]))
    return sk


# ─────────────────────────────────────────────────────────────────────────────
# 1. 构造与哈希

def test_construction():
    section("1. 草图构造")
    sk = new_sketch("js", 8, 0.05, 0.1, 0.05, seed=1)
    assert sk.width == 600 and sk.reps == 24
    assert sk.counters.shape == (24, 600) and not np.any(sk.counters)
    ok("m = ⌈6/0.1²⌉ = 600, R = ⌈8·ln20⌉ = 24，初始全 0")

    h1 = get_hasher(1, 24, 600)
    flat_a, signs_a = h1.hash_indices(np.arange(1000))
    flat_b, signs_b = get_hasher(1, 24, 600).hash_indices(np.arange(1000))
    assert np.array_equal(flat_a, flat_b) and np.array_equal(signs_a, signs_b)
    assert set(np.unique(signs_a)) == {-1, 1}
    assert flat_a.min() >= 0 and flat_a.max() < 24 * 600
    assert abs(float(signs_a.mean())) < 0.05
    ok("同种子哈希一致，符号 ±1 近似均衡，桶号在范围内")

    a16 = space_audit(new_sketch("js", 16, 0.05, 0.1, 0.05))
    a8 = space_audit(sk)
    assert a8["counters"] == a16["counters"] == 24 * 600
    assert a16["embedding_dimension"] > 3 * a8["embedding_dimension"]
    ok(f"计数器数与 d 无关: d=8 嵌入维度 {a8['embedding_dimension']}, d=16 {a16['embedding_dimension']}")

    for bad in (dict(kind="hellinger", d=2, eps_embed=0.1, eps_l2=0.1, delta=0.1),
                dict(kind="js", d=2, eps_embed=0.1, eps_l2=1.5, delta=0.1)):
        try:
            StreamConfig(**bad)
            raise AssertionError(f"应当拒绝 {bad}")
        except ValidationError:
            pass
    ok("非法参数被拒绝")


# ─────────────────────────────────────────────────────────────────────────────
# 2. 线性与顺序无关

def test_linearity():
    section("2. 线性、顺序无关、可合并")
    rng = make_rng(5, "linearity")
    p = validate(rng.dirichlet(np.ones(8)), id="p")
    q = validate(rng.dirichlet(np.ones(8)), id="q")
    args = ("js", 0.2, 0.1, 0.1, 7)

    sk = new_sketch("js", 8, 0.2, 0.1, 0.1, seed=7, point_id="z")
    process_item(sk, AggregateItem("z", 3, 0.0))
    assert not np.any(sk.counters) and 3 in sk.seen
    ok("值 0 → 计数器不变")

    forward = _sketch_point(p, *args)
    shuffled = _sketch_point(p, *args, order=[5, 2, 7, 0, 3, 6, 1, 4])
    assert np.allclose(forward.counters, shuffled.counters, atol=1e-9, rtol=0)
    ok("坐标到达顺序不影响计数器")

    grid = build_grid("js", 8, 0.2)
    bulk = sketch_vector(new_sketch("js", 8, 0.2, 0.1, 0.1, seed=7), embed_point(grid, p).vector)
    assert np.allclose(forward.counters, bulk.counters, atol=1e-9, rtol=0)
    ok("逐项草图 = 整条嵌入向量的草图")

    sq = _sketch_point(q, *args)
    diff_vec = embed_point(grid, p).vector - embed_point(grid, q).vector
    diff_sketch = sketch_vector(new_sketch("js", 8, 0.2, 0.1, 0.1, seed=7), diff_vec)
    assert np.allclose((forward - sq).counters, diff_sketch.counters, atol=1e-9, rtol=0)
    ok("sketch(p) − sketch(q) = sketch(emb p − emb q)")

    left = _sketch_point(p, *args, order=[0, 1, 2, 3])
    right = new_sketch("js", 8, 0.2, 0.1, 0.1, seed=7, point_id="p")
    for i in (4, 5, 6, 7):
        process_item(right, AggregateItem("p", i, p.values[i]))
    merged = left.merge(right)
    assert np.allclose(merged.counters, forward.counters, atol=1e-9, rtol=0) and merged.is_complete
    try:
        merged.merge(left)
        raise AssertionError("重叠坐标不能合并")
    except DuplicateCoordinateError:
        pass
    ok("不相交坐标子集的草图相加 = 整点草图；重叠合并被拒绝")


def test_item_errors():
    section("3. 聚合模型约束")
    sk = new_sketch("chi2", 4, 0.2, 0.2, 0.1, seed=0, point_id="a")
    process_item(sk, AggregateItem("a", 1, 0.4))
    try:
        process_item(sk, AggregateItem("a", 1, 0.4))
        raise AssertionError("重复坐标应报错")
    except DuplicateCoordinateError:
        ok("重复 (点, 坐标) → DuplicateCoordinateError")
    try:
        process_item(sk, AggregateItem("a", 4, 0.1))
        raise AssertionError("越界坐标应报错")
    except ValidationError:
        ok("坐标越界 → ValidationError")
    try:
        AggregateItem("a", 0, 1.5)
        raise AssertionError("坐标值越界应报错")
    except ValidationError:
        ok("坐标值 ∉ [0,1] → ValidationError")

    other = new_sketch("chi2", 4, 0.2, 0.2, 0.1, seed=1)
    assert estimate_divergence(sk, sk) == 0.0
    try:
        estimate_divergence(sk, other)
        raise AssertionError("不同种子不可比较")
    except SketchMismatchError:
        ok("自身估计为 0；不同种子 → SketchMismatchError")


# ─────────────────────────────────────────────────────────────────────────────
# 4. 估计精度

def test_accuracy():
    section("4. 估计精度")
    p, q = validate([1.0, 0.0], id="p"), validate([0.0, 1.0], id="q")
    lo, hi = 0.9 * (2 * math.log(2) - 0.05), 1.1 * (2 * math.log(2) + 0.05)
    hits = 0
    for seed in range(100):
        est = estimate_divergence(_sketch_point(p, "js", 0.05, 0.1, 0.05, seed),
                                  _sketch_point(q, "js", 0.05, 0.1, 0.05, seed))
        hits += lo <= est <= hi
    assert hits >= 90
    ok(f"JS 正交分布: {hits}/100 个种子在区间内")

    rng = make_rng(12, "chi2-pairs")
    pts = [validate(v, id=str(k)) for k, v in enumerate(rng.dirichlet(np.ones(4), size=40))]
    good = 0
    total = 0
    for seed in range(10):
        sketches = {pt.id: _sketch_point(pt, "chi2", 0.05, 0.1, 0.05, seed) for pt in pts}
        for a, b in zip(pts[0::2], pts[1::2]):
            exact = divergence("chi2", a, b)
            est = estimate_divergence(sketches[a.id], sketches[b.id])
            good += abs(est - exact) <= 0.15 * exact + 1.1 * 0.05
            total += 1
    assert good / total >= 0.9
    ok(f"χ² Δ_4 上 20 对 × 10 个种子: {good}/{total} 相对误差 ≤ 0.15（含加性下限）")


def test_stream_acceptance():
    section("5. Δ_8 上 20 个点的聚合流")
    eps_embed, eps_l2 = 0.05, 0.1
    rng = make_rng(99, "stream-points")
    pts = [validate(v, id=f"p{k}") for k, v in enumerate(rng.dirichlet(np.ones(8), size=20))]
    good = 0
    total = 0
    for seed in range(50):
        cfg = StreamConfig(DivergenceKind.JS, 8, eps_embed, eps_l2, 0.05, seed=seed)
        sketches = replay_stream(points_to_stream(pts, seed=seed), cfg)
        if seed == 0:
            again = replay_stream(points_to_stream(pts, seed=1234), cfg)
            for pid in sketches:
                assert np.allclose(sketches[pid].counters, again[pid].counters, atol=1e-9, rtol=0)
        for row in pairwise_estimates(sketches):
            a = pts[int(row["id_a"][1:])]
            b = pts[int(row["id_b"][1:])]
            exact = divergence("js", a, b)
            good += abs(row["estimate"] - exact) <= eps_l2 * exact + (1 + eps_l2) * eps_embed
            total += 1
    assert good / total >= 0.9
    ok(f"不同到达顺序计数器一致；{good}/{total} 对（50 个种子）满足 |估计 − D| ≤ ε₂·D + (1+ε₂)·ε_emb")


# ─────────────────────────────────────────────────────────────────────────────
# 6. 回放与文件

def test_replay_and_files():
    section("6. 回放与文件")
    cfg = StreamConfig(DivergenceKind.CHI_SQUARED, 3, 0.2, 0.2, 0.1, seed=3)
    assert replay_stream([], cfg) == {}
    ok("空流 → 空映射")

    pts = [validate([0.2, 0.3, 0.5], id="a"), validate([0.6, 0.0, 0.4], id="b")]
    sequential = replay_stream(points_to_stream(pts, shuffle=False), cfg)
    interleaved = replay_stream(points_to_stream(pts, seed=8), cfg)
    assert abs(estimate_divergence(sequential["a"], sequential["b"])
               - estimate_divergence(interleaved["a"], interleaved["b"])) < 1e-9
    ok("交错到达与顺序到达估计一致")

    partial = replay_stream([AggregateItem("a", 0, 0.2), AggregateItem("a", 2, 0.5)], cfg)
    assert not partial["a"].is_complete
    ok("缺坐标的点标记为不完整")

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        items = points_to_stream(pts, seed=2)
        for name in ("s.jsonl", "s.csv"):
            write_stream(tmp / name, items)
            assert read_stream(tmp / name) == items
        ok("流文件 JSONL / CSV 往返")

        save_sketches(tmp / "sk.json", interleaved)
        cfg_back, back = load_sketches(tmp / "sk.json")
        assert cfg_back == cfg and set(back) == {"a", "b"}
        assert np.array_equal(back["a"].counters, interleaved["a"].counters)
        assert back["b"].seen == {0, 1, 2}
        ok("草图文件往返")


# ─────────────────────────────────────────────────────────────────────────────
# 主入口

def main():
    print("=" * 50)
    print("  聚合流与线性草图测试")
    print("=" * 50)

    tests = [
        ("草图构造", test_construction),
        ("线性与顺序无关", test_linearity),
        ("聚合模型约束", test_item_errors),
        ("估计精度", test_accuracy),
        ("Δ_8 聚合流", test_stream_acceptance),
        ("回放与文件", test_replay_and_files),
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
