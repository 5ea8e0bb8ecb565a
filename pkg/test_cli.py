#!/usr/bin/env python3
"""
命令行测试：数据生成、嵌入、误差表、流回放与估计、降维、清单重跑、退出码

运行：
    python3 test_cli.py
"""
import csv
import json
import logging
import sys
import tempfile
from pathlib import Path

import numpy as np

from cli import RunManifest, generate, manifest_path
from core.io import read_distributions
from embed import load_embeddings, save_embeddings
from main import run
from stream import read_stream, write_stream

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


def _cli(*argv) -> int:
    return run(["--log-level", "WARNING", *[str(a) for a in argv]])


def _read_csv(path: Path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


# ─────────────────────────────────────────────────────────────────────────────
# 1. gen

def test_gen():
    section("1. gen")
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        assert _cli("gen", "--n", 1, "--d", 2, "--seed", 5, "--out", tmp / "one.csv") == 0
        pts = read_distributions(tmp / "one.csv")
        assert len(pts) == 1 and pts[0].d == 2 and abs(pts[0].values.sum() - 1) <= 1e-9
        ok("n=1, d=2: 一行两列，和为 1")

        _cli("gen", "--n", 20, "--d", 6, "--seed", 9, "--out", tmp / "a.csv")
        _cli("gen", "--n", 20, "--d", 6, "--seed", 9, "--out", tmp / "b.csv")
        assert (tmp / "a.csv").read_bytes() == (tmp / "b.csv").read_bytes()
        ok("同种子两次输出逐字节相同")

    sparse = generate(100, 8, "sparse", seed=3)
    for p in sparse:
        assert np.count_nonzero(p.values) >= 1 and abs(p.values.sum() - 1) <= 1e-9
    assert np.mean([np.count_nonzero(p.values) for p in sparse]) < 3.5
    ok("sparse: 每行至少一个非零且和为 1，平均非零数约 20%")

    corner = generate(50, 8, "corner-heavy", seed=3)
    assert all(p.values.max() >= 0.95 for p in corner)
    ok("corner-heavy: 最大坐标 ≥ 0.95")


# ─────────────────────────────────────────────────────────────────────────────
# 2. embed / eval

def test_embed_and_eval():
    section("2. embed / eval")
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        data = tmp / "pts.jsonl"
        _cli("gen", "--n", 7, "--d", 2, "--seed", 1, "--out", data)

        assert _cli("embed", "--input", data, "--kind", "js", "--mode", "det", "--eps", 0.1,
                    "--out", tmp / "det.npz") == 0
        assert load_embeddings(tmp / "det.npz").dimension == 4 * 3249 * 2
        ok("det JS d=2 ε=0.1 → 维度 4·3249·2")

        assert _cli("embed", "--input", data, "--mode", "hellinger", "--out", tmp / "he.npz") == 0
        assert load_embeddings(tmp / "he.npz").dimension == 2
        assert _cli("eval", "--input", data, "--embeddings", tmp / "he.npz", "--out", tmp / "he.csv") == 0
        ok("hellinger → 维度 d，误差表无越界")

        big = tmp / "big.csv"
        _cli("gen", "--n", 50, "--d", 4, "--seed", 2, "--out", big)
        assert _cli("embed", "--input", big, "--kind", "chi2", "--mode", "rand", "--samples", 1000,
                    "--out", tmp / "rand.npz") == 0
        assert load_embeddings(tmp / "rand.npz").dimension == 2 * 1000 * 4
        ok("rand s=1000, n=50 → 维度 2·1000·d")

        assert _cli("embed", "--input", data, "--kind", "js", "--mode", "det", "--eps", 0.05,
                    "--out", tmp / "det05.npz") == 0
        report = tmp / "report.csv"
        assert _cli("eval", "--input", data, "--kind", "js", "--embeddings", tmp / "det05.npz",
                    "--out", report) == 0
        rows = _read_csv(report)
        pairs = [r for r in rows if r["id_a"] not in ("summary", "mean")]
        assert len(pairs) == 21
        assert max(float(r["abs_error"]) for r in pairs) <= 0.05
        summary = next(r for r in rows if r["id_a"] == "summary")
        assert int(summary["violation"]) == 0
        ok(f"det JS ε=0.05: 21 对最大加性误差 {summary['abs_error']}")

        same = tmp / "same.csv"
        same.write_text("0.3,0.7\n0.3,0.7\n", encoding="utf-8")
        _cli("embed", "--input", same, "--kind", "js", "--mode", "det", "--eps", 0.1, "--out", tmp / "same.npz")
        assert _cli("eval", "--input", same, "--kind", "js", "--embeddings", tmp / "same.npz",
                    "--out", tmp / "same_report.csv") == 0
        row = _read_csv(tmp / "same_report.csv")[0]
        assert float(row["exact"]) == 0.0 and float(row["abs_error"]) == 0.0
        ok("相同的点：误差全为 0")

        assert _cli("eval", "--input", data, "--kind", "chi2", "--embeddings", tmp / "det.npz",
                    "--out", tmp / "bad.csv") == 2
        ok("散度种类与嵌入不符 → 退出码 2")

        tampered = load_embeddings(tmp / "det05.npz")
        tampered.header["J"] = int(tampered.header["J"]) + 1
        save_embeddings(tmp / "tampered.npz", tampered)
        assert _cli("eval", "--input", data, "--kind", "js", "--embeddings", tmp / "tampered.npz",
                    "--out", tmp / "tampered.csv") == 2
        assert not (tmp / "tampered.csv").exists()

        truncated = load_embeddings(tmp / "det05.npz")
        truncated.vectors = truncated.vectors[:, :-4]
        save_embeddings(tmp / "truncated.npz", truncated)
        assert _cli("eval", "--input", data, "--kind", "js", "--embeddings", tmp / "truncated.npz",
                    "--out", tmp / "truncated.csv") == 2
        ok("参数头与重建网格或向量维度不符 → 退出码 2")


# ─────────────────────────────────────────────────────────────────────────────
# 3. stream / estimate / eval --sketches

def test_stream_pipeline():
    section("3. stream / estimate")
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        data, stream = tmp / "pts.csv", tmp / "items.jsonl"
        assert _cli("gen", "--n", 10, "--d", 4, "--seed", 4, "--out", data, "--stream-out", stream) == 0
        items = read_stream(stream)
        assert len(items) == 40

        common = ["--kind", "js", "--eps-embed", 0.1, "--eps-l2", 0.1, "--delta", 0.05, "--seed", 7]
        assert _cli("stream", "--stream-in", stream, *common, "--out", tmp / "sk.json") == 0

        order = np.random.default_rng(0).permutation(len(items))
        write_stream(tmp / "permuted.jsonl", [items[k] for k in order])
        assert _cli("stream", "--stream-in", tmp / "permuted.jsonl", *common, "--out", tmp / "sk2.json") == 0

        _cli("estimate", "--sketches", tmp / "sk.json", "--out", tmp / "est.csv")
        _cli("estimate", "--sketches", tmp / "sk2.json", "--out", tmp / "est2.csv")
        a, b = _read_csv(tmp / "est.csv"), _read_csv(tmp / "est2.csv")
        assert len(a) == 45
        lookup = {(r["id_a"], r["id_b"]): float(r["estimate"]) for r in b}
        lookup.update({(r["id_b"], r["id_a"]): float(r["estimate"]) for r in b})
        for r in a:
            assert abs(float(r["estimate"]) - lookup[(r["id_a"], r["id_b"])]) <= 1e-9
        ok("打乱到达顺序后估计一致（1e-9 内）")

        assert _cli("eval", "--input", data, "--sketches", tmp / "sk.json", "--out", tmp / "sk_report.csv") == 0
        summary = next(r for r in _read_csv(tmp / "sk_report.csv") if r["id_a"] == "summary")
        ok(f"草图误差表: 最大相对误差 {float(summary['rel_error']):.3f}，越界 {summary['violation']} 对")


# ─────────────────────────────────────────────────────────────────────────────
# 4. reduce / kernel-table / verify

def test_reduce_command():
    section("4. reduce")
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        data, out = tmp / "pts.csv", tmp / "reduced.jsonl"
        _cli("gen", "--n", 16, "--d", 64, "--seed", 0, "--out", data)
        assert _cli("reduce", "--input", data, "--kind", "hellinger", "--eps", 0.25, "--out", out) == 0

        lines = out.read_text(encoding="utf-8").splitlines()
        header = json.loads(lines[0])
        assert header["k"] == 11357 and len(lines) == 17
        for line in lines[1:]:
            p = np.array(json.loads(line)["p_reduced"])
            assert p.size == header["k"] + 1 and abs(p.sum() - 1) <= 1e-9
        audit = _read_csv(tmp / "reduced.audit.csv")
        assert len(audit) == 120
        assert all(0.75 <= float(r["ratio"]) <= 1.25 for r in audit)
        ok("Hellinger n=16 Δ_64 ε=0.25: 每行和为 1，失真表 120 对均在 [0.75, 1.25]")


def test_kernel_table_and_verify():
    section("5. kernel-table / verify")
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        assert _cli("kernel-table", "--kind", "chi2", "--n", 101, "--out", tmp / "k.csv") == 0
        rows = _read_csv(tmp / "k.csv")
        assert len(rows) == 101 and set(rows[0]) == {"omega", "kappa", "cdf"}
        assert abs(float(rows[50]["cdf"]) - 0.5) <= 1e-12
        ok("χ² 核表 101 行，ω=0 处 CDF = 0.5")

        assert _cli("verify", "--out", tmp / "verify.csv") == 0
        assert all(r["passed"] == "1" for r in _read_csv(tmp / "verify.csv"))
        ok("verify 全部通过")


# ─────────────────────────────────────────────────────────────────────────────
# 6. 清单与退出码

def test_manifest_and_exit_codes():
    section("6. 清单与退出码")
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        out = tmp / "pts.jsonl"
        assert _cli("gen", "--n", 5, "--d", 3, "--family", "sparse", "--seed", 11, "--out", out) == 0
        mpath = manifest_path(out)
        manifest = RunManifest.load(mpath)
        assert manifest.command == "gen" and manifest.seed == 11
        assert manifest.params["family"] == "sparse"
        original = out.read_bytes()
        out.unlink()
        assert _cli("--manifest", mpath) == 0
        assert out.read_bytes() == original
        ok("按清单重跑得到逐字节相同的输出")

        _cli("embed", "--input", out, "--mode", "hellinger", "--out", tmp / "he.npz")
        m = RunManifest.load(manifest_path(tmp / "he.npz"))
        assert set(m.input_digests) == {"input"}
        ok("清单记录输入文件摘要")

        assert _cli("embed", "--input", out, "--kind", "js", "--mode", "det", "--out", tmp / "x.npz") == 2
        assert _cli("embed", "--input", tmp / "missing.csv", "--mode", "hellinger", "--out", tmp / "y.npz") == 2
        assert _cli("reduce", "--input", out, "--kind", "hellinger", "--eps", 1.5, "--out", tmp / "r.jsonl") == 2
        assert _cli("--manifest", tmp / "nope.json") == 2
        ok("缺参数、缺文件、越界参数、坏清单 → 退出码 2")


# ─────────────────────────────────────────────────────────────────────────────

def main():
    print("=" * 50)
    print("  命令行测试")
    print("=" * 50)

    tests = [
        ("gen", test_gen),
        ("embed / eval", test_embed_and_eval),
        ("stream / estimate", test_stream_pipeline),
        ("reduce", test_reduce_command),
        ("kernel-table / verify", test_kernel_table_and_verify),
        ("清单与退出码", test_manifest_and_exit_codes),
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
