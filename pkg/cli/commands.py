"""
子命令实现
每个 cmd_* 接收 argparse.Namespace，返回退出码：0 成功，1 违反误差界；库异常由 main 统一处理
"""
import argparse
import csv
import io
import logging
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from core.divergences import divergence
from core.errors import EmbeddingMismatchError, ValidationError
from core.io import atomic_write_text, read_distributions, write_distributions
from core.models import DivergenceKind, Distribution
from dimred.reducer import reduce
from embed.deterministic import embed_point, hellinger_embed
from embed.grid import build_grid, check_memory
from embed.storage import EmbeddingBundle, grid_from_header, load_embeddings, save_embeddings
from kernel.spectral import kernel_table
from sampling.frequencies import draw_frequencies
from sampling.random_embed import rand_embed_point
from stream.models import StreamConfig
from stream.replay import (
    load_sketches, pairwise_estimates, points_to_stream, read_stream, replay_stream, save_sketches,
    write_stream,
)
from stream.sketch import LinearSketch, estimate_divergence, space_audit
from .datasets import generate
from .manifest import write_manifest
from .verify import run_checks

logger = logging.getLogger(__name__)


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    atomic_write_text(Path(path), buf.getvalue())


def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, (float, np.floating)) else str(value)


def _by_id(points: Sequence[Distribution]) -> Dict[str, Distribution]:
    return {p.id: p for p in points}


def _point(lookup: Dict[str, Distribution], point_id: str) -> Distribution:
    try:
        return lookup[point_id]
    except KeyError:
        raise ValidationError(f"输入数据中没有点 {point_id!r}，产物与数据集不匹配") from None


# ─────────────────────────────────────────────────────────────────────────────
# gen

def cmd_gen(args: argparse.Namespace) -> int:
    points = generate(args.n, args.d, args.family, args.seed)
    write_distributions(Path(args.out), points)
    print(f"已写出 {len(points)} 个点 → {args.out}")

    if args.stream_out:
        # 从写出的文件回读，流里的 id 与之后读取数据集时一致
        items = points_to_stream(read_distributions(Path(args.out)), seed=args.seed, shuffle=True)
        write_stream(Path(args.stream_out), items)
        print(f"已写出聚合流 {len(items)} 项 → {args.stream_out}")

    write_manifest(args, args.out)
    return 0


# ─────────────────────────────────────────────────────────────────────────────
# embed

def build_embeddings(points: Sequence[Distribution], kind: DivergenceKind, mode: str,
                     eps: Optional[float] = None, samples: Optional[int] = None, seed: int = 0) -> EmbeddingBundle:
    """按模式嵌入整个点集"""
    if not points:
        raise ValidationError("输入为空")
    d = points[0].d
    ids = [p.id for p in points]

    if mode == "hellinger":
        vectors = np.stack([hellinger_embed(p) for p in points])
        header = {"mode": "hellinger", "kind": DivergenceKind.HELLINGER.value, "d": d, "layout": "sqrt"}
    elif mode == "det":
        if eps is None:
            raise ValidationError("det 模式需要 --eps")
        grid = build_grid(kind, d, eps)
        vectors = np.stack([embed_point(grid, p).vector for p in points])
        header = {"mode": "det", **grid.header()}
    elif mode == "rand":
        if samples is None:
            raise ValidationError("rand 模式需要 --samples")
        check_memory(2 * samples * d, f"2·s·d = 2·{samples}·{d}")
        sample = draw_frequencies(kind, samples, seed)
        vectors = np.stack([rand_embed_point(sample, p).vector for p in points])
        header = {"mode": "rand", "d": d, **sample.header()}
    else:
        raise ValidationError(f"未知的嵌入模式: {mode}")
    return EmbeddingBundle(header=header, ids=ids, vectors=vectors)


def cmd_embed(args: argparse.Namespace) -> int:
    points = read_distributions(Path(args.input), normalize=args.normalize)
    kind = DivergenceKind.parse("hellinger" if args.mode == "hellinger" else args.kind)
    bundle = build_embeddings(points, kind, args.mode, args.eps, args.samples, args.seed)
    save_embeddings(Path(args.out), bundle)
    print(f"嵌入维度: {bundle.dimension}")
    write_manifest(args, args.out)
    return 0


# ─────────────────────────────────────────────────────────────────────────────
# eval

_EVAL_HEADER = ["id_a", "id_b", "exact", "estimate", "abs_error", "rel_error", "bound", "violation"]


def _error_row(id_a: str, id_b: str, exact: float, estimate: float, bound) -> list:
    abs_err = abs(estimate - exact)
    rel_err = abs_err / exact if exact > 0 else (0.0 if abs_err == 0 else float("inf"))
    violation = bound is not None and abs_err > bound
    return [id_a, id_b, exact, estimate, abs_err, rel_err, "" if bound is None else bound, int(violation)]


def evaluate_embeddings(points: Sequence[Distribution], bundle: EmbeddingBundle, kind: DivergenceKind,
                        rel_bound: Optional[float] = None) -> List[list]:
    """嵌入距离对照 core 闭式散度；det 用加性界 eps，hellinger 精确，rand 可选相对界"""
    mode = bundle.header.get("mode")
    if mode != "hellinger" and bundle.header.get("kind") != kind.value:
        raise ValidationError(f"嵌入是 {bundle.header.get('kind')}，与 --kind {kind.value} 不符")
    if mode == "det":
        grid = grid_from_header(bundle.header)
        if grid.dimension != bundle.dimension:
            raise EmbeddingMismatchError(f"嵌入维度 {bundle.dimension} 与参数头重建的 4·J·d = {grid.dimension} 不符")
    lookup = _by_id(points)
    rows = []
    for i, j in combinations(range(len(bundle.ids)), 2):
        p, q = _point(lookup, bundle.ids[i]), _point(lookup, bundle.ids[j])
        exact = divergence(kind, p, q)
        if mode == "det":
            bound = float(bundle.header["eps"])
        elif mode == "hellinger":
            bound = 1e-9
        else:
            bound = None if rel_bound is None else rel_bound * exact
        rows.append(_error_row(p.id, q.id, exact, bundle.distance(i, j), bound))
    return rows


def evaluate_sketches(points: Sequence[Distribution], cfg: StreamConfig, sketches: Dict[str, LinearSketch],
                      floor: Optional[float] = None) -> List[list]:
    """草图估计对照闭式散度；界为 eps_l2·(D + floor) + floor，floor 默认 eps_embed"""
    floor = cfg.eps_embed if floor is None else floor
    lookup = _by_id(points)
    rows = []
    for (ida, sa), (idb, sb) in combinations(sketches.items(), 2):
        exact = divergence(cfg.kind, _point(lookup, ida), _point(lookup, idb))
        bound = cfg.eps_l2 * (exact + floor) + floor
        rows.append(_error_row(ida, idb, exact, estimate_divergence(sa, sb), bound))
    return rows


def summarize(rows: List[list]) -> dict:
    abs_err = np.array([r[4] for r in rows]) if rows else np.zeros(1)
    rel_err = np.array([r[5] for r in rows]) if rows else np.zeros(1)
    return {
        "pairs": len(rows),
        "max_abs_error": float(abs_err.max()), "mean_abs_error": float(abs_err.mean()),
        "max_rel_error": float(rel_err.max()), "mean_rel_error": float(rel_err.mean()),
        "violations": int(sum(r[7] for r in rows)),
    }


def cmd_eval(args: argparse.Namespace) -> int:
    if bool(args.embeddings) == bool(args.sketches):
        raise ValidationError("eval 需要 --embeddings 或 --sketches 之一")
    points = read_distributions(Path(args.input), normalize=args.normalize)

    if args.embeddings:
        bundle = load_embeddings(Path(args.embeddings))
        kind = DivergenceKind.parse(bundle.header["kind"] if bundle.header.get("mode") == "hellinger" else args.kind)
        rows = evaluate_embeddings(points, bundle, kind, args.rel_bound)
        allowed = 0
    else:
        cfg, sketches = load_sketches(Path(args.sketches))
        rows = evaluate_sketches(points, cfg, sketches, args.floor)
        allowed = int(cfg.delta * len(rows))

    summary = summarize(rows)
    out_rows = [[_fmt(v) for v in row] for row in rows]
    out_rows.append(["summary", summary["pairs"], "", "", _fmt(summary["max_abs_error"]),
                     _fmt(summary["max_rel_error"]), "", summary["violations"]])
    out_rows.append(["mean", "", "", "", _fmt(summary["mean_abs_error"]),
                     _fmt(summary["mean_rel_error"]), "", ""])
    write_csv(Path(args.out), _EVAL_HEADER, out_rows)
    write_manifest(args, args.out)

    print(f"{summary['pairs']} 对: 最大加性误差 {summary['max_abs_error']:.3e}, "
          f"最大相对误差 {summary['max_rel_error']:.3e}, 越界 {summary['violations']} 对")
    if summary["violations"] > allowed:
        logger.error(f"越界 {summary['violations']} 对，超过允许的 {allowed} 对")
        return 1
    return 0


# ─────────────────────────────────────────────────────────────────────────────
# reduce

def audit_path(out: Path) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".audit.csv")


def cmd_reduce(args: argparse.Namespace) -> int:
    points = read_distributions(Path(args.input), normalize=args.normalize)
    result = reduce(args.kind, points, args.eps, seed=args.seed, embedding=args.embedding,
                    samples=args.samples, c0=args.c0, jl_constant=args.jl_constant)
    result.save(Path(args.out))

    rows, summary = result.audit(points)
    write_csv(
        audit_path(Path(args.out)),
        ["i", "j", "id_i", "id_j", "D_original", "D_reduced", "ratio"],
        [[r["i"], r["j"], r["id_i"], r["id_j"], _fmt(r["D_original"]), _fmt(r["D_reduced"]), _fmt(r["ratio"])]
         for r in rows],
    )
    write_manifest(args, args.out)

    print(f"降维: d={result.d} → k+1={result.k + 1}, s_cal={result.divergence_scale:.6e}, "
          f"比值 [{summary['min_ratio']:.4f}, {summary['max_ratio']:.4f}], "
          f"{summary['within_eps']}/{summary['pairs']} 对在 1 ± {args.eps} 内")
    if summary["within_eps"] < summary["pairs"]:
        if result.kind is DivergenceKind.HELLINGER:
            logger.error("存在失真超过 ε 的点对")
            return 1
        logger.warning("存在失真超过 ε 的点对（JS/χ² 的常数为渐近值，仅供参考）")
    return 0


# ─────────────────────────────────────────────────────────────────────────────
# stream / estimate

def cmd_stream(args: argparse.Namespace) -> int:
    items = read_stream(Path(args.stream_in))
    if not items:
        raise ValidationError(f"流文件 {args.stream_in} 为空")
    d = args.d or max(item.coord_index for item in items) + 1
    cfg = StreamConfig(kind=args.kind, d=d, eps_embed=args.eps_embed, eps_l2=args.eps_l2,
                       delta=args.delta, seed=args.seed)
    sketches = replay_stream(items, cfg)
    save_sketches(Path(args.out), sketches)
    write_manifest(args, args.out)

    audit = space_audit(next(iter(sketches.values())))
    print(f"{len(sketches)} 个草图 → {args.out}")
    print(f"每个草图 {audit['counters']} 个计数器 (R={audit['reps']}, m={audit['width']})，"
          f"隐式嵌入维度 {audit['embedding_dimension']}")
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    _, sketches = load_sketches(Path(args.sketches))
    rows = pairwise_estimates(sketches)
    if args.out:
        write_csv(Path(args.out), ["id_a", "id_b", "estimate", "complete"],
                  [[r["id_a"], r["id_b"], _fmt(r["estimate"]), int(r["complete"])] for r in rows])
        write_manifest(args, args.out)
    else:
        for r in rows:
            flag = "" if r["complete"] else "  (不完整)"
            print(f"{r['id_a']}\t{r['id_b']}\t{r['estimate']:.6g}{flag}")
    return 0


# ─────────────────────────────────────────────────────────────────────────────
# kernel-table / verify

def cmd_kernel_table(args: argparse.Namespace) -> int:
    table = kernel_table(args.kind, args.lo, args.hi, args.n)
    rows = [[_fmt(w), _fmt(k), _fmt(c)] for w, k, c in table]
    if args.out:
        write_csv(Path(args.out), ["omega", "kappa", "cdf"], rows)
        write_manifest(args, args.out)
    else:
        print("omega,kappa,cdf")
        for row in rows:
            print(",".join(row))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_checks(args.seed)
    for r in results:
        print(f"  {'✓' if r.passed else '✗'}  {r.name}: {r.detail}")
    passed = sum(r.passed for r in results)
    print(f"\n  {passed}/{len(results)} 项通过")
    if args.out:
        write_csv(Path(args.out), ["check", "passed", "detail"],
                  [[r.name, int(r.passed), r.detail] for r in results])
        write_manifest(args, args.out)
    return 0 if passed == len(results) else 1


COMMANDS = {
    "gen": cmd_gen,
    "embed": cmd_embed,
    "eval": cmd_eval,
    "reduce": cmd_reduce,
    "stream": cmd_stream,
    "estimate": cmd_estimate,
    "kernel-table": cmd_kernel_table,
    "verify": cmd_verify,
}
