#!/usr/bin/env python3
"""
信息散度工具箱 - 命令行入口

子命令：gen, embed, reduce, stream, estimate, eval, verify, kernel-table
退出码：0 成功，1 违反误差界，2 参数/输入/文件错误
"""
import argparse
import logging
import sys
from typing import List, Optional

from config import config
from cli.commands import COMMANDS
from cli.manifest import RunManifest
from core.errors import InfoDivError

logger = logging.getLogger("main")


def setup_logging(level: str):
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stdout)
        ],
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infodiv",
        description="JS / Hellinger / χ² 散度：ℓ₂² 嵌入、聚合流草图与保单纯形降维",
    )
    parser.add_argument("--manifest", help="按运行清单重跑上一次的命令")
    parser.add_argument("--log-level", default=config.LOG_LEVEL, help="日志级别（默认 %(default)s）")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=config.DEFAULT_SEED, help="随机种子（默认 %(default)s）")

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("gen", parents=[common], help="生成合成数据集")
    p.add_argument("--n", type=int, required=True, help="点数")
    p.add_argument("--d", type=int, required=True, help="维度")
    p.add_argument("--family", default="uniform-dirichlet",
                   choices=["uniform-dirichlet", "sparse", "corner-heavy"])
    p.add_argument("--out", required=True, help="输出文件（.csv 或 .jsonl）")
    p.add_argument("--stream-out", help="同时写出打乱顺序的聚合流")

    p = sub.add_parser("embed", parents=[common], help="把点集嵌入 ℓ₂²")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", default="js", help="js / chi2（hellinger 模式忽略）")
    p.add_argument("--mode", default="det", choices=["det", "rand", "hellinger"])
    p.add_argument("--eps", type=float, help="det 模式的加性误差 ε")
    p.add_argument("--samples", type=int, help="rand 模式的频率采样数 s")
    p.add_argument("--out", required=True, help="输出 .npz")
    p.add_argument("--normalize", action="store_true", help="逐行归一化输入")

    p = sub.add_parser("eval", parents=[common], help="对照闭式散度输出误差表")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", default="js")
    p.add_argument("--embeddings", help="embed 的输出")
    p.add_argument("--sketches", help="stream 的输出")
    p.add_argument("--rel-bound", type=float, help="rand 嵌入的相对误差界（不给则只报告）")
    p.add_argument("--floor", type=float, help="草图的加性下限（默认 eps_embed）")
    p.add_argument("--out", required=True, help="误差表 CSV")
    p.add_argument("--normalize", action="store_true")

    p = sub.add_parser("reduce", parents=[common], help="降维到 Δ_{k+1}")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", default="hellinger")
    p.add_argument("--eps", type=float, required=True, help="总失真 ε")
    p.add_argument("--embedding", default="det", choices=["det", "rand"], help="JS/χ² 的第 1 步")
    p.add_argument("--samples", type=int, help="rand 第 1 步的采样数")
    p.add_argument("--c0", type=float, help=f"初始球半径系数（默认 {config.BALL_C0}）")
    p.add_argument("--jl-constant", type=float, help=f"JL 常数（默认 {config.JL_CONSTANT}）")
    p.add_argument("--out", required=True, help="输出 .jsonl；失真表写在同名 .audit.csv")
    p.add_argument("--normalize", action="store_true")

    p = sub.add_parser("stream", parents=[common], help="回放聚合流并写出草图")
    p.add_argument("--stream-in", required=True)
    p.add_argument("--kind", default="js")
    p.add_argument("--d", type=int, help="维度（默认取流中最大坐标 + 1）")
    p.add_argument("--eps-embed", type=float, default=0.05)
    p.add_argument("--eps-l2", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--out", required=True, help="草图文件 .json")

    p = sub.add_parser("estimate", parents=[common], help="草图两两估计")
    p.add_argument("--sketches", required=True)
    p.add_argument("--out", help="CSV（不给则打印）")

    p = sub.add_parser("kernel-table", parents=[common], help="导出 (ω, κ, CDF) 表")
    p.add_argument("--kind", default="js")
    p.add_argument("--lo", type=float, default=-5.0)
    p.add_argument("--hi", type=float, default=5.0)
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--out")

    p = sub.add_parser("verify", parents=[common], help="运行不变量自检")
    p.add_argument("--out", help="结果 CSV")

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)

    try:
        if args.manifest:
            manifest = RunManifest.load(args.manifest)
            logger.info(f"按清单重跑: {manifest.command}")
            args = manifest.to_namespace()
        if not args.command:
            parser.print_help()
            return 2
        if args.command not in COMMANDS:
            raise InfoDivError(f"未知命令: {args.command}")

        problems = config.validate()
        if problems:
            for item in problems:
                logger.warning(f"配置问题: {item}")

        return COMMANDS[args.command](args)
    except InfoDivError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 2
    except OSError as e:
        logger.error(f"文件错误: {e.filename or ''} {e.strerror or e}")
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
