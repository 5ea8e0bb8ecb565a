"""
命令行：数据生成、嵌入、流回放、草图估计、降维与误差报表
"""
from .manifest import TOOL_VERSION, RunManifest, file_digest, manifest_path, write_manifest
from .datasets import FAMILIES, generate
from .verify import CHECKS, CheckResult, run_checks
from .commands import (
    COMMANDS, build_embeddings, evaluate_embeddings, evaluate_sketches, summarize, audit_path,
    cmd_gen, cmd_embed, cmd_eval, cmd_reduce, cmd_stream, cmd_estimate, cmd_kernel_table, cmd_verify,
)

__all__ = [
    'TOOL_VERSION', 'RunManifest', 'file_digest', 'manifest_path', 'write_manifest',
    'FAMILIES', 'generate',
    'CHECKS', 'CheckResult', 'run_checks',
    'COMMANDS', 'build_embeddings', 'evaluate_embeddings', 'evaluate_sketches', 'summarize', 'audit_path',
    'cmd_gen', 'cmd_embed', 'cmd_eval', 'cmd_reduce', 'cmd_stream', 'cmd_estimate', 'cmd_kernel_table',
    'cmd_verify',
]
