"""
运行清单：记录命令、全部参数、种子、输入文件摘要与工具版本
每个输出文件旁边写一份 <输出>.manifest.json，--manifest 可据此重跑
"""
import argparse
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

from core.errors import ValidationError
from core.io import atomic_write_text
from core.rng import RNG_ID

logger = logging.getLogger(__name__)

TOOL_VERSION = "0.1.0"

# 参数中代表输入文件的键
INPUT_KEYS = ("input", "stream_in", "embeddings", "sketches")
# 不属于命令本身的参数
_RUNTIME_KEYS = ("func", "manifest", "log_level")


def file_digest(path: Path) -> str:
    """文件内容的 sha256 前 16 位"""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


def manifest_path(out: Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


@dataclass
class RunManifest:
    """一次运行的完整记录"""
    command: str
    params: Dict[str, object]
    seed: int
    input_digests: Dict[str, str] = field(default_factory=dict)
    tool_version: str = TOOL_VERSION
    rng_id: str = RNG_ID

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunManifest":
        params = {k: v for k, v in vars(args).items() if k not in _RUNTIME_KEYS}
        digests = {}
        for key in INPUT_KEYS:
            value = params.get(key)
            if value:
                digests[key] = file_digest(Path(value))
        return cls(command=args.command, params=params, seed=int(params.get("seed", 0)),
                   input_digests=digests)

    def to_dict(self) -> dict:
        return {
            "command": self.command, "params": self.params, "seed": self.seed,
            "input_digests": self.input_digests, "tool_version": self.tool_version, "rng_id": self.rng_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        try:
            return cls(
                command=data["command"], params=dict(data["params"]), seed=int(data["seed"]),
                input_digests=dict(data.get("input_digests", {})),
                tool_version=data.get("tool_version", TOOL_VERSION), rng_id=data.get("rng_id", RNG_ID),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"运行清单格式错误: {e}") from e

    def save(self, path: Path):
        atomic_write_text(Path(path), json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n")
        logger.debug(f"运行清单已写出: {path}")

    @classmethod
    def load(cls, path: Path) -> "RunManifest":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ValidationError(f"无法读取运行清单 {path}: {e}") from e
        except ValueError as e:
            raise ValidationError(f"运行清单 {path} 不是合法 JSON: {e}") from e
        return cls.from_dict(data)

    def to_namespace(self) -> argparse.Namespace:
        """还原命令参数；输入文件内容变了只记警告"""
        if self.tool_version != TOOL_VERSION:
            logger.warning(f"清单来自版本 {self.tool_version}，当前 {TOOL_VERSION}")
        for key, expected in self.input_digests.items():
            value = self.params.get(key)
            if value and Path(value).exists() and file_digest(Path(value)) != expected:
                logger.warning(f"输入文件 {value} 的内容与清单记录不一致，结果可能不同")
        return argparse.Namespace(command=self.command, **{k: v for k, v in self.params.items() if k != "command"})


def write_manifest(args: argparse.Namespace, out: Optional[str]):
    """在输出文件旁写清单（没有输出文件时不写）"""
    if not out:
        return
    RunManifest.from_args(args).save(manifest_path(Path(out)))
