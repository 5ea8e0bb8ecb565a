"""
分布文件读写
每行一个分布：CSV（d 个逗号分隔实数）或 JSON lines（{"id": ..., "p": [...]}）
"""
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import BinaryIO, Callable, Iterable, List, Optional

from .errors import ValidationError
from .models import Distribution, validate

logger = logging.getLogger(__name__)


def atomic_write(path: Path, writer: Callable[[BinaryIO], None]):
    """先写临时文件再 rename，避免留下半个文件；writer 接收二进制文件对象"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
    try:
        with os.fdopen(fd, "wb") as f:
            writer(f)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: Path, text: str):
    """原子写出 UTF-8 文本"""
    atomic_write(path, lambda f: f.write(text.encode("utf-8")))


def detect_format(path: Path, first_line: str = "") -> str:
    """根据扩展名或首行内容判断 csv / jsonl"""
    suffix = Path(path).suffix.lower()
    if suffix in (".jsonl", ".json", ".ndjson"):
        return "jsonl"
    if suffix == ".csv":
        return "csv"
    return "jsonl" if first_line.lstrip().startswith("{") else "csv"


def parse_distribution_line(line: str, fmt: str, lineno: int, normalize: bool) -> Distribution:
    """解析一行，错误信息带行号"""
    try:
        if fmt == "jsonl":
            record = json.loads(line)
            return validate(record["p"], normalize=normalize, id=str(record.get("id", lineno - 1)))
        values = [float(v) for v in line.split(",") if v.strip()]
        return validate(values, normalize=normalize, id=str(lineno - 1))
    except ValidationError as e:
        raise ValidationError(f"第 {lineno} 行: {e}") from e
    except (ValueError, KeyError, TypeError) as e:
        raise ValidationError(f"第 {lineno} 行无法解析: {e}") from e


def read_distributions(path: Path, normalize: bool = False) -> List[Distribution]:
    """
    读取分布文件

    Args:
        path: 文件路径
        normalize: 是否逐行归一化

    Returns:
        Distribution 列表（CSV 行的 id 为行号，从 0 开始）
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ValidationError(f"无法读取分布文件 {path}: {e}") from e

    content = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not content:
        return []
    fmt = detect_format(path, content[0][1])

    points = [parse_distribution_line(ln, fmt, lineno, normalize) for lineno, ln in content]
    dims = {p.d for p in points}
    if len(dims) > 1:
        raise ValidationError(f"{path} 中的分布维度不一致: {sorted(dims)}")
    logger.info(f"已读取 {len(points)} 个分布 (d={points[0].d}) 自 {path}")
    return points


def format_distributions(points: Iterable[Distribution], fmt: str = "csv") -> str:
    """序列化为文本；浮点数用 repr 保证可精确回读"""
    rows = []
    for p in points:
        if fmt == "jsonl":
            rows.append(json.dumps({"id": p.id, "p": p.to_list()}))
        else:
            rows.append(",".join(repr(float(v)) for v in p.values))
    return "\n".join(rows) + ("\n" if rows else "")


def write_distributions(path: Path, points: Iterable[Distribution], fmt: Optional[str] = None):
    """原子写出分布文件"""
    path = Path(path)
    fmt = fmt or detect_format(path)
    atomic_write_text(path, format_distributions(points, fmt))
