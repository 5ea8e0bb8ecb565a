"""
聚合流回放与文件读写
流文件：JSON lines {"id", "i", "v"} 或 CSV id,i,v；草图文件：JSON {header, sketches}
"""
import csv
import io
import json
import logging
from itertools import combinations
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

from core.errors import SketchMismatchError, ValidationError
from core.io import atomic_write_text, detect_format
from core.models import Distribution
from core.rng import make_rng
from .models import AggregateItem, StreamConfig
from .sketch import LinearSketch, estimate_divergence, process_item, sketch_from_config, sketch_from_dict

logger = logging.getLogger(__name__)


def replay_stream(items: Iterable[AggregateItem], config: StreamConfig) -> Dict[str, LinearSketch]:
    """
    按到达顺序处理整条流，每个点一个草图

    内存只与 点数·R·m 和共享网格有关。收到的坐标不足 d 个的点会记警告，
    其草图的 is_complete 为 False。
    """
    sketches: Dict[str, LinearSketch] = {}
    count = 0
    for item in items:
        sketch = sketches.get(item.point_id)
        if sketch is None:
            sketch = sketch_from_config(config, item.point_id)
            sketches[item.point_id] = sketch
        process_item(sketch, item)
        count += 1

    partial = [pid for pid, s in sketches.items() if not s.is_complete]
    if partial:
        logger.warning(f"{len(partial)} 个点的坐标不完整: {partial[:5]}")
    logger.info(f"流回放完成: {count} 项, {len(sketches)} 个点")
    return sketches


def points_to_stream(points: Sequence[Distribution], seed: int = 0, shuffle: bool = True) -> List[AggregateItem]:
    """把点集拆成聚合项；shuffle 时用种子打乱到达顺序"""
    items = [
        AggregateItem(p.id or str(n), i, float(v))
        for n, p in enumerate(points) for i, v in enumerate(p.values)
    ]
    if shuffle:
        order = make_rng(seed, "stream-order").permutation(len(items))
        items = [items[k] for k in order]
    return items


def read_stream(path: Path) -> List[AggregateItem]:
    """读取流文件；CSV 可带 id,i,v 表头"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"无法读取流文件 {path}: {e}") from e

    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return []
    fmt = detect_format(path, lines[0])
    items = []
    try:
        if fmt == "jsonl":
            for ln in lines:
                record = json.loads(ln)
                items.append(AggregateItem(str(record["id"]), int(record["i"]), float(record["v"])))
        else:
            rows = list(csv.reader(lines))
            if rows and [c.strip() for c in rows[0]] == ["id", "i", "v"]:
                rows = rows[1:]
            for row in rows:
                items.append(AggregateItem(row[0].strip(), int(row[1]), float(row[2])))
    except (ValueError, KeyError, IndexError) as e:
        raise ValidationError(f"流文件 {path} 第 {len(items) + 1} 项无法解析: {e}") from e
    return items


def write_stream(path: Path, items: Iterable[AggregateItem]):
    """原子写出流文件，格式由扩展名决定"""
    path = Path(path)
    if detect_format(path) == "jsonl":
        text = "".join(json.dumps(item.to_dict()) + "\n" for item in items)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", "i", "v"])
        for item in items:
            writer.writerow([item.point_id, item.coord_index, repr(item.value)])
        text = buf.getvalue()
    atomic_write_text(path, text)


def save_sketches(path: Path, sketches: Dict[str, LinearSketch]):
    """所有草图共享一个参数头"""
    if not sketches:
        raise ValidationError("没有可保存的草图")
    first = next(iter(sketches.values()))
    for sketch in sketches.values():
        first.check_compatible(sketch)
    payload = {
        "header": first.header(),
        "sketches": [s.to_dict() for s in sketches.values()],
    }
    atomic_write_text(Path(path), json.dumps(payload))
    logger.info(f"草图已保存: {path} ({len(sketches)} 个)")


def load_sketches(path: Path) -> Tuple[StreamConfig, Dict[str, LinearSketch]]:
    """读取草图文件并核对网格摘要"""
    path = Path(path)
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        header = payload["header"]
        cfg = StreamConfig.from_dict(header)
    except (OSError, ValueError, KeyError) as e:
        raise ValidationError(f"无法读取草图文件 {path}: {e}") from e

    sketches = {}
    for data in payload["sketches"]:
        sketch = sketch_from_dict(cfg, data)
        if sketch.header() != header:
            raise SketchMismatchError(f"草图文件 {path} 的参数头与当前重建结果不一致")
        sketches[sketch.point_id] = sketch
    return cfg, sketches


def pairwise_estimates(sketches: Dict[str, LinearSketch]) -> List[dict]:
    """所有点对的估计，附带完整性标记"""
    rows = []
    for (ida, sa), (idb, sb) in combinations(sketches.items(), 2):
        rows.append({
            "id_a": ida, "id_b": idb,
            "estimate": estimate_divergence(sa, sb),
            "complete": sa.is_complete and sb.is_complete,
        })
    return rows
