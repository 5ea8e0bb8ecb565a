"""
聚合流模块：逐坐标到达的分布，线性草图估计两两散度
"""
from .models import AggregateItem, StreamConfig
from .hashing import HASH_ID, PolynomialHash, SketchHasher, get_hasher
from .sketch import (
    LinearSketch, new_sketch, sketch_from_config, process_item, sketch_vector,
    estimate_divergence, space_audit,
)
from .replay import (
    replay_stream, points_to_stream, read_stream, write_stream, save_sketches, load_sketches,
    pairwise_estimates,
)

__all__ = [
    'AggregateItem', 'StreamConfig',
    'HASH_ID', 'PolynomialHash', 'SketchHasher', 'get_hasher',
    'LinearSketch', 'new_sketch', 'sketch_from_config', 'process_item', 'sketch_vector',
    'estimate_divergence', 'space_audit',
    'replay_stream', 'points_to_stream', 'read_stream', 'write_stream', 'save_sketches',
    'load_sketches', 'pairwise_estimates',
]
