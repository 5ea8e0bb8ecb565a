"""
确定性嵌入模块：JS / χ² 到 ℓ₂² 的加性误差嵌入，Hellinger 的精确映射
"""
from .grid import GridSpec, LAYOUT, build_grid, grid_half_width, dimension_table, check_memory
from .deterministic import (
    DetEmbedding, embed_coordinate, embed_coordinates, embed_point, embedded_distance,
    hellinger_embed, l22_distance,
)
from .storage import EmbeddingBundle, save_embeddings, load_embeddings, grid_from_header

__all__ = [
    'GridSpec', 'LAYOUT', 'build_grid', 'grid_half_width', 'dimension_table', 'check_memory',
    'DetEmbedding', 'embed_coordinate', 'embed_coordinates', 'embed_point', 'embedded_distance',
    'hellinger_embed', 'l22_distance',
    'EmbeddingBundle', 'save_embeddings', 'load_embeddings', 'grid_from_header',
]
