"""
降维模块：Δ_d → Δ_{k+1}，保留单纯形结构
"""
from .projection import COLUMN_BLOCK, JLProjection, jl_project, project_rows, target_dimension
from .simplex_map import remap_to_zero_sum_plane, remap_rows, ball_radius, scale_into_ball
from .calibration import local_constant, sample_ball_pairs, ratio_errors, calibrate_radius
from .reducer import (
    EMBEDDING_MODES, ReducedPointSet, reduce, load_reduced, embedding_budget, embed_for_reduction,
)

__all__ = [
    'COLUMN_BLOCK', 'JLProjection', 'jl_project', 'project_rows', 'target_dimension',
    'remap_to_zero_sum_plane', 'remap_rows', 'ball_radius', 'scale_into_ball',
    'local_constant', 'sample_ball_pairs', 'ratio_errors', 'calibrate_radius',
    'EMBEDDING_MODES', 'ReducedPointSet', 'reduce', 'load_reduced', 'embedding_budget',
    'embed_for_reduction',
]
