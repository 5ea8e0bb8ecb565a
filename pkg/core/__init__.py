"""
核心模块：概率单纯形数据模型与闭式散度
"""
from .errors import (
    InfoDivError, ValidationError, DimensionError, ConfigError, UnsupportedKernel,
    ConvergenceError, DuplicateCoordinateError, IncompatibleArtifactError,
    SketchMismatchError, EmbeddingMismatchError,
)
from .models import DivergenceKind, Distribution, FDivergenceSpec, validate, generator, SIMPLEX_TOL
from .divergences import (
    scalar_divergence, divergence, divergence_rows, pairwise_divergences,
    f_divergence, second_derivative_at_one,
)
from .rng import RNG_ID, derive_seed, make_rng, digest

__all__ = [
    'InfoDivError', 'ValidationError', 'DimensionError', 'ConfigError', 'UnsupportedKernel',
    'ConvergenceError', 'DuplicateCoordinateError', 'IncompatibleArtifactError',
    'SketchMismatchError', 'EmbeddingMismatchError',
    'DivergenceKind', 'Distribution', 'FDivergenceSpec', 'validate', 'generator', 'SIMPLEX_TOL',
    'scalar_divergence', 'divergence', 'divergence_rows', 'pairwise_divergences',
    'f_divergence', 'second_derivative_at_one',
    'RNG_ID', 'derive_seed', 'make_rng', 'digest',
]
