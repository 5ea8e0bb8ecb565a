"""
谱核模块：h(x,y,ω)、核密度 κ、CDF / 分位数，以及自适应 Simpson 积分
"""
from .quadrature import QuadratureConfig, adaptive_simpson, integrate
from .spectral import (
    h, kappa, KernelSpec, get_kernel, kernel_cdf, kernel_quantile, interval_mass,
    spectral_divergence, moment_integral, tail_mass, truncation_radius,
    quantized_integral, kernel_table,
)

__all__ = [
    'QuadratureConfig', 'adaptive_simpson', 'integrate',
    'h', 'kappa', 'KernelSpec', 'get_kernel', 'kernel_cdf', 'kernel_quantile', 'interval_mass',
    'spectral_divergence', 'moment_integral', 'tail_mass', 'truncation_radius',
    'quantized_integral', 'kernel_table',
]
