"""
随机嵌入模块：按 κ 抽频率，得到乘性误差的 ℓ₂² 嵌入
"""
from .frequencies import FrequencySample, VARIANCE_CONSTANT, draw_frequencies, required_samples
from .random_embed import RandEmbedding, rand_embed_coordinates, rand_embed_point, moment_check

__all__ = [
    'FrequencySample', 'VARIANCE_CONSTANT', 'draw_frequencies', 'required_samples',
    'RandEmbedding', 'rand_embed_coordinates', 'rand_embed_point', 'moment_check',
]
