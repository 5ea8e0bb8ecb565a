"""
4-wise 独立哈希
GF(p) 上随机三次多项式，p = 2^31 − 1；uint64 下 Horner 求值，每步取模不溢出
"""
import logging
from collections import OrderedDict
from functools import lru_cache
from typing import Tuple

import numpy as np

from core.rng import make_rng

logger = logging.getLogger(__name__)

MERSENNE_PRIME = (1 << 31) - 1
HASH_ID = "poly3-mod-2^31-1"

# 每个哈希器缓存坐标块 (桶, 符号) 的字节上限
_CACHE_BYTES = 256 * 1024 * 1024


class PolynomialHash:
    """
    R 个独立的三次多项式 h_r(x) = (c0 + c1·x + c2·x² + c3·x³) mod p

    系数在 [0, p) 上均匀，因此对 x ∈ [0, p) 是 4-wise 独立的。
    """

    def __init__(self, coefficients: np.ndarray):
        coefficients = np.asarray(coefficients, dtype=np.uint64)
        if coefficients.ndim != 2 or coefficients.shape[1] != 4:
            raise ValueError(f"系数形状应为 (R, 4)，当前 {coefficients.shape}")
        self.coefficients = coefficients

    @property
    def reps(self) -> int:
        return int(self.coefficients.shape[0])

    def __call__(self, keys: np.ndarray) -> np.ndarray:
        """keys 形状 (n,)，返回 (R, n)，值在 [0, p)"""
        p = np.uint64(MERSENNE_PRIME)
        x = (np.asarray(keys, dtype=np.uint64) % p)[None, :]
        c = self.coefficients
        acc = np.broadcast_to(c[:, 3:4], (self.reps, x.shape[1])).copy()
        for k in (2, 1, 0):
            acc = (acc * x + c[:, k:k + 1]) % p
        return acc


class SketchHasher:
    """
    草图用的一对哈希：桶 b_r(g) ∈ [0, m) 与符号 s_r(g) ∈ {±1}

    按坐标块缓存，流里同一坐标的所有点共享一次计算。
    """

    def __init__(self, seed: int, reps: int, width: int):
        self.seed = int(seed)
        self.reps = int(reps)
        self.width = int(width)
        rng = make_rng(seed, "sketch-hash")
        coeffs = rng.integers(0, MERSENNE_PRIME, size=(2, self.reps, 4), dtype=np.int64)
        self.bucket_hash = PolynomialHash(coeffs[0])
        self.sign_hash = PolynomialHash(coeffs[1])
        self._blocks: "OrderedDict[Tuple[int, int], Tuple[np.ndarray, np.ndarray]]" = OrderedDict()
        self._cached_bytes = 0

    def hash_indices(self, indices: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Returns:
            flat: (R, n) 的 int32，r·m + 桶号，可直接 bincount 到 R·m 个计数器
            signs: (R, n) 的 int8，±1
        """
        indices = np.asarray(indices, dtype=np.int64)
        buckets = (self.bucket_hash(indices) % np.uint64(self.width)).astype(np.int64)
        offsets = (np.arange(self.reps, dtype=np.int64) * self.width)[:, None]
        signs = (1 - 2 * (self.sign_hash(indices) & np.uint64(1)).astype(np.int8)).astype(np.int8)
        return (buckets + offsets).astype(np.int32), signs

    def block(self, coord_index: int, block_len: int) -> Tuple[np.ndarray, np.ndarray]:
        """坐标块 [i·L, (i+1)·L) 的哈希（缓存）"""
        key = (int(coord_index), int(block_len))
        cached = self._blocks.get(key)
        if cached is not None:
            self._blocks.move_to_end(key)
            return cached
        start = key[0] * key[1]
        cached = self.hash_indices(np.arange(start, start + key[1], dtype=np.int64))
        self._blocks[key] = cached
        self._cached_bytes += cached[0].nbytes + cached[1].nbytes
        while self._cached_bytes > _CACHE_BYTES and len(self._blocks) > 1:
            _, (flat, signs) = self._blocks.popitem(last=False)
            self._cached_bytes -= flat.nbytes + signs.nbytes
        return cached


@lru_cache(maxsize=2)
def get_hasher(seed: int, reps: int, width: int) -> SketchHasher:
    """同一组参数的草图共享一个哈希器"""
    logger.debug(f"新建草图哈希器: seed={seed} R={reps} m={width}")
    return SketchHasher(seed, reps, width)
