"""
随机数约定
所有随机性都来自一个种子，子阶段通过带标签的哈希派生子种子
"""
import hashlib

import numpy as np

# 与种子一起持久化的生成器算法标识
RNG_ID = "numpy-philox-4x64"


def derive_seed(seed: int, label: str) -> int:
    """BLAKE2b(f"{seed}:{label}") 的前 8 字节（小端）作为子种子"""
    digest = hashlib.blake2b(f"{int(seed)}:{label}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(seed: int, label: str = "") -> np.random.Generator:
    """基于 Philox 的计数器型生成器；label 非空时先派生子种子"""
    key = derive_seed(seed, label) if label else int(seed) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.Philox(key))


def digest(*parts) -> str:
    """参数摘要，用于绑定网格、采样与草图"""
    text = "|".join(str(p) for p in parts)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
