"""
计数器式种子派生
每个 (master, N, r) 独立派生，单个抽样可以单独复现
"""
from typing import Sequence

import numpy as np
from scipy.stats import chisquare

from src.utils.exceptions import ValidationError

# 诊断所需的最少种子数，保证每个桶的期望计数不小于 5
MIN_DIAGNOSTIC_SEEDS = 80


def derive_seed(master_seed: int, n_cells: int, realization: int) -> int:
    """
    派生 64 位种子

    取 numpy SeedSequence(entropy=master, spawn_key=(N, r)) 生成的第一个 uint64。
    SeedSequence 的散列与平台无关。

    Args:
        master_seed: 非负主种子
        n_cells: 单元数
        realization: 抽样序号

    Returns:
        [0, 2^64) 内的整数
    """
    if master_seed < 0 or n_cells < 0 or realization < 0:
        raise ValidationError("Seed derivation inputs must be non-negative")
    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=(n_cells, realization))
    return int(sequence.generate_state(1, np.uint64)[0])


def seed_uniformity(seeds: Sequence[int], bins: int = 16) -> float:
    """
    派生种子高位的均匀性检验

    按最高 log2(bins) 位分桶，做卡方拟合优度检验。

    Args:
        seeds: 派生出的 64 位种子
        bins: 桶数，必须是 2 的幂

    Returns:
        p 值

    Raises:
        ValidationError: 桶数不是 2 的幂或种子太少
    """
    if bins < 2 or bins & (bins - 1):
        raise ValidationError(f"bins must be a power of two, got {bins}")
    if len(seeds) < 5 * bins:
        raise ValidationError(f"Need at least {5 * bins} seeds for {bins} bins, got {len(seeds)}")
    shift = 64 - (bins.bit_length() - 1)
    counts = np.bincount([seed >> shift for seed in seeds], minlength=bins)
    return float(chisquare(counts).pvalue)


__all__ = [
    'derive_seed',
    'seed_uniformity',
    'MIN_DIAGNOSTIC_SEEDS'
]
