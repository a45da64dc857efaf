"""
简化模型 H₁ = (JV)^k

    V = N^{xθ(x)} ( i Σ_{i>j} y_ij λ_ij γ_i γ_j + wN )

y_ij 以概率 p₁ = min(1, N^{-(x+1)}) 取 1，λ_ij 标准正态，w = p₁，J = N^{-(k-1)/k}。
"""
from itertools import combinations
from typing import Tuple

import numpy as np

from src.algebra.majorana import majorana_product
from src.algebra.pauli import OperatorSum, combine
from src.models.spec import DisorderRealization, ModelFamily, ModelSpec
from src.utils.exceptions import ConfigurationError
from src.utils.logger import model_logger


def pair_probability(n_cells: int, x: float) -> float:
    """p₁ = min(1, N^{-(x+1)})"""
    return min(1.0, float(n_cells) ** (-(x + 1.0)))


def coupling_scale(n_cells: int, k: int) -> float:
    """J = N^{-(k-1)/k}"""
    return float(n_cells) ** (-(k - 1) / k)


def build_simplified_v(spec: ModelSpec, seed: int) -> Tuple[OperatorSum, DisorderRealization]:
    """只构造二次型 V（不含 J 与幂次）"""
    if spec.family != ModelFamily.SIMPLIFIED_VK:
        raise ConfigurationError(f"build_simplified cannot build family {spec.family.value}")
    if spec.n_cells is None:
        raise ConfigurationError("ModelSpec.n_cells must be set before building")

    n_cells = spec.n_cells
    x = spec.x
    theta = 1.0 if x >= 0 else 0.0
    p1 = pair_probability(n_cells, x)
    w = p1

    pairs = list(combinations(range(1, 2 * n_cells + 1), 2))
    rng = np.random.default_rng(seed)
    keep = rng.random(len(pairs)) < p1
    draws = rng.standard_normal(len(pairs))
    couplings = {pair: float(value) for pair, kept, value in zip(pairs, keep, draws) if kept}

    terms = [
        majorana_product((b, a), n_cells).scaled(1j * value)
        for (a, b), value in couplings.items()
    ]
    quadratic = OperatorSum.from_terms(terms, n_cells)
    prefactor = float(n_cells) ** (x * theta)
    v = combine([
        (prefactor, quadratic),
        (prefactor * w * n_cells, OperatorSum.identity(n_cells)),
    ])
    realization = DisorderRealization(
        family=spec.family,
        n_cells=n_cells,
        seed=seed,
        couplings=couplings,
        mask=frozenset(couplings),
        w=w,
        sparse=True,
    )
    return v, realization


def build_simplified(spec: ModelSpec, seed: int) -> Tuple[OperatorSum, DisorderRealization]:
    """
    构造 H₁ = (JV)^k，k = q/2

    幂次在 Pauli 串代数中逐次精确相乘并剪枝。

    Args:
        spec: family 为 SimplifiedVk
        seed: 64 位种子

    Returns:
        (哈密顿量, 抽样记录)
    """
    v, realization = build_simplified_v(spec, seed)
    k = spec.k
    jv = v * coupling_scale(spec.n_cells, k)
    hamiltonian = jv.power(k)
    model_logger.debug(
        f"Built SimplifiedVk N={spec.n_cells} k={k} seed={seed}: "
        f"{len(realization.mask)} pairs, {len(hamiltonian)} terms"
    )
    return hamiltonian, realization


__all__ = [
    'build_simplified',
    'build_simplified_v',
    'pair_probability',
    'coupling_scale'
]
