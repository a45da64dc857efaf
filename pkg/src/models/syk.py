"""
稀疏 SYK 哈密顿量

    H_{SYK,q} = i^{q/2} Σ_{i₁<…<i_q} x_{i₁…i_q} j_{i₁…i_q} γ_{i₁}⋯γ_{i_q}

归一化按精确元组数 C(2N, q) 计算：

- 每个元组以 p = min(1, N^α / C(2N, q)) 保留，平均连接数 C_q = min(C(2N, q), N^α)；
- j 为零均值高斯，总方差预算 j²(q-1)! N^{α-q+1} 均分给平均保留的元组。
  未截断时单个耦合方差即 j²(q-1)!/N^{q-1}。
"""
import math
from itertools import combinations
from typing import Tuple

import numpy as np

from src.algebra.majorana import majorana_product
from src.algebra.pauli import OperatorSum
from src.models.spec import DisorderRealization, ModelFamily, ModelSpec
from src.utils.exceptions import ConfigurationError
from src.utils.logger import model_logger

_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


def expected_connections(n_cells: int, q: int, alpha: float) -> float:
    """平均保留元组数 min(C(2N, q), N^α)"""
    return min(float(math.comb(2 * n_cells, q)), float(n_cells) ** alpha)


def retention_probability(n_cells: int, q: int, alpha: float) -> float:
    """p = min(1, N^α / C(2N, q))"""
    return expected_connections(n_cells, q, alpha) / math.comb(2 * n_cells, q)


def coupling_std(n_cells: int, q: int, alpha: float, j: float) -> float:
    """
    单个耦合的标准差

    σ² = j²(q-1)! N^{α-q+1} / (p·C(2N, q))，保证 Σ 保留元组的方差期望恰为 j²(q-1)! N^{α-q+1}。
    """
    budget = j * j * math.factorial(q - 1) * float(n_cells) ** (alpha - q + 1)
    return math.sqrt(budget / expected_connections(n_cells, q, alpha))


def build_sparse_syk(spec: ModelSpec, seed: int) -> Tuple[OperatorSum, DisorderRealization]:
    """
    构造一次稀疏 SYK 抽样

    先对全部升序元组抽取保留掩码，再抽取耦合，顺序固定保证 (spec, seed) 可逐位复现。

    Args:
        spec: family 为 SparseSYK 或 RescaledSparseSYK
        seed: 64 位种子

    Returns:
        (哈密顿量, 抽样记录)；空掩码时哈密顿量为零算子，realization.degenerate 为真
    """
    if spec.family not in (ModelFamily.SPARSE_SYK, ModelFamily.RESCALED_SPARSE_SYK):
        raise ConfigurationError(f"build_sparse_syk cannot build family {spec.family.value}")
    if spec.n_cells is None:
        raise ConfigurationError("ModelSpec.n_cells must be set before building")

    n_cells, q = spec.n_cells, spec.q
    n_majoranas = 2 * n_cells
    if n_majoranas < q:
        raise ConfigurationError(f"q={q} exceeds the {n_majoranas} available Majoranas")

    tuples = list(combinations(range(1, n_majoranas + 1), q))
    p = retention_probability(n_cells, q, spec.alpha)
    rng = np.random.default_rng(seed)
    keep = rng.random(len(tuples)) < p
    draws = rng.normal(0.0, coupling_std(n_cells, q, spec.alpha, spec.j), size=len(tuples))

    couplings = {
        index_tuple: float(value)
        for index_tuple, kept, value in zip(tuples, keep, draws)
        if kept
    }
    phase = _I_POWERS[(q // 2) % 4]
    terms = [
        majorana_product(index_tuple, n_cells).scaled(phase * value)
        for index_tuple, value in couplings.items()
    ]
    hamiltonian = OperatorSum.from_terms(terms, n_cells)
    realization = DisorderRealization(
        family=spec.family,
        n_cells=n_cells,
        seed=seed,
        couplings=couplings,
        mask=frozenset(couplings),
        sparse=True,
    )
    if realization.degenerate:
        model_logger.info(f"Sparse SYK N={n_cells} q={q} alpha={spec.alpha} seed={seed}: empty mask")
    return hamiltonian, realization


def rescale_factor(n_cells: int, q: int, alpha: float) -> float:
    """
    谱重标度因子 M

    一般情形 M = N^{qxθ(x)/2 + 1/2}，x = 1 - 2α/q；
    q = 2 且 α < 1 时取低连通分支 M = N^{1/2 + 1 - α}。
    """
    x = 1.0 - 2.0 * alpha / q
    theta = 1.0 if x >= 0 else 0.0
    if q == 2 and alpha < 1:
        exponent = 0.5 + 1.0 - alpha
    else:
        exponent = q * x * theta / 2.0 + 0.5
    return float(n_cells) ** exponent


def rescale_syk(hamiltonian: OperatorSum, spec: ModelSpec) -> OperatorSum:
    """H₁ = M · H_{SYK,q}"""
    return hamiltonian * rescale_factor(hamiltonian.n_cells, spec.q, spec.alpha)


def connection_count(realization: DisorderRealization) -> int:
    """保留的 q 点连接数（掩码基数）"""
    return len(realization.mask)


__all__ = [
    'build_sparse_syk',
    'rescale_syk',
    'rescale_factor',
    'retention_probability',
    'coupling_std',
    'expected_connections',
    'connection_count'
]
