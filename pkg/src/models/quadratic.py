"""
单体哈密顿量与二次型 Majorana 哈密顿量

    h_i = ε₀(σʸ_i + 1),   v_i = λ₀ σˣ_i
    H₁ = i J₀ Σ_{i>j} γ_i γ_j               （无序前的干净模型）
    H₁ = i Σ_{i>j} J_ij γ_i γ_j             （无序二次型）
    H₁ = Σ_i λ_i (i χ_{2i} χ_{2i-1} - 1),   χ = Wγ（正交旋转变体）
"""
import math
from itertools import combinations
from typing import Dict, List, Tuple

import numpy as np
from scipy.stats import ortho_group

from src.algebra.majorana import jw_majorana, majorana_product
from src.algebra.pauli import OperatorSum, PauliTerm, combine, pauli_x, pauli_y
from src.models.spec import DisorderRealization, ModelFamily, ModelSpec
from src.utils.exceptions import ConfigurationError
from src.utils.logger import model_logger


def build_h0(n_cells: int, eps0: float) -> OperatorSum:
    """
    电池哈密顿量 H₀ = Σ_i ε₀(σʸ_i + 1)

    谱为 {0, 2ε₀, ..., 2Nε₀}，基态能量为 0。
    """
    parts = [(eps0, pauli_y(cell, n_cells)) for cell in range(1, n_cells + 1)]
    parts.append((eps0 * n_cells, OperatorSum.identity(n_cells)))
    return combine(parts)


def build_parallel_drive(n_cells: int, lambda0: float) -> OperatorSum:
    """并行充电 H₁ = λ₀ Σ_i σˣ_i"""
    return combine([(lambda0, pauli_x(cell, n_cells)) for cell in range(1, n_cells + 1)])


def _pair_term(a: int, b: int, coupling: float, n_cells: int) -> PauliTerm:
    """i·coupling·γ_b γ_a，其中 b > a"""
    return majorana_product((b, a), n_cells).scaled(1j * coupling)


def build_clean_quadratic(n_cells: int) -> OperatorSum:
    """干净二次型 H₁ = i J₀ Σ_{i>j} γ_i γ_j，J₀ = 1/√N"""
    coupling = 1.0 / math.sqrt(n_cells)
    terms = [
        _pair_term(a, b, coupling, n_cells)
        for a, b in combinations(range(1, 2 * n_cells + 1), 2)
    ]
    return OperatorSum.from_terms(terms, n_cells)


def _require(spec: ModelSpec, *families: ModelFamily):
    if spec.family not in families:
        raise ConfigurationError(
            f"Builder expects family in {[f.value for f in families]}, got {spec.family.value}"
        )
    if spec.n_cells is None:
        raise ConfigurationError("ModelSpec.n_cells must be set before building")


def build_disordered_quadratic(spec: ModelSpec, seed: int) -> Tuple[OperatorSum, DisorderRealization]:
    """
    无序二次型 H₁ = i Σ_{i>j} J_ij γ_i γ_j

    J_ij 独立标准正态；全部 C(2N, 2) 对都保留。
    耦合以升序元组 (j, i) 为键。
    """
    _require(spec, ModelFamily.DISORDERED_QUADRATIC)
    n_cells = spec.n_cells
    pairs = list(combinations(range(1, 2 * n_cells + 1), 2))
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal(len(pairs))

    couplings = {pair: float(value) for pair, value in zip(pairs, draws)}
    terms = [_pair_term(a, b, couplings[(a, b)], n_cells) for a, b in pairs]
    hamiltonian = OperatorSum.from_terms(terms, n_cells)
    realization = DisorderRealization(
        family=spec.family,
        n_cells=n_cells,
        seed=seed,
        couplings=couplings,
        mask=frozenset(pairs),
    )
    model_logger.debug(f"Built DisorderedQuadratic N={n_cells} seed={seed}: {len(hamiltonian)} terms")
    return hamiltonian, realization


def build_rotated_quadratic(spec: ModelSpec, seed: int) -> Tuple[OperatorSum, DisorderRealization]:
    """
    正交旋转构造的 q=2 变体（诊断用）

    H₁ = Σ_i λ_i (i χ_{2i} χ_{2i-1} - 1)，χ_a = Σ_b W_ab γ_b，W 为随机正交矩阵，
    λ_i 标准正态。展开到 γ 上后与 DisorderedQuadratic 同为全连接二次型。
    """
    _require(spec, ModelFamily.ROTATED_QUADRATIC)
    n_cells = spec.n_cells
    size = 2 * n_cells
    rng = np.random.default_rng(seed)
    rotation = ortho_group.rvs(size, random_state=rng)
    levels = rng.standard_normal(n_cells)

    gammas = [OperatorSum.from_term(jw_majorana(m, n_cells)) for m in range(1, size + 1)]

    def chi(row: int) -> OperatorSum:
        return combine([(float(rotation[row, col]), gammas[col]) for col in range(size)])

    parts: List[Tuple[complex, OperatorSum]] = []
    for cell in range(1, n_cells + 1):
        pair = chi(2 * cell - 1) @ chi(2 * cell - 2)
        level = float(levels[cell - 1])
        parts.append((1j * level, pair))
        parts.append((-level, OperatorSum.identity(n_cells)))
    hamiltonian = combine(parts)

    couplings: Dict[Tuple[int, ...], float] = {
        (cell,): float(levels[cell - 1]) for cell in range(1, n_cells + 1)
    }
    realization = DisorderRealization(
        family=spec.family,
        n_cells=n_cells,
        seed=seed,
        couplings=couplings,
        mask=frozenset(couplings),
        rotation=rotation,
    )
    return hamiltonian, realization


__all__ = [
    'build_h0',
    'build_parallel_drive',
    'build_clean_quadratic',
    'build_disordered_quadratic',
    'build_rotated_quadratic'
]
