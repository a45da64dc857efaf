"""
夹心矩 ⟨H₁ h_i H₁⟩₀ 与反对易块分解

把 H₁ 按是否与 σʸ_i 反对易拆成 H_{1,i} + (其余)。由于 σʸ_i|0⟩ = -|0⟩，
    ⟨H₁ h_i H₁⟩₀ = 2ε₀ ⟨H₁ H_{1,i}⟩₀
对任意 Pauli 串之和精确成立。
"""
import math
from typing import List, Tuple

import numpy as np

from config.settings import settings
from src.algebra.pauli import OperatorSum, PauliTerm, combine, pauli_y
from src.charging.observables import Hamiltonian, State, apply_hamiltonian, variance
from src.charging.state import as_amplitudes
from src.utils.exceptions import ValidationError


def _check_cell(cell: int, n_cells: int):
    if not 1 <= cell <= n_cells:
        raise ValidationError(f"Cell {cell} outside 1..{n_cells}")


def _n_cells_of(psi: np.ndarray) -> int:
    return psi.shape[0].bit_length() - 1


def local_h(cell: int, n_cells: int, eps0: float) -> OperatorSum:
    """h_i = ε₀(σʸ_i + 1)"""
    return combine([(eps0, pauli_y(cell, n_cells)), (eps0, OperatorSum.identity(n_cells))])


def sandwich_moment(h1: Hamiltonian, cell: int, eps0: float, psi: State) -> float:
    """
    ⟨ψ|H₁ h_i H₁|ψ⟩

    H₁ Hermitian，故等于 ⟨H₁ψ|h_i|H₁ψ⟩；结果取实部。
    """
    amplitudes = as_amplitudes(psi)
    n_cells = _n_cells_of(amplitudes)
    _check_cell(cell, n_cells)
    image = apply_hamiltonian(h1, amplitudes)
    return local_h(cell, n_cells, eps0).expectation(image).real


def anticommuting_block(h1: OperatorSum, cell: int) -> Tuple[OperatorSum, int]:
    """
    H₁ 中与 σʸ_i 反对易的部分 H_{1,i}

    由掩码直接判定：串在第 i 个单元上的因子为 X 或 Z 时与 σʸ_i 反对易。

    Returns:
        (H_{1,i}, 项数 N_i)
    """
    _check_cell(cell, h1.n_cells)
    bit = 1 << (cell - 1)
    sigma_y = PauliTerm(1.0, bit, bit, h1.n_cells)
    block, _ = h1.split_by_anticommutation(sigma_y)
    return block, len(block)


def erratum_rhs(h1: OperatorSum, cell: int, eps0: float, psi: State) -> float:
    """2ε₀ ⟨ψ|H₁ H_{1,i}|ψ⟩，与 sandwich_moment 独立计算"""
    amplitudes = as_amplitudes(psi)
    block, _ = anticommuting_block(h1, cell)
    value = np.vdot(h1.apply(amplitudes), block.apply(amplitudes))
    return 2.0 * eps0 * float(value.real)


def block_count_formula(n_cells: int, cell: int) -> int:
    """
    全连接二次型中与 σʸ_i 反对易的 γ_aγ_b 数目

    两端单元分列 i 两侧的 4(i-1)(N-i) 项，加上一端落在 i 上的 2(N-i) + 2(i-1) 项，
    再加上单元 i 自身的 γ_{2i-1}γ_{2i}。
    """
    _check_cell(cell, n_cells)
    left, right = cell - 1, n_cells - cell
    return 4 * left * right + 2 * right + 2 * left + 1


def sandwich_profile(h1: Hamiltonian, eps0: float, psi: State) -> List[float]:
    """所有单元上的 ⟨H₁ h_i H₁⟩₀"""
    amplitudes = as_amplitudes(psi)
    n_cells = _n_cells_of(amplitudes)
    image = apply_hamiltonian(h1, amplitudes)
    return [
        local_h(cell, n_cells, eps0).expectation(image).real
        for cell in range(1, n_cells + 1)
    ]


def sandwich_fraction(h1: Hamiltonian, eps0: float, psi: State,
                      threshold: float = None) -> float:
    """
    满足 ⟨H₁ h_i H₁⟩₀ ≥ threshold·ε₀ΔH₁² 的单元比例

    Returns:
        [0, 1] 内的比例；ΔH₁² = 0 时无定义，返回 nan
    """
    threshold = settings.SANDWICH_THRESHOLD if threshold is None else threshold
    var = variance(h1, psi)
    if var <= 0.0:
        return math.nan
    profile = sandwich_profile(h1, eps0, psi)
    hits = sum(1 for value in profile if value >= threshold * eps0 * var)
    return hits / len(profile)


__all__ = [
    'local_h',
    'sandwich_moment',
    'sandwich_profile',
    'sandwich_fraction',
    'anticommuting_block',
    'erratum_rhs',
    'block_count_formula'
]
