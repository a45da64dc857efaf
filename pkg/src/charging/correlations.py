"""
Majorana 关联矩阵与 Λ_n 缩并

    C_ij = i⟨γ_i γ_j⟩₀
    Λ_n = (1/N^n) Σ y λ ⋯ y λ · C_{i₁j₂} C_{i₂j₁} ⋯ C_{i_{n-1}j_n} C_{i_n j_{n-1}}
"""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.algebra.majorana import jw_majorana
from src.algebra.pauli import OperatorSum
from src.charging.observables import State
from src.charging.state import as_amplitudes
from src.models.spec import DisorderRealization
from src.utils.exceptions import (
    DimensionMismatchError,
    NumericalError,
    UnsupportedContractionError,
    ValidationError,
)

REALITY_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """
    关联矩阵

    off_diagonal 保存实反对称部分；对角元按 C_ii = i⟨γ_i²⟩ = i 的约定，
    完整复矩阵由 full 给出。
    """
    off_diagonal: np.ndarray
    n_cells: int

    @property
    def full(self) -> np.ndarray:
        return self.off_diagonal + 1j * np.eye(2 * self.n_cells)

    def value(self, i: int, j: int) -> complex:
        """1 起始下标的 C_ij"""
        return complex(self.full[i - 1, j - 1])


def correlation_matrix(psi: State, n_cells: int) -> CorrelationMatrix:
    """
    在态 ψ 上计算 C_ij = i⟨ψ|γ_i γ_j|ψ⟩

    γ Hermitian，故 ⟨γ_iγ_j⟩ = ⟨γ_iψ|γ_jψ⟩，整张表由一次 Gram 矩阵得到。

    Raises:
        NumericalError: 非对角元虚部超出容差
    """
    amplitudes = as_amplitudes(psi)
    if amplitudes.shape != (1 << n_cells,):
        raise DimensionMismatchError(f"State of shape {amplitudes.shape} does not match {n_cells} cells")
    images = np.array([
        OperatorSum.from_term(jw_majorana(m, n_cells)).apply(amplitudes)
        for m in range(1, 2 * n_cells + 1)
    ])
    table = 1j * (images.conj() @ images.T)
    off_diagonal = table - np.diag(np.diag(table))
    if np.max(np.abs(off_diagonal.imag)) > REALITY_TOLERANCE:
        raise NumericalError("Correlation matrix has non-real off-diagonal entries")
    return CorrelationMatrix(off_diagonal=off_diagonal.real, n_cells=n_cells)


def coupling_matrix(realization: DisorderRealization) -> np.ndarray:
    """
    反对称耦合矩阵 Ã：Ã_ba = y λ (b > a)，Ã_ab = -y λ

    Raises:
        ValidationError: 抽样记录不是按 Majorana 对索引的
    """
    size = 2 * realization.n_cells
    matrix = np.zeros((size, size))
    for key, value in realization.couplings.items():
        if len(key) != 2:
            raise ValidationError(f"Expected pair-indexed couplings, got key {key}")
        a, b = sorted(key)
        matrix[b - 1, a - 1] = value
        matrix[a - 1, b - 1] = -value
    return matrix


def _nonzero_entries(matrix: np.ndarray) -> List[Tuple[int, int, float]]:
    rows, cols = np.nonzero(matrix)
    return [(int(r), int(c), float(matrix[r, c])) for r, c in zip(rows, cols)]


def _pair_block(entries: List[Tuple[int, int, float]], full: np.ndarray) -> complex:
    """Σ Ã_{i₁j₁} Ã_{i₂j₂} C_{i₁j₂} C_{i₂j₁}"""
    total = 0j
    for i1, j1, a1 in entries:
        for i2, j2, a2 in entries:
            total += a1 * a2 * full[i1, j2] * full[i2, j1]
    return total


def lambda_n(realization: DisorderRealization, correlations: CorrelationMatrix, n: int) -> float:
    """
    逐项求和计算 Λ_n

    n = 4 时求和按循环配对分解为两个相同的配对块之积。

    Args:
        realization: SimplifiedVk 抽样（按对索引的耦合）
        correlations: 关联矩阵
        n: 2 或 4

    Raises:
        UnsupportedContractionError: n 不是 2 或 4
    """
    if n not in (2, 4):
        raise UnsupportedContractionError(f"Lambda_n is only implemented for n in (2, 4), got {n}")
    if realization.n_cells != correlations.n_cells:
        raise DimensionMismatchError("Realization and correlation matrix disagree on n_cells")
    entries = _nonzero_entries(coupling_matrix(realization))
    block = _pair_block(entries, correlations.full)
    value = block ** (n // 2) / float(realization.n_cells) ** n
    if abs(value.imag) > REALITY_TOLERANCE * max(1.0, abs(value)):
        raise NumericalError(f"Lambda_{n} has an imaginary part {value.imag:.3e}")
    return float(value.real)


def contract_lambda2(realization: DisorderRealization, correlations: CorrelationMatrix) -> float:
    """Λ₂ 的迹形式 tr((ÃᵀC)²)/N²，作为逐项求和的独立对照"""
    product = coupling_matrix(realization).T @ correlations.full
    value = np.trace(product @ product) / float(realization.n_cells) ** 2
    return float(value.real)


__all__ = [
    'CorrelationMatrix',
    'correlation_matrix',
    'coupling_matrix',
    'lambda_n',
    'contract_lambda2'
]
