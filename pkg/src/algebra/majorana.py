"""
Majorana 算子与 Jordan-Wigner 映射

    γ_{2l}   = (∏_{k<l} σᶻ_k) σˣ_l
    γ_{2l-1} = (∏_{k<l} σᶻ_k) σʸ_l
"""
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from src.algebra.pauli import OperatorSum, PauliTerm, combine, multiply
from src.utils.exceptions import AlgebraViolationError, MajoranaIndexError

MajoranaMap = Callable[[int, int], PauliTerm]


def check_majorana_index(m: int, n_cells: int):
    if not 1 <= m <= 2 * n_cells:
        raise MajoranaIndexError(f"Majorana index {m} outside 1..{2 * n_cells}")


@lru_cache(maxsize=4096)
def jw_majorana(m: int, n_cells: int) -> PauliTerm:
    """
    Jordan-Wigner 下的第 m 个 Majorana 算子

    Args:
        m: Majorana 下标，1 ≤ m ≤ 2N
        n_cells: 单元数 N

    Returns:
        单位系数的 PauliTerm

    Raises:
        MajoranaIndexError: 下标越界
    """
    check_majorana_index(m, n_cells)
    cell = (m + 1) // 2
    bit = 1 << (cell - 1)
    string = bit - 1  # 单元 1..cell-1 上的 σᶻ 串
    z_mask = string | (bit if m % 2 == 1 else 0)
    return PauliTerm(1.0, bit, z_mask, n_cells)


def majorana_product(indices: Sequence[int], n_cells: int,
                     majorana: MajoranaMap = jw_majorana) -> PauliTerm:
    """γ_{i₁} γ_{i₂} ⋯ γ_{i_q}（按给定顺序相乘）"""
    product = PauliTerm(1.0, 0, 0, n_cells)
    for index in indices:
        product = multiply(product, majorana(index, n_cells))
    return product


def anticommutator_scalar(a: PauliTerm, b: PauliTerm) -> complex:
    """
    {a, b} 若正比于单位算子则返回该标量

    Raises:
        AlgebraViolationError: 反对易子不是标量
    """
    anti = combine([
        (1.0, OperatorSum.from_term(multiply(a, b))),
        (1.0, OperatorSum.from_term(multiply(b, a))),
    ])
    scalar = 0j
    for term in anti.terms():
        if not term.is_identity:
            raise AlgebraViolationError(
                f"Anticommutator of {a!r} and {b!r} contains {term!r}"
            )
        scalar = term.coeff
    return scalar


def anticommutation_table(n_cells: int, majorana: MajoranaMap = jw_majorana) -> np.ndarray:
    """
    2N × 2N 表，元素 (m, n) 为 {γ_m, γ_n} = s·I 中的 s

    Args:
        n_cells: 单元数
        majorana: Majorana 映射（测试中可替换为有缺陷的映射）

    Raises:
        AlgebraViolationError: 某个反对易子不正比于单位算子
    """
    size = 2 * n_cells
    gammas = [majorana(m, n_cells) for m in range(1, size + 1)]
    table = np.zeros((size, size), dtype=complex)
    for row in range(size):
        for col in range(row, size):
            value = anticommutator_scalar(gammas[row], gammas[col])
            table[row, col] = value
            table[col, row] = value
    if np.allclose(table.imag, 0.0):
        return table.real
    return table


__all__ = [
    'jw_majorana',
    'majorana_product',
    'anticommutator_scalar',
    'anticommutation_table',
    'check_majorana_index',
    'MajoranaMap'
]
