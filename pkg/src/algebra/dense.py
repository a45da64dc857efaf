"""
稠密矩阵实现
按单元 1 为最高有效 Kronecker 因子的约定把 OperatorSum 展开为 2^N × 2^N 矩阵
"""
from typing import Optional

import numpy as np

from config.settings import settings
from src.algebra.pauli import OperatorSum, _parity_table, _term_action
from src.utils.exceptions import ResourceLimitError


def check_dense_cap(n_cells: int, cap: Optional[int] = None):
    """
    稠密存储容量检查

    Raises:
        ResourceLimitError: N 超过上限
    """
    limit = settings.DENSE_CAP if cap is None else cap
    if n_cells > limit:
        raise ResourceLimitError(
            f"{n_cells} cells exceed the dense cap of {limit} "
            f"(Hilbert dimension {1 << n_cells})"
        )


def to_dense(op: OperatorSum, cap: Optional[int] = None) -> np.ndarray:
    """
    把 OperatorSum 展开为稠密复矩阵

    每个 Pauli 串在计算基下是带符号的置换矩阵，直接按列写入非零元。

    Args:
        op: 算子
        cap: 单元数上限（默认取全局配置）

    Returns:
        2^N × 2^N 复矩阵

    Raises:
        ResourceLimitError: N 超过上限
    """
    n_cells = op.n_cells
    check_dense_cap(n_cells, cap)
    dim = 1 << n_cells
    basis = np.arange(dim)
    parity = _parity_table(n_cells)
    matrix = np.zeros((dim, dim), dtype=complex)
    for term in op.terms():
        flip, signs, phase = _term_action(term.x_mask, term.z_mask, n_cells, basis, parity)
        matrix[basis ^ flip, basis] += (term.coeff * phase) * signs
    return matrix


__all__ = ['to_dense', 'check_dense_cap']
