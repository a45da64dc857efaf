"""
电池态
|0⟩^⊗N 为每个单元 σʸ = -1 的本征态，满足 h_i|0⟩ = 0
"""
from dataclasses import dataclass
from functools import reduce
from typing import Union

import numpy as np

from src.algebra.dense import check_dense_cap
from src.utils.exceptions import DimensionMismatchError, ValidationError

NORM_TOLERANCE = 1e-12

# 计算基 (|0⟩, |1⟩) 下的单比特分量
_GROUND_CELL = np.array([1.0, -1j]) / np.sqrt(2.0)  # σʸ = -1
_TOP_CELL = np.array([1.0, 1j]) / np.sqrt(2.0)      # σʸ = +1


@dataclass(frozen=True, eq=False)
class BatteryState:
    """单位范数的 2^N 维态矢量"""
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if amplitudes.ndim != 1:
            raise DimensionMismatchError("BatteryState amplitudes must be a vector")
        dim = amplitudes.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise DimensionMismatchError(f"State dimension {dim} is not a power of two")
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValidationError(f"State norm {norm:.15f} differs from 1")
        object.__setattr__(self, 'amplitudes', amplitudes)

    @property
    def n_cells(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    @classmethod
    def normalized(cls, amplitudes: np.ndarray) -> 'BatteryState':
        amplitudes = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amplitudes)
        if norm == 0:
            raise ValidationError("Cannot normalize the zero vector")
        return cls(amplitudes / norm)

    def overlap(self, other: 'BatteryState') -> complex:
        """⟨self|other⟩"""
        return complex(np.vdot(self.amplitudes, as_amplitudes(other)))

    def infidelity(self, other: Union['BatteryState', np.ndarray]) -> float:
        """1 - |⟨self|other⟩|²"""
        return 1.0 - abs(np.vdot(self.amplitudes, as_amplitudes(other))) ** 2


def _product_state(cell: np.ndarray, n_cells: int) -> BatteryState:
    if n_cells < 1:
        raise ValidationError("n_cells must be positive")
    check_dense_cap(n_cells)
    return BatteryState(reduce(np.kron, [cell] * n_cells))


def ground_state(n_cells: int) -> BatteryState:
    """
    电池基态 |0⟩^⊗N

    每个单元取 (1, -i)/√2，即 σʸ 本征值 -1 的本征矢；单元 1 为最高位。

    Raises:
        ResourceLimitError: N 超过稠密上限
    """
    return _product_state(_GROUND_CELL, n_cells)


def top_state(n_cells: int) -> BatteryState:
    """H₀ 的最高能态，每个单元 σʸ = +1，能量 2Nε₀"""
    return _product_state(_TOP_CELL, n_cells)


def as_amplitudes(psi: Union[BatteryState, np.ndarray]) -> np.ndarray:
    if isinstance(psi, BatteryState):
        return psi.amplitudes
    return np.asarray(psi, dtype=complex)


__all__ = [
    'BatteryState',
    'ground_state',
    'top_state',
    'as_amplitudes',
    'NORM_TOLERANCE'
]
