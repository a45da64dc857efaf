"""
测地线充电哈密顿量
H₁ = Nλ(|E_max⟩⟨E_min| + |E_min⟩⟨E_max|)，把基态直接转到最高能态
"""
from typing import Union

import numpy as np

from src.algebra.dense import to_dense
from src.algebra.pauli import OperatorSum
from src.utils.exceptions import GeometryError, ValidationError

GEOMETRY_TOLERANCE = 1e-10


def _vector(state) -> np.ndarray:
    amplitudes = getattr(state, 'amplitudes', state)
    return np.asarray(amplitudes, dtype=complex)


def _check_eigenvector(h0: np.ndarray, vector: np.ndarray, energy: float, label: str):
    residual = np.linalg.norm(h0 @ vector - energy * vector)
    if residual > GEOMETRY_TOLERANCE * max(1.0, abs(energy)):
        raise GeometryError(f"{label} state is not an eigenvector of H0 (residual {residual:.3e})")


def build_geodesic(h0: Union[OperatorSum, np.ndarray], geodesic_lambda: float,
                   ground, top) -> np.ndarray:
    """
    构造秩 2 的测地线哈密顿量

    Args:
        h0: 电池哈密顿量
        geodesic_lambda: λ > 0
        ground: H₀ 最低能本征态 |E⁰_min⟩
        top: H₀ 最高能本征态 |E⁰_max⟩

    Returns:
        2^N × 2^N 稠密 Hermitian 矩阵

    Raises:
        GeometryError: 两个态未归一、不正交或不是 H₀ 的极值本征态
    """
    if not geodesic_lambda > 0:
        raise ValidationError(f"geodesic_lambda must be positive, got {geodesic_lambda}")
    h0_dense = to_dense(h0) if isinstance(h0, OperatorSum) else np.asarray(h0, dtype=complex)
    ground_vec, top_vec = _vector(ground), _vector(top)
    dim = h0_dense.shape[0]
    if ground_vec.shape != (dim,) or top_vec.shape != (dim,):
        raise GeometryError("Ground/top vectors do not match the dimension of H0")

    for label, vector in (('ground', ground_vec), ('top', top_vec)):
        if abs(np.linalg.norm(vector) - 1.0) > GEOMETRY_TOLERANCE:
            raise GeometryError(f"{label} state is not normalized")
    if abs(np.vdot(ground_vec, top_vec)) > GEOMETRY_TOLERANCE:
        raise GeometryError("Ground and top states are not orthogonal")

    energies = np.linalg.eigvalsh(h0_dense)
    _check_eigenvector(h0_dense, ground_vec, energies[0], 'ground')
    _check_eigenvector(h0_dense, top_vec, energies[-1], 'top')

    n_cells = dim.bit_length() - 1
    swap = np.outer(top_vec, ground_vec.conj())
    return n_cells * geodesic_lambda * (swap + swap.conj().T)


__all__ = ['build_geodesic', 'GEOMETRY_TOLERANCE']
