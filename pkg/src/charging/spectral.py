"""
谱分解与谱演化
H₁ 只对角化一次，之后的期望值、时间演化都在本征基中完成
"""
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from src.algebra.dense import to_dense
from src.algebra.pauli import OperatorSum
from src.charging.state import BatteryState, as_amplitudes
from src.utils.exceptions import DimensionMismatchError, NumericalError, ValidationError

HERMITIAN_TOLERANCE = 1e-10


class Spectrum:
    """
    稠密 Hermitian 矩阵的本征分解缓存

    Attributes:
        matrix: 稠密矩阵
        energies: 升序本征值
        vectors: 本征矢（按列）
    """

    def __init__(self, matrix: np.ndarray, operator: Optional[OperatorSum] = None):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"Expected a square matrix, got shape {matrix.shape}")
        deviation = np.max(np.abs(matrix - matrix.conj().T)) if matrix.size else 0.0
        if deviation > HERMITIAN_TOLERANCE * max(1.0, np.max(np.abs(matrix))):
            raise ValidationError(f"Matrix is not Hermitian (deviation {deviation:.3e})")
        try:
            energies, vectors = np.linalg.eigh(matrix)
        except np.linalg.LinAlgError as e:
            raise NumericalError(f"Eigendecomposition failed: {e}")
        self.matrix = matrix
        self.energies = energies
        self.vectors = vectors
        self.operator = operator

    @classmethod
    def of(cls, hamiltonian: Union['Spectrum', OperatorSum, np.ndarray]) -> 'Spectrum':
        """OperatorSum / 稠密矩阵 / Spectrum 统一转为 Spectrum"""
        if isinstance(hamiltonian, Spectrum):
            return hamiltonian
        if isinstance(hamiltonian, OperatorSum):
            return cls(to_dense(hamiltonian), operator=hamiltonian)
        return cls(hamiltonian)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def e_min(self) -> float:
        return float(self.energies[0])

    @property
    def e_max(self) -> float:
        return float(self.energies[-1])

    @property
    def gap(self) -> float:
        return self.e_max - self.e_min

    def coefficients(self, psi: Union[BatteryState, np.ndarray]) -> np.ndarray:
        """本征基下的展开系数 V†ψ"""
        amplitudes = as_amplitudes(psi)
        if amplitudes.shape != (self.dim,):
            raise DimensionMismatchError(
                f"State of shape {amplitudes.shape} does not match dimension {self.dim}"
            )
        return self.vectors.conj().T @ amplitudes

    def weights(self, psi: Union[BatteryState, np.ndarray]) -> np.ndarray:
        """|⟨E_k|ψ⟩|²"""
        return np.abs(self.coefficients(psi)) ** 2

    def moments(self, psi: Union[BatteryState, np.ndarray]) -> Tuple[float, float]:
        """
        能量分布的前两阶矩

        Returns:
            (μ, ΔH²)，方差按中心化二阶矩计算
        """
        weights = self.weights(psi)
        mu = float(np.dot(weights, self.energies))
        variance = float(np.dot(weights, (self.energies - mu) ** 2))
        return mu, variance

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self.matrix @ as_amplitudes(psi)


class SpectralPropagator:
    """|ψ(t)⟩ = Σ_k e^{-iE_k t} c_k |E_k⟩"""

    def __init__(self, spectrum: Spectrum, psi0: Union[BatteryState, np.ndarray]):
        self.spectrum = spectrum
        self.initial = spectrum.coefficients(psi0)

    def state_at(self, t: float) -> np.ndarray:
        phases = np.exp(-1j * self.spectrum.energies * t)
        return self.spectrum.vectors @ (phases * self.initial)

    def states(self, times: Sequence[float], chunk: int = 256) -> Iterator[np.ndarray]:
        """
        按块生成演化态

        Yields:
            形状 (块长, 2^N) 的数组，行对应时间点
        """
        times = np.asarray(times, dtype=float)
        vectors_t = self.spectrum.vectors.T
        for start in range(0, len(times), chunk):
            block = times[start:start + chunk]
            phases = np.exp(-1j * np.outer(block, self.spectrum.energies))
            yield (phases * self.initial) @ vectors_t


__all__ = ['Spectrum', 'SpectralPropagator', 'HERMITIAN_TOLERANCE']
