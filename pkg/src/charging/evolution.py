"""
两次淬火协议的功曲线
t ∈ (0, τ) 内 U = e^{-iH₁t}，W(t) = ⟨ψ(t)|H₀|ψ(t)⟩
"""
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from config.settings import settings
from src.algebra.pauli import OperatorSum
from src.charging.observables import Hamiltonian, State, apply_hamiltonian
from src.charging.spectral import SpectralPropagator, Spectrum
from src.charging.state import as_amplitudes
from src.utils.exceptions import NoChargingError, ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

# 低于此值的曲线视为没有充电
NO_CHARGE_TOLERANCE = 1e-10


@dataclass
class WorkCurve:
    """
    功曲线

    Attributes:
        times: 递增时间网格
        works: W(t) 采样
        norms: ‖ψ(t)‖（仅在记录诊断量时给出）
        h1_means: ⟨H₁⟩_t（仅在记录诊断量时给出）
        work_at: 网格外求值 W(t) 的函数，供 optimal_tau 细化
        rate_at: 瞬时充电功率 dW/dt，供峰值细化
    """
    times: np.ndarray
    works: np.ndarray
    norms: Optional[np.ndarray] = None
    h1_means: Optional[np.ndarray] = None
    work_at: Optional[Callable[[float], float]] = field(default=None, repr=False, compare=False)
    rate_at: Optional[Callable[[float], float]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.times) == 0 or len(self.times) != len(self.works):
            raise ValidationError("WorkCurve needs matching, non-empty times and works")

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    @property
    def peak(self) -> float:
        return float(np.max(self.works))


def _expectations(op: Union[OperatorSum, np.ndarray], block: np.ndarray) -> np.ndarray:
    """一批态 (行) 上的 ⟨O⟩"""
    if isinstance(op, OperatorSum):
        image = op.apply(block)
    else:
        image = block @ op.T
    return np.einsum('ij,ij->i', block.conj(), image).real


def evolve_work_curve(h0: Union[OperatorSum, np.ndarray], h1: Hamiltonian, psi0: State,
                      t_max: Optional[float] = None, n_samples: Optional[int] = None,
                      diagnostics: bool = True) -> WorkCurve:
    """
    在 [0, t_max] 的均匀网格上计算 W(t)

    Args:
        h0: 电池哈密顿量
        h1: 充电哈密顿量（只对角化一次）
        psi0: 初态
        t_max: 时间窗口，缺省 WORK_WINDOW / ΔH₁
        n_samples: 采样点数，缺省 WORK_GRID_SAMPLES
        diagnostics: 是否记录范数与 ⟨H₁⟩ 轨迹

    Returns:
        WorkCurve

    Raises:
        ValidationError: t_max 或 n_samples 非法
        NumericalError: 本征分解失败
    """
    spectrum = Spectrum.of(h1)
    psi0 = as_amplitudes(psi0)
    if t_max is None:
        _, var = spectrum.moments(psi0)
        t_max = settings.WORK_WINDOW / np.sqrt(var) if var > 0 else settings.WORK_WINDOW
    n_samples = settings.WORK_GRID_SAMPLES if n_samples is None else n_samples
    if not t_max > 0:
        raise ValidationError(f"t_max must be positive, got {t_max}")
    if n_samples < 2:
        raise ValidationError(f"n_samples must be at least 2, got {n_samples}")

    h0_op = h0 if isinstance(h0, OperatorSum) else np.asarray(h0, dtype=complex)
    propagator = SpectralPropagator(spectrum, psi0)
    times = np.linspace(0.0, t_max, n_samples)

    works, norms, means = [], [], []
    for block in propagator.states(times):
        works.append(_expectations(h0_op, block))
        if diagnostics:
            norms.append(np.linalg.norm(block, axis=1))
            means.append(_expectations(spectrum.matrix, block))

    def work_at(t: float) -> float:
        psi_t = propagator.state_at(t)
        return float(np.vdot(psi_t, apply_hamiltonian(h0_op, psi_t)).real)

    def rate_at(t: float) -> float:
        # dW/dt = -2 Im⟨H₁ψ(t)|H₀ψ(t)⟩
        psi_t = propagator.state_at(t)
        h1_psi = spectrum.vectors @ (spectrum.energies * (spectrum.vectors.conj().T @ psi_t))
        return float(-2.0 * np.vdot(h1_psi, apply_hamiltonian(h0_op, psi_t)).imag)

    return WorkCurve(
        times=times,
        works=np.concatenate(works),
        norms=np.concatenate(norms) if diagnostics else None,
        h1_means=np.concatenate(means) if diagnostics else None,
        work_at=work_at,
        rate_at=rate_at,
    )


def _refine_maximum(curve: WorkCurve, index: int) -> Tuple[float, float]:
    """
    细化 [t_{i-1}, t_{i+1}] 内的极大

    区间两端 dW/dt 异号时对功率求根，精度到机器精度；否则退回有界一维极大化。
    """
    t_grid, w_grid = float(curve.times[index]), float(curve.works[index])
    if curve.work_at is None:
        return t_grid, w_grid
    lo = curve.times[max(index - 1, 0)]
    hi = curve.times[min(index + 1, len(curve.times) - 1)]
    if hi <= lo:
        return t_grid, w_grid
    if curve.rate_at is not None:
        rate_lo, rate_hi = curve.rate_at(lo), curve.rate_at(hi)
        if rate_lo > 0 > rate_hi:
            t_star = brentq(curve.rate_at, lo, hi)
            w_star = curve.work_at(t_star)
            if w_star >= w_grid:
                return float(t_star), w_star
    result = minimize_scalar(
        lambda t: -curve.work_at(t),
        bounds=(lo, hi),
        method='bounded',
        options={'xatol': settings.TAU_RTOL * max(t_grid, hi) * 1e-2},
    )
    if result.success and -result.fun >= w_grid:
        return float(result.x), float(-result.fun)
    return t_grid, w_grid


def optimal_tau(curve: WorkCurve, target_fraction: float = None) -> Tuple[float, float]:
    """
    充电时间 τ：W 首次达到 target_fraction 倍峰值的时刻

    峰值先在网格最大值附近细化。随后定位首个跨过 f·峰值·(1 - PEAK_GRID_RTOL) 的网格区间：
    f = 1 时沿曲线爬到该处的局部极大并细化；f < 1 时用 Brent 求根细化交点，
    时间的相对精度不低于 TAU_RTOL。

    Args:
        curve: 功曲线
        target_fraction: f ∈ (0, 1]，缺省 DEFAULT_TARGET_FRACTION

    Returns:
        (τ, W(τ))

    Raises:
        NoChargingError: 曲线恒为零
        ValidationError: f 越界
    """
    fraction = settings.DEFAULT_TARGET_FRACTION if target_fraction is None else target_fraction
    if not 0.0 < fraction <= 1.0:
        raise ValidationError(f"target_fraction must lie in (0, 1], got {fraction}")

    works = curve.works
    peak_index = int(np.argmax(works))
    if works[peak_index] <= NO_CHARGE_TOLERANCE:
        raise NoChargingError("Work curve never rises above zero")
    _, peak = _refine_maximum(curve, peak_index)

    threshold = fraction * peak * (1.0 - settings.PEAK_GRID_RTOL)
    crossing = int(np.argmax(works >= threshold))

    if fraction == 1.0:
        top = crossing
        while top + 1 < len(works) and works[top + 1] >= works[top]:
            top += 1
        return _refine_maximum(curve, top)

    if crossing == 0 or curve.work_at is None:
        return float(curve.times[crossing]), float(works[crossing])

    target = fraction * peak
    upper = crossing
    while upper < len(works) and works[upper] < target:
        upper += 1
    if upper == len(works):
        return float(curve.times[crossing]), float(works[crossing])

    lo, hi = float(curve.times[crossing - 1]), float(curve.times[upper])
    tau = brentq(lambda t: curve.work_at(t) - target, lo, hi, xtol=settings.TAU_RTOL * hi * 1e-2)
    return float(tau), curve.work_at(tau)


__all__ = [
    'WorkCurve',
    'evolve_work_curve',
    'optimal_tau',
    'NO_CHARGE_TOLERANCE'
]
