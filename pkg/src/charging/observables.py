"""
单次抽样的可观测量
方差、谱宽、Bhatia-Davis 余量、Fubini-Study 长度、量子优势以及累积量交叉检验
"""
from typing import Optional, Tuple, Union

import numpy as np

from config.settings import settings
from src.algebra.pauli import OperatorSum
from src.charging.spectral import Spectrum
from src.charging.state import BatteryState, as_amplitudes
from src.utils.exceptions import (
    DegenerateRealizationError,
    InequalityViolationError,
    NumericalError,
    ValidationError,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)

Hamiltonian = Union[OperatorSum, np.ndarray, Spectrum]
State = Union[BatteryState, np.ndarray]

# |χ(u)| 低于此值视为靠近对数支割线
_LOG_GUARD = 1e-8


def apply_hamiltonian(h1: Hamiltonian, psi: State) -> np.ndarray:
    """H|ψ⟩，OperatorSum 走无矩阵路径"""
    amplitudes = as_amplitudes(psi)
    if isinstance(h1, (OperatorSum, Spectrum)):
        return h1.apply(amplitudes)
    return np.asarray(h1, dtype=complex) @ amplitudes


def mean_energy(h1: Hamiltonian, psi: State) -> float:
    """μ = ⟨H₁⟩_ψ"""
    amplitudes = as_amplitudes(psi)
    return float(np.vdot(amplitudes, apply_hamiltonian(h1, amplitudes)).real)


def variance(h1: Hamiltonian, psi: State) -> float:
    """
    ΔH₁² = ⟨H₁²⟩ - ⟨H₁⟩²

    Hermitian H₁ 下 ⟨H₁²⟩ = ‖H₁ψ‖²，只需一次作用；负的舍入残差截断为 0。
    """
    amplitudes = as_amplitudes(psi)
    image = apply_hamiltonian(h1, amplitudes)
    mu = np.vdot(amplitudes, image).real
    second = np.vdot(image, image).real
    return max(float(second - mu * mu), 0.0)


def spectral_extremes(h1: Hamiltonian) -> Tuple[float, float]:
    """(E_min, E_max)"""
    spectrum = Spectrum.of(h1)
    return spectrum.e_min, spectrum.e_max


def spectral_gap(h1: Hamiltonian) -> float:
    """ΔE₁ = E_max - E_min"""
    return max(Spectrum.of(h1).gap, 0.0)


def bhatia_davis_slack(h1: Hamiltonian, psi: State) -> float:
    """
    Bhatia-Davis 余量 (E_max - μ)(μ - E_min) - ΔH₁²

    Raises:
        InequalityViolationError: 余量低于 -BHATIA_RTOL·max(1, ΔH₁²)
    """
    spectrum = Spectrum.of(h1)
    mu, var = spectrum.moments(psi)
    slack = (spectrum.e_max - mu) * (mu - spectrum.e_min) - var
    if slack < -settings.BHATIA_RTOL * max(1.0, var):
        raise InequalityViolationError(
            f"Bhatia-Davis bound violated: slack {slack:.3e} with variance {var:.6e}"
        )
    return slack


def fubini_length(delta_h1: float, tau: float) -> float:
    """淬火协议下 l(C) = ΔH₁·τ"""
    if delta_h1 < 0 or tau < 0:
        raise ValidationError(f"fubini_length needs non-negative inputs, got ({delta_h1}, {tau})")
    return delta_h1 * tau


def advantage(parallel, sharp) -> float:
    """
    Γ = τ^∥ / τ^♯

    Args:
        parallel: 并行充电的报告（需有 tau 属性）
        sharp: 相互作用充电的报告

    Raises:
        DegenerateRealizationError: τ^♯ 为零或未定义
    """
    if sharp.tau is None or sharp.tau <= 0:
        raise DegenerateRealizationError("Advantage undefined: sharp protocol has no charging time")
    return parallel.tau / sharp.tau


def power_advantage(parallel, sharp) -> float:
    """Γ = P^♯ / P^∥，等功时与 advantage 一致"""
    if sharp.power is None or parallel.power is None or parallel.power <= 0:
        raise DegenerateRealizationError("Power advantage undefined")
    return sharp.power / parallel.power


def _log_characteristic(energies: np.ndarray, weights: np.ndarray, u: float) -> complex:
    chi = np.dot(weights, np.exp(1j * energies * u))
    if abs(chi) < _LOG_GUARD:
        raise NumericalError(f"Characteristic function vanishes at u={u:.3e}")
    return complex(np.log(chi))


def cumulant_g2_check(h1: Hamiltonian, psi: State, step: Optional[float] = None) -> float:
    """
    由累积量生成函数 G(u) = ln⟨e^{iH₁u}⟩ 的二阶中心差分复核方差

    在谱基中计算，能量先减去 μ，使 G 的线性项消失。

    Args:
        h1: 充电哈密顿量
        psi: 初态
        step: 差分步长，缺省为 G2_BASE_STEP / max(1, ΔH₁)

    Returns:
        |-G''(0) - ΔH₁²| / ΔH₁²；ΔH₁² = 0 时返回 0

    Raises:
        NumericalError: 步长减半后仍靠近对数支割线
    """
    spectrum = Spectrum.of(h1)
    weights = spectrum.weights(psi)
    mu, var = spectrum.moments(psi)
    if var <= 0.0:
        return 0.0

    energies = spectrum.energies - mu
    h = step if step is not None else settings.G2_BASE_STEP / max(1.0, np.sqrt(var))
    last_error = None
    for attempt in range(2):
        try:
            g_plus = _log_characteristic(energies, weights, h)
            g_minus = _log_characteristic(energies, weights, -h)
        except NumericalError as e:
            last_error = e
            logger.warning(f"G''(0) step {h:.3e} hit the log branch guard, halving (attempt {attempt + 1})")
            h /= 2.0
            continue
        g2 = (g_plus + g_minus) / (h * h)  # G(0) = 0
        return abs(-g2 - var) / var
    raise NumericalError(f"Cumulant check failed after step reduction: {last_error}")


__all__ = [
    'Hamiltonian',
    'State',
    'apply_hamiltonian',
    'mean_energy',
    'variance',
    'spectral_extremes',
    'spectral_gap',
    'bhatia_davis_slack',
    'fubini_length',
    'advantage',
    'power_advantage',
    'cumulant_g2_check'
]
