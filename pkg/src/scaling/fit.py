"""
幂律拟合
在 (ln N, ln value) 上做加权最小二乘：ln v = a ln N + b
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import curve_fit

from src.utils.exceptions import PowerLawDomainError
from src.utils.logger import scaling_logger

MIN_POINTS = 3

Point = Tuple[float, float, Optional[float]]


@dataclass(frozen=True)
class ScalingFit:
    """拟合结果"""
    exponent: float
    intercept: float
    exponent_stderr: float
    r_squared: float
    n_points: int

    def predict(self, n_cells: float) -> float:
        return float(np.exp(self.intercept) * n_cells ** self.exponent)


def _log_linear(x: np.ndarray, exponent: float, intercept: float) -> np.ndarray:
    return exponent * x + intercept


def fit_power_law(points: Sequence[Point]) -> ScalingFit:
    """
    拟合 value ∼ e^b N^a

    标准误以 stderr/value 传播到对数空间作为权重；
    只要有一个点缺少正的标准误就退回无权拟合。

    Args:
        points: (N, value, stderr) 列表，stderr 可为 None

    Returns:
        ScalingFit

    Raises:
        PowerLawDomainError: 点数不足 3 个，或 N / value 非正
    """
    if len(points) < MIN_POINTS:
        raise PowerLawDomainError(f"Power-law fit needs at least {MIN_POINTS} points, got {len(points)}")
    n_values = np.array([p[0] for p in points], dtype=float)
    values = np.array([p[1] for p in points], dtype=float)
    errors = np.array([np.nan if p[2] is None else p[2] for p in points], dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise PowerLawDomainError(f"Power-law fit needs positive values, got {values.tolist()}")
    if np.any(n_values <= 0):
        raise PowerLawDomainError("Power-law fit needs positive N")

    x, y = np.log(n_values), np.log(values)
    sigma = None
    if np.all(np.isfinite(errors)) and np.all(errors > 0):
        sigma = errors / values

    # 在中心化坐标上拟合，整体缩放 value 只改变 y_shift
    x_shift, y_shift = float(x.mean()), float(y.mean())
    xc, yc = x - x_shift, y - y_shift
    guess = np.polyfit(xc, yc, 1)
    params, covariance = curve_fit(
        _log_linear, xc, yc,
        p0=(guess[0], guess[1]),
        sigma=sigma,
        absolute_sigma=False,
    )
    exponent = float(params[0])
    intercept = float(params[1]) + y_shift - exponent * x_shift
    variance = covariance[0, 0]
    exponent_stderr = float(np.sqrt(variance)) if np.isfinite(variance) and variance > 0 else 0.0

    residuals = yc - _log_linear(xc, exponent, float(params[1]))
    total = float(np.sum(yc ** 2))
    ss_res = float(np.sum(residuals ** 2))
    r_squared = 1.0 - ss_res / total if total > 0 else 1.0

    scaling_logger.debug(
        f"Fitted exponent {exponent:.4f} ± {exponent_stderr:.4f} over {len(points)} points "
        f"(weighted={sigma is not None})"
    )
    return ScalingFit(
        exponent=exponent,
        intercept=intercept,
        exponent_stderr=exponent_stderr,
        r_squared=r_squared,
        n_points=len(points),
    )


__all__ = ['ScalingFit', 'fit_power_law', 'MIN_POINTS']
