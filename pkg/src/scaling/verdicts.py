"""
拟合指数与预测指数的比较
"""
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Optional, Tuple

from config.settings import settings
from src.scaling.fit import ScalingFit
from src.scaling.predictions import Prediction
from src.utils.logger import scaling_logger

VERDICT_COLUMNS = [
    'quantity', 'family', 'q', 'alpha', 'column', 'fitted', 'fitted_stderr',
    'predicted', 'difference', 'allowed', 'n_points', 'passed', 'group_passed',
]


@dataclass(frozen=True)
class Verdict:
    """一条机器可读的判定"""
    quantity: str
    family: Optional[str]
    q: int
    alpha: float
    column: str
    fitted: float
    fitted_stderr: float
    predicted: float
    difference: float
    allowed: float
    n_points: int
    passed: bool
    # Γ 的两列共用一个结论；其余量与 passed 相同
    group_passed: Optional[bool] = None

    def __post_init__(self):
        if self.group_passed is None:
            object.__setattr__(self, 'group_passed', self.passed)

    def to_row(self) -> Dict[str, Any]:
        return asdict(self)


def compare(fit: ScalingFit, prediction: Prediction, tolerance: float = None,
            column: str = None) -> Verdict:
    """
    |fitted - predicted| ≤ max(tolerance, 3·stderr) 时通过

    Args:
        fit: 拟合结果
        prediction: 预测
        tolerance: 容差，缺省 FIT_TOLERANCE
        column: 被拟合的列名，缺省为 prediction.quantity
    """
    tolerance = settings.FIT_TOLERANCE if tolerance is None else tolerance
    difference = abs(fit.exponent - prediction.exponent)
    allowed = max(tolerance, 3.0 * fit.exponent_stderr)
    return Verdict(
        quantity=prediction.quantity,
        family=prediction.family,
        q=prediction.q,
        alpha=prediction.alpha,
        column=column or prediction.quantity,
        fitted=fit.exponent,
        fitted_stderr=fit.exponent_stderr,
        predicted=prediction.exponent,
        difference=difference,
        allowed=allowed,
        n_points=fit.n_points,
        passed=difference <= allowed,
    )


def compare_advantage(mean_of_ratios: ScalingFit, ratio_of_means: ScalingFit,
                      prediction: Prediction, tolerance: float = None) -> Tuple[Verdict, Verdict]:
    """
    Γ 的两种平均方式分别拟合并分别报告

    任一列通过即视为 Γ 通过，结论写入两行的 group_passed；两列结论不一致时记录日志。

    Returns:
        (advantage 行, advantage_rom 行)
    """
    mor = compare(mean_of_ratios, prediction, tolerance, column='advantage')
    rom = compare(ratio_of_means, prediction, tolerance, column='advantage_rom')
    if mor.passed != rom.passed:
        scaling_logger.warning(
            f"Advantage columns disagree for q={prediction.q} alpha={prediction.alpha}: "
            f"mean-of-ratios {mor.fitted:.3f} (passed={mor.passed}), "
            f"ratio-of-means {rom.fitted:.3f} (passed={rom.passed})"
        )
    else:
        scaling_logger.info(
            f"Advantage exponent discrepancy between columns: {abs(mor.fitted - rom.fitted):.4f}"
        )
    group = mor.passed or rom.passed
    return replace(mor, group_passed=group), replace(rom, group_passed=group)


__all__ = ['Verdict', 'compare', 'compare_advantage', 'VERDICT_COLUMNS']
