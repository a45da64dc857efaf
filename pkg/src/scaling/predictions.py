"""
标度指数预测

    Γ      ∼ N^{(α-q)/2 + 1}          α ≥ q/2
    Γ      ∼ N^{1 - α/2}              α < q/2
    ΔH₁²   ∼ N^{qxθ(x) + 2 + α - q}   x = 1 - 2α/q
    C_q    ∼ N^{α}
    Λ̄₂     ∼ p₁ = N^{-(x+1)}
"""
from dataclasses import dataclass
from typing import Optional

from src.models.spec import ModelFamily, ModelSpec
from src.utils.exceptions import PowerLawDomainError, ValidationError

PREDICTED_QUANTITIES = frozenset({
    'advantage',
    'advantage_rom',
    'variance',
    'connection_count',
    'gap',
    'lambda2',
    'k_term',
    'advantage_class',
})


@dataclass(frozen=True)
class Prediction:
    """预测指数"""
    quantity: str
    q: int
    alpha: float
    exponent: float
    family: Optional[str] = None
    l: Optional[int] = None


def _check_parameters(q: int, alpha: float):
    if not isinstance(q, int) or q < 2 or q % 2:
        raise PowerLawDomainError(f"q must be an even integer >= 2, got {q}")
    if not 0.0 <= alpha <= q:
        raise PowerLawDomainError(f"alpha must lie in [0, q={q}], got {alpha}")


def _class_index(q: int, l: Optional[int]) -> int:
    if l is None or not 1 <= l <= q // 2:
        raise PowerLawDomainError(f"class index l must lie in 1..{q // 2}, got {l}")
    return l


def predicted_exponent(quantity: str, q: int, alpha: float, l: Optional[int] = None) -> float:
    """
    预测的幂律指数

    Args:
        quantity: advantage / advantage_rom / variance / connection_count / gap /
            lambda2 / k_term / advantage_class
        q: 相互作用阶数
        alpha: 连通指数
        l: k_term 与 advantage_class 的类下标，1 ≤ l ≤ q/2

    Raises:
        PowerLawDomainError: 参数越界
        ValidationError: 未知的量
    """
    _check_parameters(q, alpha)
    x = 1.0 - 2.0 * alpha / q
    theta = 1.0 if x >= 0 else 0.0

    if quantity in ('advantage', 'advantage_rom'):
        if alpha >= q / 2:
            return (alpha - q) / 2.0 + 1.0
        return 1.0 - alpha / 2.0
    if quantity == 'variance':
        return q * x * theta + 2.0 + alpha - q
    if quantity == 'connection_count':
        return float(alpha)
    if quantity == 'gap':
        return 1.0
    if quantity == 'lambda2':
        return -(x + 1.0)
    if quantity == 'k_term':
        l = _class_index(q, l)
        return q * x * theta + 2.0 / q + 2.0 * (alpha - q) * (q - l) / q
    if quantity == 'advantage_class':
        l = _class_index(q, l)
        return q * x * theta / 2.0 + 1.0 + (alpha - q) * (q - l) / q
    raise ValidationError(f"No prediction for quantity {quantity!r}")


# 非 SYK 族的固定指数
_FIXED = {
    ModelFamily.CLEAN_QUADRATIC: {'variance': 1.0, 'advantage': 0.5, 'advantage_rom': 0.5},
    ModelFamily.GEODESIC: {'variance': 2.0, 'advantage': 1.0, 'advantage_rom': 1.0, 'gap': 1.0},
    ModelFamily.PARALLEL_DRIVE: {'variance': 1.0, 'advantage': 0.0, 'advantage_rom': 0.0, 'gap': 1.0},
}


def prediction_for(family: ModelFamily, quantity: str, spec: ModelSpec) -> Prediction:
    """
    某个族某个量的预测

    二次型族按 q = 2, α = 2 处理；未重标度的 SparseSYK 方差指数为 α - q + 1。

    Raises:
        ValidationError: 该族没有此量的预测
    """
    family = ModelFamily(family)
    if family in _FIXED:
        table = _FIXED[family]
        if quantity not in table:
            raise ValidationError(f"No prediction for {quantity!r} in family {family.value}")
        return Prediction(quantity, spec.q, spec.alpha, table[quantity], family.value)

    if family in (ModelFamily.DISORDERED_QUADRATIC, ModelFamily.ROTATED_QUADRATIC):
        if quantity in ('connection_count', 'lambda2', 'k_term', 'advantage_class'):
            raise ValidationError(f"No prediction for {quantity!r} in family {family.value}")
        return Prediction(quantity, 2, 2.0, predicted_exponent(quantity, 2, 2.0), family.value)

    if family == ModelFamily.SPARSE_SYK:
        if quantity == 'variance':
            return Prediction(quantity, spec.q, spec.alpha, spec.alpha - spec.q + 1.0, family.value)
        if quantity != 'connection_count':
            raise ValidationError(f"No prediction for {quantity!r} in family {family.value}")

    if family == ModelFamily.SIMPLIFIED_VK and quantity == 'connection_count':
        # 掩码按对抽取，连接数 ∼ p₁N²
        return Prediction(quantity, spec.q, spec.alpha, 2.0 - (spec.x + 1.0), family.value)

    if family in (ModelFamily.SPARSE_SYK, ModelFamily.RESCALED_SPARSE_SYK, ModelFamily.SIMPLIFIED_VK):
        return Prediction(
            quantity, spec.q, spec.alpha,
            predicted_exponent(quantity, spec.q, spec.alpha),
            family.value,
        )
    raise ValidationError(f"No predictions for family {family.value}")


__all__ = [
    'Prediction',
    'predicted_exponent',
    'prediction_for',
    'PREDICTED_QUANTITIES'
]
