"""
自定义异常类定义
"""
from typing import Optional


class BatteryError(Exception):
    """基础异常类"""
    pass


class ConfigurationError(BatteryError):
    """配置错误"""
    pass


class ValidationError(BatteryError):
    """数据验证错误"""
    pass


class DimensionMismatchError(BatteryError):
    """寄存器尺寸不一致"""
    pass


class MajoranaIndexError(BatteryError, IndexError):
    """Majorana 下标越界"""
    pass


class AlgebraViolationError(BatteryError):
    """反对易关系被破坏（通常意味着 Jordan-Wigner 映射有误）"""
    pass


class ResourceLimitError(BatteryError):
    """超出稠密矩阵容量上限"""
    pass


class GeometryError(BatteryError):
    """测地线哈密顿量的端点态不正交或未归一"""
    pass


class InequalityViolationError(BatteryError):
    """Bhatia-Davis 不等式被违反"""
    pass


class NumericalError(BatteryError):
    """数值计算失败"""
    pass


class NoChargingError(BatteryError):
    """功曲线恒为零，无法确定充电时间"""
    pass


class DegenerateRealizationError(BatteryError):
    """退化样本（ΔH₁ = 0 或 τ = 0）"""
    pass


class UnsupportedContractionError(BatteryError):
    """不支持的 Λ_n 阶数"""
    pass


class PowerLawDomainError(BatteryError, ValueError):
    """幂律拟合输入非法"""
    pass


class SweepFailedError(BatteryError):
    """系综扫描失败率超过阈值"""
    pass


class RecordFormatError(BatteryError):
    """记录文件格式错误"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class SchemaVersionError(RecordFormatError):
    """记录文件版本不匹配"""
    pass


__all__ = [
    'BatteryError',
    'ConfigurationError',
    'ValidationError',
    'DimensionMismatchError',
    'MajoranaIndexError',
    'AlgebraViolationError',
    'ResourceLimitError',
    'GeometryError',
    'InequalityViolationError',
    'NumericalError',
    'NoChargingError',
    'DegenerateRealizationError',
    'UnsupportedContractionError',
    'PowerLawDomainError',
    'SweepFailedError',
    'RecordFormatError',
    'SchemaVersionError'
]
