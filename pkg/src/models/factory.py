"""
模型工厂
按 ModelSpec.family 分派到各个构造函数
"""
from src.models.geodesic import build_geodesic
from src.models.quadratic import (
    build_clean_quadratic,
    build_disordered_quadratic,
    build_h0,
    build_parallel_drive,
    build_rotated_quadratic,
)
from src.models.simplified import build_simplified
from src.models.spec import BuiltModel, ModelFamily, ModelSpec
from src.models.syk import build_sparse_syk, rescale_syk
from src.utils.exceptions import ConfigurationError
from src.utils.logger import model_logger


def build_model(spec: ModelSpec, seed: int = 0) -> BuiltModel:
    """
    构造充电哈密顿量 H₁

    Args:
        spec: 模型声明（n_cells 必须已设置）
        seed: 无序族使用的 64 位种子，其余族忽略

    Returns:
        BuiltModel；Geodesic 的哈密顿量为稠密矩阵，其余为 OperatorSum

    Raises:
        ConfigurationError: n_cells 未设置或族未知
    """
    if spec.n_cells is None:
        raise ConfigurationError("ModelSpec.n_cells must be set before building")
    n_cells = spec.n_cells
    family = spec.family

    if family == ModelFamily.ONSITE:
        return BuiltModel(spec, seed, build_h0(n_cells, spec.eps0))
    if family == ModelFamily.PARALLEL_DRIVE:
        return BuiltModel(spec, seed, build_parallel_drive(n_cells, spec.lambda0))
    if family == ModelFamily.CLEAN_QUADRATIC:
        return BuiltModel(spec, seed, build_clean_quadratic(n_cells))
    if family == ModelFamily.DISORDERED_QUADRATIC:
        return BuiltModel(spec, seed, *build_disordered_quadratic(spec, seed))
    if family == ModelFamily.ROTATED_QUADRATIC:
        return BuiltModel(spec, seed, *build_rotated_quadratic(spec, seed))
    if family == ModelFamily.SPARSE_SYK:
        return BuiltModel(spec, seed, *build_sparse_syk(spec, seed))
    if family == ModelFamily.RESCALED_SPARSE_SYK:
        hamiltonian, realization = build_sparse_syk(spec, seed)
        return BuiltModel(spec, seed, rescale_syk(hamiltonian, spec), realization)
    if family == ModelFamily.SIMPLIFIED_VK:
        return BuiltModel(spec, seed, *build_simplified(spec, seed))
    if family == ModelFamily.GEODESIC:
        # 延迟导入，避免与 charging 模块循环依赖
        from src.charging.state import ground_state, top_state
        h0 = build_h0(n_cells, spec.eps0)
        matrix = build_geodesic(h0, spec.geodesic_lambda, ground_state(n_cells), top_state(n_cells))
        return BuiltModel(spec, seed, matrix)

    model_logger.error(f"No builder registered for family {family}")
    raise ConfigurationError(f"Unknown model family: {family}")


__all__ = ['build_model']
