"""
模型声明
ModelSpec 描述一个哈密顿量族及其参数，DisorderRealization 记录一次无序抽样
"""
from dataclasses import dataclass, field, replace, asdict
from enum import Enum
from typing import Any, Dict, FrozenSet, Optional, Tuple, Union

import numpy as np

from src.algebra.pauli import OperatorSum
from src.utils.exceptions import ConfigurationError


class ModelFamily(str, Enum):
    """哈密顿量族"""
    ONSITE = 'Onsite'
    PARALLEL_DRIVE = 'ParallelDrive'
    CLEAN_QUADRATIC = 'CleanQuadratic'
    DISORDERED_QUADRATIC = 'DisorderedQuadratic'
    ROTATED_QUADRATIC = 'RotatedQuadratic'
    SPARSE_SYK = 'SparseSYK'
    RESCALED_SPARSE_SYK = 'RescaledSparseSYK'
    SIMPLIFIED_VK = 'SimplifiedVk'
    GEODESIC = 'Geodesic'


# 用到 q 的族
Q_FAMILIES = frozenset({
    ModelFamily.SPARSE_SYK,
    ModelFamily.RESCALED_SPARSE_SYK,
    ModelFamily.SIMPLIFIED_VK,
})

# 带稀疏掩码的族（α 有意义）
SPARSE_FAMILIES = Q_FAMILIES

# 抽样依赖 seed 的族
DISORDERED_FAMILIES = frozenset({
    ModelFamily.DISORDERED_QUADRATIC,
    ModelFamily.ROTATED_QUADRATIC,
    ModelFamily.SPARSE_SYK,
    ModelFamily.RESCALED_SPARSE_SYK,
    ModelFamily.SIMPLIFIED_VK,
})

# 由 Majorana 偶数乘积构成的族（与宇称对易）
PARITY_EVEN_FAMILIES = DISORDERED_FAMILIES | {ModelFamily.CLEAN_QUADRATIC}

_SPEC_KEYS = ('family', 'n_cells', 'q', 'alpha', 'eps0', 'lambda0', 'j', 'geodesic_lambda')


@dataclass(frozen=True)
class ModelSpec:
    """哈密顿量族的声明式描述；n_cells 为 None 时作为扫描模板使用"""
    family: ModelFamily
    n_cells: Optional[int] = None
    q: int = 2
    alpha: Optional[float] = None  # 缺省取 q（全连接）
    eps0: float = 1.0
    lambda0: float = 1.0
    j: float = 1.0
    geodesic_lambda: float = 1.0

    def __post_init__(self):
        if not isinstance(self.family, ModelFamily):
            try:
                object.__setattr__(self, 'family', ModelFamily(self.family))
            except ValueError:
                raise ConfigurationError(f"Unknown model family: {self.family}")
        if self.alpha is None:
            object.__setattr__(self, 'alpha', float(self.q))
        self.validate()

    @property
    def k(self) -> int:
        """简化模型的幂次 k = q/2"""
        return self.q // 2

    @property
    def x(self) -> float:
        """x = 1 - 2α/q"""
        return 1.0 - 2.0 * self.alpha / self.q

    def validate(self):
        """
        校验参数

        Raises:
            ConfigurationError: 参数非法
        """
        if self.n_cells is not None and (not isinstance(self.n_cells, int) or self.n_cells < 1):
            raise ConfigurationError(f"n_cells must be a positive integer, got {self.n_cells}")
        if not isinstance(self.q, int) or self.q < 2 or self.q % 2:
            raise ConfigurationError(f"q must be an even integer >= 2, got {self.q}")
        if not 0.0 <= self.alpha <= self.q:
            raise ConfigurationError(f"alpha must lie in [0, q={self.q}], got {self.alpha}")
        for name in ('eps0', 'lambda0', 'j', 'geodesic_lambda'):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be strictly positive")
        if (self.family in (ModelFamily.SPARSE_SYK, ModelFamily.RESCALED_SPARSE_SYK)
                and self.n_cells is not None and 2 * self.n_cells < self.q):
            raise ConfigurationError(
                f"SYK with q={self.q} needs at least {self.q} Majoranas, "
                f"got {2 * self.n_cells}"
            )

    def with_cells(self, n_cells: int) -> 'ModelSpec':
        return replace(self, n_cells=n_cells)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['family'] = self.family.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ModelSpec':
        """
        从配置字典构造

        Raises:
            ConfigurationError: 存在未知键或缺少 family
        """
        unknown = set(data) - set(_SPEC_KEYS)
        if unknown:
            raise ConfigurationError(f"Unknown model keys: {sorted(unknown)}")
        if 'family' not in data:
            raise ConfigurationError("Model configuration requires 'family'")
        return cls(**data)


@dataclass(frozen=True)
class DisorderRealization:
    """一次无序抽样"""
    family: ModelFamily
    n_cells: int
    seed: int
    couplings: Dict[Tuple[int, ...], float]
    mask: FrozenSet[Tuple[int, ...]]
    w: Optional[float] = None
    sparse: bool = False
    rotation: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @property
    def degenerate(self) -> bool:
        """稀疏族的空掩码样本"""
        return self.sparse and not self.mask


@dataclass
class BuiltModel:
    """build_model 的产物"""
    spec: ModelSpec
    seed: int
    hamiltonian: Union[OperatorSum, np.ndarray]
    realization: Optional[DisorderRealization] = None

    @property
    def degenerate(self) -> bool:
        return self.realization is not None and self.realization.degenerate


__all__ = [
    'ModelFamily',
    'ModelSpec',
    'DisorderRealization',
    'BuiltModel',
    'Q_FAMILIES',
    'SPARSE_FAMILIES',
    'DISORDERED_FAMILIES',
    'PARITY_EVEN_FAMILIES'
]
