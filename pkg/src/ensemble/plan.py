"""
扫描计划
"""
from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple

from config.settings import settings
from src.charging.pipeline import DEFAULT_QUANTITIES, QUANTITIES
from src.ensemble.seeds import derive_seed
from src.models.spec import ModelSpec
from src.utils.exceptions import ConfigurationError


@dataclass(frozen=True)
class RealizationTask:
    """一次抽样任务"""
    n_cells: int
    realization: int
    seed: int


@dataclass(frozen=True)
class SweepPlan:
    """
    无序系综扫描计划

    Attributes:
        spec_template: 不含 N 的模型声明
        n_values: 严格递增的 N 列表
        realizations: 每个 N 的抽样数 R
        master_seed: 主种子
        target_fraction: τ 的目标功比例
        quantities: 需要记录的量
    """
    spec_template: ModelSpec
    n_values: Tuple[int, ...]
    realizations: int = 1
    master_seed: int = 0
    target_fraction: float = 1.0
    quantities: Tuple[str, ...] = DEFAULT_QUANTITIES
    dense_cap: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'n_values', tuple(int(n) for n in self.n_values))
        object.__setattr__(self, 'quantities', tuple(self.quantities))
        self.validate()

    def validate(self):
        """
        Raises:
            ConfigurationError: 计划不合法
        """
        if not self.n_values:
            raise ConfigurationError("Sweep needs at least one N value")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ConfigurationError(f"n_values must be strictly increasing, got {list(self.n_values)}")
        cap = settings.DENSE_CAP if self.dense_cap is None else self.dense_cap
        if self.n_values[0] < 1 or self.n_values[-1] > cap:
            raise ConfigurationError(f"n_values must lie in 1..{cap}, got {list(self.n_values)}")
        if self.realizations < 1:
            raise ConfigurationError(f"realizations must be >= 1, got {self.realizations}")
        if self.master_seed < 0:
            raise ConfigurationError("master_seed must be non-negative")
        if not 0.0 < self.target_fraction <= 1.0:
            raise ConfigurationError(f"target_fraction must lie in (0, 1], got {self.target_fraction}")
        unknown = set(self.quantities) - QUANTITIES
        if unknown:
            raise ConfigurationError(f"Unknown quantities: {sorted(unknown)}")
        for n_cells in self.n_values:
            self.spec_template.with_cells(n_cells)

    @property
    def total(self) -> int:
        return len(self.n_values) * self.realizations

    def tasks(self) -> Iterator[RealizationTask]:
        """按 (N, r) 顺序生成全部任务"""
        for n_cells in self.n_values:
            for index in range(self.realizations):
                yield RealizationTask(n_cells, index, derive_seed(self.master_seed, n_cells, index))


__all__ = ['SweepPlan', 'RealizationTask']
