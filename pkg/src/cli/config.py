"""
运行配置
单个 JSON 文件描述一次运行；环境变量只覆盖并发数与稠密上限，命令行参数优先级最高
"""
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from config.settings import settings
from src.charging.pipeline import DEFAULT_QUANTITIES
from src.ensemble.plan import SweepPlan
from src.models.spec import ModelFamily, ModelSpec
from src.utils.exceptions import ConfigurationError

OUTPUT_FORMATS = ('csv', 'jsonl')

_SECTIONS = {
    'model': None,  # 由 ModelSpec.from_dict 校验
    'sweep': {'n_values', 'realizations', 'master_seed', 'target_fraction', 'quantities'},
    'output': {'dir', 'format'},
    'runtime': {'workers', 'dense_cap'},
    'fit': {'tolerance', 'quantities'},
    'verify': {'suites', 'realizations', 'n_values', 'max_cells'},
}


def _check_keys(section: str, data: Dict[str, Any]):
    if not isinstance(data, dict):
        raise ConfigurationError(f"Section '{section}' must be an object")
    allowed = _SECTIONS[section]
    if allowed is None:
        return
    unknown = set(data) - allowed
    if unknown:
        raise ConfigurationError(f"Unknown keys in '{section}': {sorted(unknown)}")


@dataclass(frozen=True)
class RunConfig:
    """
    一次运行的全部参数

    Attributes:
        model: 模型模板（不含 N）
        n_values / realizations / master_seed / target_fraction / quantities: 扫描计划
        output_dir / output_format: 输出位置与表格格式
        workers / dense_cap: 运行时资源
        fit_tolerance / fit_quantities: 指数比较
        verify_suites / verify_realizations / verify_n_values / verify_max_cells: 校验套件
    """
    model: ModelSpec = field(default_factory=lambda: ModelSpec(ModelFamily.DISORDERED_QUADRATIC))
    n_values: Tuple[int, ...] = (3, 4, 5, 6)
    realizations: int = 10
    master_seed: int = 0
    target_fraction: float = 1.0
    quantities: Tuple[str, ...] = DEFAULT_QUANTITIES
    output_dir: Path = Path('output')
    output_format: str = 'csv'
    workers: int = 1
    dense_cap: int = 12
    fit_tolerance: float = 0.3
    fit_quantities: Optional[Tuple[str, ...]] = None
    verify_suites: Optional[Tuple[str, ...]] = None
    verify_realizations: int = 50
    verify_n_values: Tuple[int, ...] = (3, 4, 5)
    verify_max_cells: int = 6

    def __post_init__(self):
        self.validate()

    def validate(self):
        """
        Raises:
            ConfigurationError: 任一参数非法
        """
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigurationError(f"format must be one of {OUTPUT_FORMATS}, got {self.output_format!r}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        if not 1 <= self.dense_cap <= 14:
            raise ConfigurationError(f"dense_cap must lie in 1..14, got {self.dense_cap}")
        if self.fit_tolerance <= 0:
            raise ConfigurationError("fit tolerance must be positive")
        if self.verify_realizations < 1 or self.verify_max_cells < 1:
            raise ConfigurationError("verify realizations and max_cells must be positive")
        if self.verify_suites is not None:
            # 延迟导入，verify 依赖整个包
            from src.cli.verify import SUITES
            unknown = set(self.verify_suites) - set(SUITES)
            if unknown:
                raise ConfigurationError(f"Unknown verify suites: {sorted(unknown)}")
        self.plan

    @property
    def plan(self) -> SweepPlan:
        return SweepPlan(
            spec_template=self.model,
            n_values=self.n_values,
            realizations=self.realizations,
            master_seed=self.master_seed,
            target_fraction=self.target_fraction,
            quantities=self.quantities,
            dense_cap=self.dense_cap,
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        """
        从配置字典构造；未知段或未知键一律拒绝

        Raises:
            ConfigurationError: 结构或取值非法
        """
        if not isinstance(data, dict):
            raise ConfigurationError("Configuration root must be an object")
        unknown = set(data) - set(_SECTIONS)
        if unknown:
            raise ConfigurationError(f"Unknown configuration sections: {sorted(unknown)}")
        for section, body in data.items():
            _check_keys(section, body)

        sweep = data.get('sweep', {})
        output = data.get('output', {})
        runtime = data.get('runtime', {})
        fit = data.get('fit', {})
        verify = data.get('verify', {})
        defaults = cls.__dataclass_fields__

        def pick(section: Dict[str, Any], key: str, name: str):
            if key in section:
                return section[key]
            default = defaults[name]
            return default.default_factory() if callable(default.default_factory) else default.default

        workers = settings.WORKERS if 'BATTERY_WORKERS' in os.environ else runtime.get('workers', settings.WORKERS)
        dense_cap = settings.DENSE_CAP if 'BATTERY_DENSE_CAP' in os.environ else runtime.get('dense_cap', settings.DENSE_CAP)

        try:
            return cls(
                model=ModelSpec.from_dict(data['model']) if 'model' in data else pick({}, 'model', 'model'),
                n_values=tuple(pick(sweep, 'n_values', 'n_values')),
                realizations=int(pick(sweep, 'realizations', 'realizations')),
                master_seed=int(pick(sweep, 'master_seed', 'master_seed')),
                target_fraction=float(pick(sweep, 'target_fraction', 'target_fraction')),
                quantities=tuple(pick(sweep, 'quantities', 'quantities')),
                output_dir=Path(pick(output, 'dir', 'output_dir')),
                output_format=pick(output, 'format', 'output_format'),
                workers=int(workers),
                dense_cap=int(dense_cap),
                fit_tolerance=float(fit.get('tolerance', settings.FIT_TOLERANCE)),
                fit_quantities=tuple(fit['quantities']) if 'quantities' in fit else None,
                verify_suites=tuple(verify['suites']) if 'suites' in verify else None,
                verify_realizations=int(pick(verify, 'realizations', 'verify_realizations')),
                verify_n_values=tuple(pick(verify, 'n_values', 'verify_n_values')),
                verify_max_cells=int(pick(verify, 'max_cells', 'verify_max_cells')),
            )
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid configuration value: {e}")

    @classmethod
    def from_file(cls, path) -> 'RunConfig':
        """
        Raises:
            ConfigurationError: 文件不存在或不是合法 JSON
        """
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding='utf-8'))
        except FileNotFoundError:
            raise ConfigurationError(f"Configuration file not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Configuration file {path} is not valid JSON: {e}")
        return cls.from_dict(data)

    def with_overrides(self, seed: Optional[int] = None, workers: Optional[int] = None,
                       output_format: Optional[str] = None, out: Optional[str] = None) -> 'RunConfig':
        """命令行参数覆盖"""
        changes: Dict[str, Any] = {}
        if seed is not None:
            changes['master_seed'] = seed
        if workers is not None:
            changes['workers'] = workers
        if output_format is not None:
            changes['output_format'] = output_format
        if out is not None:
            changes['output_dir'] = Path(out)
        return replace(self, **changes) if changes else self

    def to_dict(self) -> Dict[str, Any]:
        """可回读的配置回显"""
        model = self.model.to_dict()
        model.pop('n_cells', None)
        data = {
            'model': model,
            'sweep': {
                'n_values': list(self.n_values),
                'realizations': self.realizations,
                'master_seed': self.master_seed,
                'target_fraction': self.target_fraction,
                'quantities': list(self.quantities),
            },
            'output': {'dir': str(self.output_dir), 'format': self.output_format},
            'runtime': {'workers': self.workers, 'dense_cap': self.dense_cap},
            'fit': {'tolerance': self.fit_tolerance},
            'verify': {
                'realizations': self.verify_realizations,
                'n_values': list(self.verify_n_values),
                'max_cells': self.verify_max_cells,
            },
        }
        if self.fit_quantities is not None:
            data['fit']['quantities'] = list(self.fit_quantities)
        if self.verify_suites is not None:
            data['verify']['suites'] = list(self.verify_suites)
        return data


__all__ = ['RunConfig', 'OUTPUT_FORMATS']
