"""
单次抽样的充电流水线
构造模型 → 谱分解 → 方差/谱宽/Bhatia-Davis → 功曲线与 τ → 与并行基线比较
"""
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np

from config.settings import settings
from src.charging.correlations import correlation_matrix, lambda_n
from src.charging.erratum import sandwich_fraction
from src.charging.evolution import evolve_work_curve, optimal_tau
from src.charging.observables import (
    advantage,
    bhatia_davis_slack,
    fubini_length,
    power_advantage,
)
from src.charging.spectral import Spectrum
from src.charging.state import ground_state
from src.models.factory import build_model
from src.models.quadratic import build_h0, build_parallel_drive
from src.models.spec import ModelFamily, ModelSpec
from src.models.syk import connection_count
from src.utils.exceptions import NoChargingError, ValidationError
from src.utils.logger import battery_logger

QUANTITIES = frozenset({
    'variance',
    'gap',
    'advantage',
    'connection_count',
    'lambda2',
    'sandwich_fraction',
})

DEFAULT_QUANTITIES = ('variance', 'gap', 'advantage')

# ΔH₁² 低于此值视为退化
ZERO_VARIANCE = 1e-12


@dataclass
class ChargingReport:
    """单次抽样的充电结果；无定义的量为 None"""
    family: str
    n_cells: int
    seed: int
    variance: float
    gap: float
    mu: float
    e_min: float
    e_max: float
    bhatia_slack: float
    degenerate: bool = False
    tau: Optional[float] = None
    work: Optional[float] = None
    power: Optional[float] = None
    length: Optional[float] = None
    baseline_tau: Optional[float] = None
    baseline_power: Optional[float] = None
    advantage: Optional[float] = None
    power_advantage: Optional[float] = None
    connection_count: Optional[int] = None
    lambda2: Optional[float] = None
    sandwich_fraction: Optional[float] = None

    @property
    def delta_h1(self) -> float:
        return math.sqrt(self.variance)

    def to_record(self) -> Dict[str, Any]:
        """扁平记录；nan 统一写成 None"""
        record = asdict(self)
        for key, value in record.items():
            if isinstance(value, float) and not math.isfinite(value):
                record[key] = None
        return record


class ChargingPipeline:
    """
    充电流水线

    并行基线只依赖 (N, ε₀, λ₀, f)，按此缓存；基态关联矩阵按 N 缓存。
    """

    def __init__(self, target_fraction: float = None, n_samples: int = None):
        self.target_fraction = (
            settings.DEFAULT_TARGET_FRACTION if target_fraction is None else target_fraction
        )
        self.n_samples = n_samples
        self._baselines: Dict[Tuple[int, float, float], ChargingReport] = {}
        self._correlations: Dict[int, Any] = {}

    def spectrum_row(self, spec: ModelSpec, seed: int) -> Dict[str, Any]:
        """谱极值与谱宽（spectrum 子命令）"""
        model = build_model(spec, seed)
        spectrum = Spectrum.of(model.hamiltonian)
        return {
            'family': spec.family.value,
            'n_cells': spec.n_cells,
            'seed': seed,
            'e_min': spectrum.e_min,
            'e_max': spectrum.e_max,
            'gap': spectrum.gap,
            'degenerate': model.degenerate,
        }

    def _charge(self, h0, spectrum: Spectrum, psi) -> Tuple[float, float]:
        curve = evolve_work_curve(h0, spectrum, psi, n_samples=self.n_samples, diagnostics=False)
        return optimal_tau(curve, self.target_fraction)

    def baseline(self, n_cells: int, eps0: float, lambda0: float) -> ChargingReport:
        """并行充电基线 H₁ = λ₀Σσˣ"""
        key = (n_cells, eps0, lambda0)
        cached = self._baselines.get(key)
        if cached is not None:
            return cached
        spec = ModelSpec(ModelFamily.PARALLEL_DRIVE, n_cells=n_cells, eps0=eps0, lambda0=lambda0)
        psi = ground_state(n_cells)
        spectrum = Spectrum.of(build_parallel_drive(n_cells, lambda0))
        report = self._base_report(spec, 0, spectrum, psi, degenerate=False)
        self._fill_charging(report, build_h0(n_cells, eps0), spectrum, psi)
        self._baselines[key] = report
        return report

    @staticmethod
    def _base_report(spec: ModelSpec, seed: int, spectrum: Spectrum, psi,
                     degenerate: bool) -> ChargingReport:
        mu, var = spectrum.moments(psi)
        return ChargingReport(
            family=spec.family.value,
            n_cells=spec.n_cells,
            seed=seed,
            variance=var,
            gap=spectrum.gap,
            mu=mu,
            e_min=spectrum.e_min,
            e_max=spectrum.e_max,
            bhatia_slack=bhatia_davis_slack(spectrum, psi),
            degenerate=degenerate or var <= ZERO_VARIANCE,
        )

    def _fill_charging(self, report: ChargingReport, h0, spectrum: Spectrum, psi):
        tau, work = self._charge(h0, spectrum, psi)
        report.tau = tau
        report.work = work
        report.power = work / tau if tau > 0 else None
        report.length = fubini_length(report.delta_h1, tau)

    def run(self, spec: ModelSpec, seed: int,
            quantities: Iterable[str] = DEFAULT_QUANTITIES) -> ChargingReport:
        """
        执行一次完整的充电分析

        Args:
            spec: 模型声明（n_cells 已设置）
            seed: 无序种子
            quantities: 需要计算的量，advantage 触发时间演化

        Returns:
            ChargingReport

        Raises:
            ValidationError: 请求了未知的量
        """
        quantities = set(quantities)
        unknown = quantities - QUANTITIES
        if unknown:
            raise ValidationError(f"Unknown quantities requested: {sorted(unknown)}")

        n_cells = spec.n_cells
        model = build_model(spec, seed)
        psi = ground_state(n_cells)
        spectrum = Spectrum.of(model.hamiltonian)
        report = self._base_report(spec, seed, spectrum, psi, degenerate=model.degenerate)

        if 'advantage' in quantities and not report.degenerate:
            try:
                self._fill_charging(report, build_h0(n_cells, spec.eps0), spectrum, psi)
            except NoChargingError:
                battery_logger.warning(f"{spec.family.value} N={n_cells} seed={seed}: no charging")
                report.degenerate = True
            else:
                base = self.baseline(n_cells, spec.eps0, spec.lambda0)
                report.baseline_tau = base.tau
                report.baseline_power = base.power
                report.advantage = advantage(base, report)
                report.power_advantage = power_advantage(base, report)

        if 'connection_count' in quantities and model.realization is not None:
            report.connection_count = connection_count(model.realization)

        if 'lambda2' in quantities and spec.family == ModelFamily.SIMPLIFIED_VK:
            correlations = self._correlations.get(n_cells)
            if correlations is None:
                correlations = correlation_matrix(psi, n_cells)
                self._correlations[n_cells] = correlations
            report.lambda2 = lambda_n(model.realization, correlations, 2)

        if 'sandwich_fraction' in quantities:
            hamiltonian = model.hamiltonian if not isinstance(model.hamiltonian, np.ndarray) else spectrum
            report.sandwich_fraction = sandwich_fraction(hamiltonian, spec.eps0, psi)

        battery_logger.debug(
            f"{spec.family.value} N={n_cells} seed={seed}: variance={report.variance:.6g} "
            f"tau={report.tau} degenerate={report.degenerate}"
        )
        return report


__all__ = [
    'ChargingReport',
    'ChargingPipeline',
    'QUANTITIES',
    'DEFAULT_QUANTITIES',
    'ZERO_VARIANCE'
]
