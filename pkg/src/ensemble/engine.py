"""
系综引擎
并发执行所有 (N, r) 抽样，按 (N, r) 合并结果，与完成顺序无关
"""
import asyncio
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from config.settings import settings
from src.charging.pipeline import ChargingPipeline
from src.ensemble.aggregate import aggregate_records
from src.ensemble.plan import RealizationTask, SweepPlan
from src.ensemble.seeds import MIN_DIAGNOSTIC_SEEDS, seed_uniformity
from src.models.spec import ModelSpec
from src.utils.exceptions import ConfigurationError, SweepFailedError
from src.utils.logger import ensemble_logger

TASK_KINDS = ('charge', 'spectrum')

# 每个进程内按 target_fraction 复用流水线（并行基线缓存随之复用）
_PIPELINES: Dict[float, ChargingPipeline] = {}


def _pipeline(target_fraction: float) -> ChargingPipeline:
    pipeline = _PIPELINES.get(target_fraction)
    if pipeline is None:
        pipeline = ChargingPipeline(target_fraction=target_fraction)
        _PIPELINES[target_fraction] = pipeline
    return pipeline


def run_realization(kind: str, spec: ModelSpec, task: RealizationTask,
                    quantities: Tuple[str, ...], target_fraction: float) -> Dict[str, Any]:
    """
    执行单个抽样任务（可在子进程中运行）

    Returns:
        扁平记录，status 为 'ok' 或 'degenerate'
    """
    concrete = spec.with_cells(task.n_cells)
    pipeline = _pipeline(target_fraction)
    if kind == 'spectrum':
        record = pipeline.spectrum_row(concrete, task.seed)
    else:
        record = pipeline.run(concrete, task.seed, quantities).to_record()
    record['realization'] = task.realization
    record['status'] = 'degenerate' if record['degenerate'] else 'ok'
    record['error'] = None
    return record


def _failed_record(spec: ModelSpec, task: RealizationTask, error: Exception) -> Dict[str, Any]:
    return {
        'family': spec.family.value,
        'n_cells': task.n_cells,
        'seed': task.seed,
        'realization': task.realization,
        'degenerate': True,
        'status': 'failed',
        'error': f"{type(error).__name__}: {error}",
    }


@dataclass
class SweepResult:
    """扫描结果：原始记录 + 聚合表"""
    records: List[Dict[str, Any]]
    aggregate: pd.DataFrame

    @property
    def failed_count(self) -> int:
        return sum(1 for record in self.records if record['status'] == 'failed')


class EnsembleEngine:
    """系综扫描引擎"""

    def __init__(self, workers: Optional[int] = None):
        """
        Args:
            workers: 并发数，缺省取 settings.WORKERS；为 1 时在本进程内执行
        """
        self.workers = settings.WORKERS if workers is None else workers
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")

    async def _run_one(self, semaphore: asyncio.Semaphore, executor: Optional[Executor],
                       kind: str, plan: SweepPlan, task: RealizationTask) -> Dict[str, Any]:
        async with semaphore:
            loop = asyncio.get_running_loop()
            try:
                return await loop.run_in_executor(
                    executor, run_realization,
                    kind, plan.spec_template, task, plan.quantities, plan.target_fraction,
                )
            except Exception as e:
                ensemble_logger.error(
                    f"Realization N={task.n_cells} r={task.realization} seed={task.seed} failed: {e}",
                    exc_info=True
                )
                return _failed_record(plan.spec_template, task, e)

    async def run(self, plan: SweepPlan, kind: str = 'charge') -> List[Dict[str, Any]]:
        """
        执行扫描

        Args:
            plan: 扫描计划
            kind: 'charge' 或 'spectrum'

        Returns:
            按 (N, r) 排序的记录

        Raises:
            SweepFailedError: 失败比例超过 SWEEP_FAILURE_THRESHOLD
        """
        if kind not in TASK_KINDS:
            raise ConfigurationError(f"Unknown task kind: {kind}")

        ensemble_logger.info(
            f"Starting {kind} sweep: {plan.spec_template.family.value}, "
            f"N={list(plan.n_values)}, R={plan.realizations}, workers={self.workers}"
        )
        semaphore = asyncio.Semaphore(self.workers)
        executor = ProcessPoolExecutor(max_workers=self.workers) if self.workers > 1 else None
        try:
            results = await asyncio.gather(*[
                self._run_one(semaphore, executor, kind, plan, task)
                for task in plan.tasks()
            ])
        finally:
            if executor is not None:
                executor.shutdown(wait=True)

        records = sorted(results, key=lambda record: (record['n_cells'], record['realization']))
        failed = sum(1 for record in records if record['status'] == 'failed')
        if failed > settings.SWEEP_FAILURE_THRESHOLD * len(records):
            ensemble_logger.error(f"Sweep failed: {failed}/{len(records)} realizations errored")
            raise SweepFailedError(
                f"{failed} of {len(records)} realizations failed "
                f"(threshold {settings.SWEEP_FAILURE_THRESHOLD:.0%})"
            )
        if failed:
            ensemble_logger.warning(f"{failed}/{len(records)} realizations failed and were skipped")
        if len(records) >= MIN_DIAGNOSTIC_SEEDS:
            p_value = seed_uniformity([record['seed'] for record in records])
            if p_value < settings.SEED_UNIFORMITY_PVALUE:
                ensemble_logger.warning(f"Derived seeds look non-uniform (chi-square p={p_value:.2e})")
        ensemble_logger.info(f"Sweep finished: {len(records)} records")
        return records


# 创建全局实例
ensemble_engine = EnsembleEngine()


def run_sweep(plan: SweepPlan, kind: str = 'charge', workers: Optional[int] = None) -> SweepResult:
    """
    同步入口：执行扫描并聚合

    Args:
        plan: 扫描计划
        kind: 'charge' 或 'spectrum'
        workers: 覆盖并发数

    Returns:
        SweepResult
    """
    engine = ensemble_engine if workers is None else EnsembleEngine(workers)
    records = asyncio.run(engine.run(plan, kind))
    quantities = ('gap',) if kind == 'spectrum' else plan.quantities
    return SweepResult(records=records, aggregate=aggregate_records(records, quantities))


__all__ = [
    'EnsembleEngine',
    'ensemble_engine',
    'SweepResult',
    'run_sweep',
    'run_realization',
    'TASK_KINDS'
]
