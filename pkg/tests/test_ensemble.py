"""
测试种子派生、扫描计划、系综引擎、记录持久化与聚合
"""
import json
import math

import numpy as np
import pytest

from src.ensemble import engine as engine_module
from src.ensemble.aggregate import AGGREGATE_COLUMNS, aggregate_records, plot_table
from src.ensemble.engine import EnsembleEngine, run_realization, run_sweep
from src.ensemble.plan import RealizationTask, SweepPlan
from src.ensemble.records import SCHEMA_NAME, RecordStore
from src.ensemble.seeds import MIN_DIAGNOSTIC_SEEDS, derive_seed, seed_uniformity
from src.models.spec import ModelFamily, ModelSpec
from src.utils.exceptions import (
    ConfigurationError,
    RecordFormatError,
    SchemaVersionError,
    SweepFailedError,
    ValidationError,
)

PARALLEL = ModelSpec(ModelFamily.PARALLEL_DRIVE)


class TestSeeds:
    """种子派生测试"""

    def test_deterministic(self):
        """测试同一输入得到同一种子"""
        assert derive_seed(12345, 4, 7) == derive_seed(12345, 4, 7)

    def test_distinct(self):
        """测试不同 (N, r) 的种子互不相同"""
        seeds = {derive_seed(0, n, r) for n in range(1, 6) for r in range(20)}
        assert len(seeds) == 100
        assert all(0 <= seed < 2 ** 64 for seed in seeds)

    @pytest.mark.slow
    def test_no_collisions_over_million_pairs(self):
        """测试 10⁶ 个 (N, r) 组合的种子无碰撞"""
        seeds = {derive_seed(42, n, r) for n in range(1, 11) for r in range(100_000)}
        assert len(seeds) == 1_000_000

    def test_master_seed_matters(self):
        """测试主种子改变派生结果"""
        assert derive_seed(0, 3, 0) != derive_seed(1, 3, 0)

    def test_negative_should_raise(self):
        """测试负输入应该抛出异常"""
        with pytest.raises(ValidationError):
            derive_seed(-1, 3, 0)

    def test_uniformity(self):
        """测试派生种子的高位分布均匀"""
        seeds = [derive_seed(7, n, r) for n in range(1, 9) for r in range(100)]
        assert seed_uniformity(seeds) > 1e-4

    def test_uniformity_detects_bias(self):
        """测试高位集中的种子被识别"""
        assert seed_uniformity(list(range(MIN_DIAGNOSTIC_SEEDS))) < 1e-6

    def test_uniformity_invalid_should_raise(self):
        """测试桶数非法或样本太少应该抛出异常"""
        with pytest.raises(ValidationError):
            seed_uniformity([0] * 100, bins=12)
        with pytest.raises(ValidationError):
            seed_uniformity([0] * 10)


class TestSweepPlan:
    """扫描计划测试"""

    def test_tasks_order(self):
        """测试任务按 (N, r) 顺序生成"""
        plan = SweepPlan(PARALLEL, n_values=(2, 3), realizations=3, master_seed=9)
        tasks = list(plan.tasks())
        assert plan.total == 6
        assert [(t.n_cells, t.realization) for t in tasks] == [(2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (3, 2)]
        assert tasks[4].seed == derive_seed(9, 3, 1)

    @pytest.mark.parametrize('kwargs', [
        {'n_values': ()},
        {'n_values': (3, 2)},
        {'n_values': (2, 2)},
        {'n_values': (2, 20)},
        {'n_values': (2,), 'realizations': 0},
        {'n_values': (2,), 'master_seed': -1},
        {'n_values': (2,), 'target_fraction': 0.0},
        {'n_values': (2,), 'quantities': ('entropy',)},
    ])
    def test_invalid_plan_should_raise(self, kwargs):
        """测试非法计划应该抛出异常"""
        with pytest.raises(ConfigurationError):
            SweepPlan(PARALLEL, **kwargs)

    def test_template_checked_for_every_n(self):
        """测试模板对每个 N 都合法"""
        with pytest.raises(ConfigurationError):
            SweepPlan(ModelSpec(ModelFamily.SPARSE_SYK, q=4), n_values=(1, 2))


class TestEngine:
    """系综引擎测试"""

    def test_invalid_workers_should_raise(self):
        """测试并发数为 0 应该抛出异常"""
        with pytest.raises(ConfigurationError):
            EnsembleEngine(workers=0)

    def test_run_realization(self):
        """测试单个任务的记录"""
        task = RealizationTask(n_cells=2, realization=3, seed=derive_seed(0, 2, 3))
        record = run_realization('charge', PARALLEL, task, ('variance', 'advantage'), 1.0)
        assert record['realization'] == 3
        assert record['status'] == 'ok'
        assert record['error'] is None
        assert record['variance'] == pytest.approx(2.0)

    @pytest.mark.asyncio
    async def test_records_sorted(self):
        """测试记录按 (N, r) 排序"""
        plan = SweepPlan(ModelSpec(ModelFamily.DISORDERED_QUADRATIC), n_values=(1, 2), realizations=3,
                         quantities=('variance',))
        records = await EnsembleEngine(workers=3).run(plan, 'spectrum')
        assert [(r['n_cells'], r['realization']) for r in records] == [
            (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)
        ]

    @pytest.mark.asyncio
    async def test_unknown_kind_should_raise(self):
        """测试未知任务类型应该抛出异常"""
        plan = SweepPlan(PARALLEL, n_values=(1,))
        with pytest.raises(ConfigurationError):
            await EnsembleEngine(workers=1).run(plan, 'teleport')

    @pytest.mark.asyncio
    async def test_isolated_failure(self, monkeypatch):
        """测试少量失败被记录而不中断扫描"""
        original = engine_module.run_realization

        def flaky(kind, spec, task, quantities, target_fraction):
            if task.n_cells == 2 and task.realization == 0:
                raise RuntimeError("boom")
            return original(kind, spec, task, quantities, target_fraction)

        monkeypatch.setattr(engine_module, 'run_realization', flaky)
        plan = SweepPlan(PARALLEL, n_values=(1, 2), realizations=10, quantities=('variance',))
        records = await EnsembleEngine(workers=1).run(plan, 'charge')
        failed = [r for r in records if r['status'] == 'failed']
        assert len(records) == 20
        assert len(failed) == 1
        assert 'RuntimeError: boom' in failed[0]['error']

    @pytest.mark.asyncio
    async def test_too_many_failures_should_raise(self, monkeypatch):
        """测试失败比例超过阈值应该抛出异常"""
        def broken(*args):
            raise RuntimeError("boom")

        monkeypatch.setattr(engine_module, 'run_realization', broken)
        plan = SweepPlan(PARALLEL, n_values=(1, 2), realizations=2)
        with pytest.raises(SweepFailedError):
            await EnsembleEngine(workers=1).run(plan, 'charge')

    def test_run_sweep_deterministic(self):
        """测试同一计划两次运行逐位一致"""
        plan = SweepPlan(ModelSpec(ModelFamily.DISORDERED_QUADRATIC), n_values=(2, 3), realizations=2,
                         master_seed=5, quantities=('variance', 'gap'))
        first = run_sweep(plan, workers=1)
        second = run_sweep(plan, workers=2)
        assert first.records == second.records
        assert first.failed_count == 0

    def test_run_sweep_parallel_drive(self):
        """测试并行驱动扫描的聚合结果"""
        plan = SweepPlan(PARALLEL, n_values=(1, 2, 3), realizations=2, quantities=('variance', 'advantage'))
        result = run_sweep(plan, workers=1)
        variance = plot_table(result.aggregate, 'variance')
        assert variance['mean'].tolist() == pytest.approx([1.0, 2.0, 3.0])
        advantage = plot_table(result.aggregate, 'advantage')
        assert advantage['mean'].tolist() == pytest.approx([1.0, 1.0, 1.0], rel=1e-6)
        assert 'advantage_rom' in set(result.aggregate['quantity'])


class TestRecordStore:
    """记录持久化测试"""

    def test_round_trip(self, tmp_path):
        """测试写入后读回一致，nan 写为 null"""
        store = RecordStore(tmp_path / 'records.jsonl')
        records = [
            {'n_cells': 2, 'realization': 0, 'status': 'ok', 'variance': 1.5},
            {'n_cells': 2, 'realization': 1, 'status': 'degenerate', 'variance': math.nan},
        ]
        store.persist(records)
        header = json.loads((tmp_path / 'records.jsonl').read_text().splitlines()[0])
        assert header == {'schema': SCHEMA_NAME, 'version': 1}
        loaded = store.load()
        assert loaded[0] == records[0]
        assert loaded[1]['variance'] is None

    def test_empty_round_trip(self, tmp_path):
        """测试空记录集只写头部且读回为空"""
        store = RecordStore(tmp_path / 'records.jsonl')
        store.persist([])
        assert len((tmp_path / 'records.jsonl').read_text().splitlines()) == 1
        assert store.load() == []

    def test_large_round_trip_is_exact(self, tmp_path):
        """测试 10⁴ 条记录读回后浮点逐位一致"""
        rng = np.random.default_rng(3)
        records = [
            {
                'n_cells': 2 + i // 1000,
                'realization': i % 1000,
                'seed': derive_seed(1, 2 + i // 1000, i % 1000),
                'status': 'ok',
                'variance': float(rng.lognormal()),
                'tau': float(rng.random() * 1e-7),
                'degenerate': False,
            }
            for i in range(10_000)
        ]
        store = RecordStore(tmp_path / 'records.jsonl')
        store.persist(records)
        assert store.load() == records

    def test_empty_file_should_raise(self, tmp_path):
        """测试空文件应该抛出异常"""
        path = tmp_path / 'records.jsonl'
        path.write_text('')
        with pytest.raises(RecordFormatError, match="line 1"):
            RecordStore(path).load()

    def test_wrong_schema_should_raise(self, tmp_path):
        """测试错误的 schema 名应该抛出异常"""
        path = tmp_path / 'records.jsonl'
        path.write_text('{"schema": "prices", "version": 1}\n')
        with pytest.raises(RecordFormatError, match="unexpected schema"):
            RecordStore(path).load()

    def test_version_mismatch_should_raise(self, tmp_path):
        """测试版本不匹配应该抛出异常"""
        path = tmp_path / 'records.jsonl'
        path.write_text(json.dumps({'schema': SCHEMA_NAME, 'version': 2}) + '\n')
        with pytest.raises(SchemaVersionError):
            RecordStore(path).load()

    def test_bad_line_reports_number(self, tmp_path):
        """测试损坏的行报告行号"""
        path = tmp_path / 'records.jsonl'
        path.write_text(json.dumps({'schema': SCHEMA_NAME, 'version': 1}) + '\n{"n_cells": 2}\n{oops\n')
        with pytest.raises(RecordFormatError, match="line 3") as excinfo:
            RecordStore(path).load()
        assert excinfo.value.line_number == 3


class TestAggregate:
    """聚合测试"""

    @staticmethod
    def records():
        return [
            {'n_cells': 3, 'realization': 0, 'status': 'ok', 'variance': 1.0,
             'advantage': 2.0, 'tau': 1.0, 'baseline_tau': 2.0},
            {'n_cells': 3, 'realization': 1, 'status': 'ok', 'variance': 3.0,
             'advantage': 4.0, 'tau': 0.5, 'baseline_tau': 2.0},
            {'n_cells': 3, 'realization': 2, 'status': 'degenerate', 'variance': 0.0,
             'advantage': None, 'tau': None, 'baseline_tau': None},
            {'n_cells': 3, 'realization': 3, 'status': 'failed', 'error': 'RuntimeError: boom'},
        ]

    def test_columns(self):
        """测试输出列"""
        aggregate = aggregate_records(self.records(), ('variance', 'advantage'))
        assert list(aggregate.columns) == AGGREGATE_COLUMNS
        assert aggregate['quantity'].tolist() == ['variance', 'advantage', 'advantage_rom']

    def test_variance_keeps_degenerate(self):
        """测试方差包含退化样本，排除失败样本"""
        aggregate = aggregate_records(self.records(), ('variance',))
        row = aggregate.iloc[0]
        assert row['mean'] == pytest.approx(4.0 / 3.0)
        assert row['count'] == 3
        assert row['degenerate_count'] == 1
        assert row['failed_count'] == 1

    def test_advantage_excludes_degenerate(self):
        """测试比值量排除退化样本"""
        aggregate = aggregate_records(self.records(), ('advantage',))
        mor, rom = aggregate.iloc[0], aggregate.iloc[1]
        assert mor['mean'] == pytest.approx(3.0)
        assert mor['stderr'] == pytest.approx(1.0)
        assert mor['count'] == 2
        assert mor['count'] + mor['degenerate_count'] == 4
        assert rom['mean'] == pytest.approx(2.0 / 0.75)
        assert rom['count'] == 2

    def test_empty(self):
        """测试空记录"""
        aggregate = aggregate_records([], ('variance',))
        assert aggregate.empty
        assert list(aggregate.columns) == AGGREGATE_COLUMNS


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
