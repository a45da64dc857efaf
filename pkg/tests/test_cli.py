"""
测试运行配置、校验套件与命令行应用
"""
import json
from pathlib import Path

import pandas as pd
import pytest

from config.settings import settings
from src.algebra.pauli import PauliTerm
from src.cli import app as app_module
from src.cli import verify as verify_module
from src.cli.app import (
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    EXIT_SWEEP_FAILED,
    EXIT_VERIFY_FAILED,
    BatteryApp,
)
from src.cli.config import RunConfig
from src.cli.verify import SUITES, VerifyOptions, run_suites
from src.models.spec import ModelFamily
from src.utils.exceptions import ConfigurationError, SweepFailedError


@pytest.fixture
def app_settings(monkeypatch):
    """应用会改写全局资源配置，测试结束后恢复"""
    monkeypatch.setattr(settings, 'DENSE_CAP', settings.DENSE_CAP)
    monkeypatch.setattr(settings, 'WORKERS', settings.WORKERS)
    monkeypatch.delenv('BATTERY_WORKERS', raising=False)
    monkeypatch.delenv('BATTERY_DENSE_CAP', raising=False)
    return settings


def write_config(path: Path, data: dict) -> Path:
    path.write_text(json.dumps(data), encoding='utf-8')
    return path


def no_string_majorana(m: int, n_cells: int) -> PauliTerm:
    """缺少 σᶻ 串的错误映射"""
    cell = (m + 1) // 2
    bit = 1 << (cell - 1)
    return PauliTerm(1.0, bit, bit if m % 2 else 0, n_cells)


def imaginary_majorana(m: int, n_cells: int) -> PauliTerm:
    """系数为 i 的错误映射，γ² = -1"""
    from src.algebra.majorana import jw_majorana
    return jw_majorana(m, n_cells).scaled(1j)


class TestRunConfig:
    """运行配置测试"""

    def test_defaults(self, app_settings):
        """测试缺省配置"""
        config = RunConfig.from_dict({})
        assert config.model.family is ModelFamily.DISORDERED_QUADRATIC
        assert config.output_format == 'csv'
        assert config.plan.total == len(config.n_values) * config.realizations
        assert config.verify_realizations == 50

    def test_full_config(self, app_settings):
        """测试完整配置"""
        config = RunConfig.from_dict({
            'model': {'family': 'SparseSYK', 'q': 4, 'alpha': 3.0},
            'sweep': {'n_values': [2, 3, 4], 'realizations': 5, 'master_seed': 11,
                      'quantities': ['variance', 'connection_count']},
            'output': {'dir': 'results', 'format': 'jsonl'},
            'runtime': {'workers': 2, 'dense_cap': 8},
            'fit': {'tolerance': 0.2, 'quantities': ['variance']},
            'verify': {'suites': ['algebra'], 'realizations': 3},
        })
        assert config.model.q == 4
        assert config.n_values == (2, 3, 4)
        assert config.output_dir == Path('results')
        assert config.workers == 2
        assert config.dense_cap == 8
        assert config.fit_quantities == ('variance',)
        assert config.verify_suites == ('algebra',)

    def test_round_trip(self, app_settings):
        """测试回显配置可以读回"""
        config = RunConfig.from_dict({'model': {'family': 'Geodesic'}, 'sweep': {'n_values': [2, 3, 4]}})
        assert RunConfig.from_dict(config.to_dict()) == config

    @pytest.mark.parametrize('data,message', [
        ({'plugins': {}}, 'Unknown configuration sections'),
        ({'sweep': {'n_valuez': [1]}}, "Unknown keys in 'sweep'"),
        ({'output': {'format': 'xml'}}, 'format must be one of'),
        ({'runtime': {'workers': 0}}, 'workers must be'),
        ({'runtime': {'dense_cap': 20}}, 'dense_cap must lie'),
        ({'sweep': {'n_values': [4, 3]}}, 'strictly increasing'),
        ({'model': {'family': 'Teleporter'}}, 'Unknown model family'),
        ({'verify': {'suites': ['astrology']}}, 'Unknown verify suites'),
        ({'sweep': 'everything'}, 'must be an object'),
    ])
    def test_invalid_config_should_raise(self, app_settings, data, message):
        """测试非法配置应该抛出异常"""
        with pytest.raises(ConfigurationError, match=message):
            RunConfig.from_dict(data)

    def test_environment_overrides_file(self, app_settings, monkeypatch):
        """测试环境变量优先于配置文件"""
        monkeypatch.setenv('BATTERY_WORKERS', '3')
        monkeypatch.setattr(settings, 'WORKERS', 3)
        config = RunConfig.from_dict({'runtime': {'workers': 2}})
        assert config.workers == 3

    def test_command_line_overrides(self, app_settings):
        """测试命令行参数覆盖"""
        config = RunConfig().with_overrides(seed=5, workers=2, output_format='jsonl', out='elsewhere')
        assert config.master_seed == 5
        assert config.workers == 2
        assert config.output_format == 'jsonl'
        assert config.output_dir == Path('elsewhere')

    def test_from_file_errors(self, app_settings, tmp_path):
        """测试文件缺失与非法 JSON"""
        with pytest.raises(ConfigurationError, match="not found"):
            RunConfig.from_file(tmp_path / 'missing.json')
        broken = tmp_path / 'broken.json'
        broken.write_text('{"model": ')
        with pytest.raises(ConfigurationError, match="not valid JSON"):
            RunConfig.from_file(broken)


class TestVerifySuites:
    """校验套件测试"""

    def test_algebra_and_ground_state_pass(self):
        """测试代数与基态套件通过"""
        results = run_suites(['algebra', 'ground_state'], VerifyOptions(max_cells=4))
        assert [r.name for r in results] == ['algebra', 'ground_state']
        assert all(r.passed for r in results)
        assert all(r.checks > 0 for r in results)

    @pytest.mark.parametrize('majorana', [no_string_majorana, imaginary_majorana])
    def test_broken_majorana_map_fails(self, majorana):
        """测试错误的 Majorana 映射被检测出来"""
        [result] = run_suites(['algebra'], VerifyOptions(max_cells=3, majorana=majorana))
        assert not result.passed
        assert result.failures

    def test_parallel_closed_form(self):
        """测试并行驱动闭式解套件"""
        [result] = run_suites(['parallel_closed_form'])
        assert result.passed, result.failures

    def test_erratum(self):
        """测试夹心矩恒等式套件"""
        [result] = run_suites(['erratum'], VerifyOptions(realizations=2))
        assert result.passed, result.failures

    @pytest.mark.slow
    def test_erratum_default_realizations(self):
        """测试缺省参数下恒等式覆盖 50 个抽样的每个单元"""
        assert VerifyOptions().realizations == 50
        [result] = run_suites(['erratum'])
        assert result.passed, result.failures
        assert result.checks >= 50 * 4

    @pytest.mark.slow
    def test_geodesic(self):
        """测试测地线套件"""
        [result] = run_suites(['geodesic'])
        assert result.passed, result.failures

    @pytest.mark.slow
    def test_inequality_suites(self):
        """测试 Bhatia-Davis 与累积量套件"""
        options = VerifyOptions(realizations=2, n_values=(3, 4))
        results = run_suites(['bhatia_davis', 'cumulant'], options)
        for result in results:
            assert result.passed, result.failures

    def test_crashing_suite_is_reported(self, monkeypatch):
        """测试套件内部异常记为失败"""
        def crash(options):
            raise RuntimeError("boom")

        monkeypatch.setitem(verify_module.SUITES, 'algebra', crash)
        [result] = run_suites(['algebra'])
        assert not result.passed
        assert 'boom' in result.failures[0]

    def test_suite_row(self):
        """测试套件结果行"""
        [result] = run_suites(['ground_state'])
        row = result.to_row()
        assert row['suite'] == 'ground_state'
        assert row['passed'] is True
        assert row['failures'] == ''
        assert set(SUITES) >= {'algebra', 'erratum', 'geodesic'}


class TestBatteryApp:
    """命令行应用测试"""

    def test_verify_command(self, app_settings, tmp_path):
        """测试 verify 子命令"""
        config = write_config(tmp_path / 'config.json', {'verify': {'suites': ['algebra'], 'max_cells': 3}})
        out = tmp_path / 'out'
        code = BatteryApp().run(['verify', '--config', str(config), '--out', str(out)])
        assert code == EXIT_OK
        assert (out / 'config.json').exists()
        table = pd.read_csv(out / 'verify.csv')
        assert table['suite'].tolist() == ['algebra']

    def test_verify_failure_exit_code(self, app_settings, tmp_path, monkeypatch):
        """测试校验失败返回 1"""
        monkeypatch.setitem(verify_module.SUITES, 'algebra', lambda options: verify_module.SuiteResult(
            'algebra', checks=1, failures=['forced']))
        config = write_config(tmp_path / 'config.json', {'verify': {'suites': ['algebra']}})
        code = BatteryApp().run(['verify', '--config', str(config), '--out', str(tmp_path / 'out')])
        assert code == EXIT_VERIFY_FAILED

    def test_charge_command(self, app_settings, tmp_path):
        """测试 charge 子命令写出记录与聚合表"""
        config = write_config(tmp_path / 'config.json', {
            'model': {'family': 'ParallelDrive'},
            'sweep': {'n_values': [1, 2, 3], 'realizations': 1, 'quantities': ['variance', 'advantage']},
        })
        out = tmp_path / 'out'
        code = BatteryApp().run(['charge', '--config', str(config), '--out', str(out), '--format', 'jsonl'])
        assert code == EXIT_OK
        assert (out / 'records.jsonl').exists()
        aggregate = pd.read_json(out / 'aggregate.jsonl', lines=True)
        variance = aggregate[aggregate['quantity'] == 'variance']['mean'].tolist()
        assert variance == pytest.approx([1.0, 2.0, 3.0])

    def test_spectrum_command(self, app_settings, tmp_path):
        """测试 spectrum 子命令"""
        config = write_config(tmp_path / 'config.json', {
            'model': {'family': 'DisorderedQuadratic'},
            'sweep': {'n_values': [2, 3], 'realizations': 2},
        })
        out = tmp_path / 'out'
        assert BatteryApp().run(['spectrum', '--config', str(config), '--out', str(out)]) == EXIT_OK
        table = pd.read_csv(out / 'spectrum.csv')
        assert len(table) == 4
        assert (table['gap'] >= 0).all()

    def test_sweep_and_fit_geodesic(self, app_settings, tmp_path):
        """测试 sweep 与 fit 对测地线族给出通过的判定"""
        config = write_config(tmp_path / 'config.json', {
            'model': {'family': 'Geodesic'},
            'sweep': {'n_values': [2, 3, 4, 5], 'realizations': 1,
                      'quantities': ['variance', 'gap', 'advantage']},
        })
        out = tmp_path / 'out'
        assert BatteryApp().run(['sweep', '--config', str(config), '--out', str(out)]) == EXIT_OK
        verdicts = pd.read_csv(out / 'verdicts.csv')
        assert set(verdicts['quantity']) == {'variance', 'gap', 'advantage'}
        assert verdicts['passed'].all()
        assert verdicts['group_passed'].all()
        advantage_rows = verdicts[verdicts['quantity'] == 'advantage']
        assert sorted(advantage_rows['column']) == ['advantage', 'advantage_rom']
        assert (out / 'plot' / 'variance.csv').exists()
        assert (out / 'plot' / 'advantage_rom.csv').exists()

        assert BatteryApp().run(['fit', '--config', str(config), '--out', str(out)]) == EXIT_OK

    def test_fit_without_records(self, app_settings, tmp_path):
        """测试没有记录时 fit 返回配置错误"""
        code = BatteryApp().run(['fit', '--out', str(tmp_path / 'empty')])
        assert code == EXIT_CONFIG_ERROR

    def test_fit_with_corrupt_records(self, app_settings, tmp_path):
        """测试损坏的记录文件返回配置错误"""
        out = tmp_path / 'out'
        out.mkdir()
        (out / 'records.jsonl').write_text('not json\n')
        assert BatteryApp().run(['fit', '--out', str(out)]) == EXIT_CONFIG_ERROR

    def test_bad_config_exit_code(self, app_settings, tmp_path):
        """测试非法配置返回 2"""
        config = write_config(tmp_path / 'config.json', {'sweep': {'realizations': 0}})
        assert BatteryApp().run(['charge', '--config', str(config), '--out', str(tmp_path)]) == EXIT_CONFIG_ERROR

    def test_sweep_failure_exit_code(self, app_settings, tmp_path, monkeypatch):
        """测试扫描失败返回 3"""
        def failing(plan, kind='charge', workers=None):
            raise SweepFailedError("3 of 4 realizations failed")

        monkeypatch.setattr(app_module, 'run_sweep', failing)
        assert BatteryApp().run(['charge', '--out', str(tmp_path)]) == EXIT_SWEEP_FAILED

    def test_seed_override_echoed(self, app_settings, tmp_path):
        """测试 --seed 写入配置回显"""
        config = write_config(tmp_path / 'config.json', {'verify': {'suites': ['algebra'], 'max_cells': 2}})
        out = tmp_path / 'out'
        BatteryApp().run(['verify', '--config', str(config), '--out', str(out), '--seed', '77'])
        echoed = json.loads((out / 'config.json').read_text())
        assert echoed['sweep']['master_seed'] == 77

    def test_unknown_command_exits(self):
        """测试未知子命令由 argparse 以 2 退出"""
        with pytest.raises(SystemExit) as excinfo:
            BatteryApp().run(['dance'])
        assert excinfo.value.code == 2


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
