"""
命令行应用
子命令 spectrum | charge | sweep | fit | verify

退出码: 0 成功，1 校验/拟合未通过，2 配置错误，3 扫描失败
"""
import argparse
import json
import math
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd

from config.settings import settings
from src.cli.config import OUTPUT_FORMATS, RunConfig
from src.cli.verify import VerifyOptions, run_suites
from src.ensemble.aggregate import aggregate_records, plot_table
from src.ensemble.engine import run_sweep
from src.ensemble.records import RecordStore
from src.scaling.fit import MIN_POINTS, fit_power_law
from src.scaling.predictions import prediction_for
from src.scaling.verdicts import VERDICT_COLUMNS, Verdict, compare, compare_advantage
from src.utils.exceptions import (
    BatteryError,
    ConfigurationError,
    RecordFormatError,
    SweepFailedError,
    ValidationError,
)
from src.utils.logger import battery_logger

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_SWEEP_FAILED = 3

COMMANDS = ('spectrum', 'charge', 'sweep', 'fit', 'verify')

RECORDS_FILE = 'records.jsonl'


def write_table(frame: pd.DataFrame, directory: Path, stem: str, fmt: str) -> Path:
    """按 csv 或 jsonl 写出表格"""
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{stem}.{fmt}"
    if fmt == 'csv':
        frame.to_csv(path, index=False)
    else:
        frame.to_json(path, orient='records', lines=True)
    return path


def _points(aggregate: pd.DataFrame, quantity: str):
    table = plot_table(aggregate, quantity)
    counts = aggregate[aggregate['quantity'] == quantity]['count'].to_numpy()
    points = []
    for (_, row), count in zip(table.iterrows(), counts):
        mean = row['mean']
        if count > 0 and math.isfinite(mean) and mean > 0:
            points.append((float(row['n_cells']), float(mean), float(row['stderr'])))
    return points


def fit_aggregate(aggregate: pd.DataFrame, config: RunConfig) -> List[Verdict]:
    """
    对聚合表中的每个量拟合指数并与预测比较

    点数不足或没有预测的量只记日志，不产生判定。
    """
    spec = config.model
    quantities = config.fit_quantities or config.quantities
    verdicts = []
    for quantity in quantities:
        try:
            prediction = prediction_for(spec.family, quantity, spec)
        except ValidationError as e:
            battery_logger.info(f"Skipping fit of {quantity}: {e}")
            continue

        points = _points(aggregate, quantity)
        if len(points) < MIN_POINTS:
            battery_logger.warning(f"Skipping fit of {quantity}: only {len(points)} usable points")
            continue

        if quantity == 'advantage':
            rom_points = _points(aggregate, 'advantage_rom')
            if len(rom_points) >= MIN_POINTS:
                verdicts.extend(compare_advantage(
                    fit_power_law(points), fit_power_law(rom_points), prediction, config.fit_tolerance
                ))
                continue
        verdicts.append(compare(fit_power_law(points), prediction, config.fit_tolerance))

    for verdict in verdicts:
        battery_logger.info(
            f"{verdict.quantity} [{verdict.column}]: fitted {verdict.fitted:.3f} ± {verdict.fitted_stderr:.3f}, "
            f"predicted {verdict.predicted:.3f} -> {'PASS' if verdict.group_passed else 'FAIL'}"
        )
    return verdicts


class BatteryApp:
    """命令行应用"""

    def __init__(self):
        self.parser = self.build_parser()

    @staticmethod
    def build_parser() -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog='main.py',
            description='Quantum battery charging simulations over SYK-type Hamiltonians',
        )
        parser.add_argument('command', choices=COMMANDS)
        parser.add_argument('--config', help='JSON run configuration')
        parser.add_argument('--out', help='output directory')
        parser.add_argument('--seed', type=int, help='master seed (unsigned 64-bit)')
        parser.add_argument('--workers', type=int, help='concurrent realizations')
        parser.add_argument('--format', choices=OUTPUT_FORMATS, dest='output_format', help='table format')
        return parser

    def load_config(self, args: argparse.Namespace) -> RunConfig:
        config = RunConfig.from_file(args.config) if args.config else RunConfig()
        config = config.with_overrides(
            seed=args.seed, workers=args.workers, output_format=args.output_format, out=args.out
        )
        if config.master_seed >= 1 << 64:
            raise ConfigurationError("master seed must fit in 64 bits")
        settings.DENSE_CAP = config.dense_cap
        settings.WORKERS = config.workers
        if settings.DEBUG:
            settings.display(battery_logger)
        return config

    def echo_config(self, config: RunConfig):
        config.output_dir.mkdir(parents=True, exist_ok=True)
        path = config.output_dir / 'config.json'
        path.write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + '\n', encoding='utf-8')

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """
        解析参数并执行子命令

        Returns:
            进程退出码
        """
        args = self.parser.parse_args(argv)
        try:
            settings.validate()
            config = self.load_config(args)
            self.echo_config(config)
            handler = getattr(self, f"cmd_{args.command}")
            return handler(config)
        except ConfigurationError as e:
            battery_logger.error(f"Configuration error: {e}")
            return EXIT_CONFIG_ERROR
        except RecordFormatError as e:
            battery_logger.error(f"Cannot read records: {e}")
            return EXIT_CONFIG_ERROR
        except SweepFailedError as e:
            battery_logger.error(f"Sweep failed: {e}")
            return EXIT_SWEEP_FAILED
        except BatteryError as e:
            battery_logger.error(f"{args.command} failed: {e}", exc_info=True)
            return EXIT_VERIFY_FAILED

    # ------------------------------------------------------------------
    # 子命令
    # ------------------------------------------------------------------
    def cmd_spectrum(self, config: RunConfig) -> int:
        """逐抽样输出谱极值与谱宽"""
        result = run_sweep(config.plan, kind='spectrum', workers=config.workers)
        frame = pd.DataFrame(result.records)
        path = write_table(frame, config.output_dir, 'spectrum', config.output_format)
        battery_logger.info(f"Spectrum table written to {path}")
        print(frame.to_string(index=False))
        return EXIT_OK

    def _charge(self, config: RunConfig) -> pd.DataFrame:
        result = run_sweep(config.plan, kind='charge', workers=config.workers)
        RecordStore(config.output_dir / RECORDS_FILE).persist(result.records)
        write_table(result.aggregate, config.output_dir, 'aggregate', config.output_format)
        return result.aggregate

    def cmd_charge(self, config: RunConfig) -> int:
        """完整充电流水线，写出原始记录与聚合表"""
        aggregate = self._charge(config)
        print(aggregate.to_string(index=False))
        return EXIT_OK

    def _emit_fits(self, aggregate: pd.DataFrame, config: RunConfig) -> int:
        plot_dir = config.output_dir / 'plot'
        for quantity in aggregate['quantity'].unique():
            write_table(plot_table(aggregate, quantity), plot_dir, quantity, 'csv')

        verdicts = fit_aggregate(aggregate, config)
        frame = pd.DataFrame([v.to_row() for v in verdicts], columns=VERDICT_COLUMNS)
        write_table(frame, config.output_dir, 'verdicts', 'csv')
        print(frame.to_string(index=False))
        return EXIT_OK if all(v.group_passed for v in verdicts) else EXIT_VERIFY_FAILED

    def cmd_sweep(self, config: RunConfig) -> int:
        """扫描 + 绘图数据 + 指数判定"""
        aggregate = self._charge(config)
        return self._emit_fits(aggregate, config)

    def cmd_fit(self, config: RunConfig) -> int:
        """读取已有记录重新聚合并拟合"""
        path = config.output_dir / RECORDS_FILE
        if not path.exists():
            raise ConfigurationError(f"No records found at {path}; run 'sweep' or 'charge' first")
        records = RecordStore(path).load()
        aggregate = aggregate_records(records, config.quantities)
        write_table(aggregate, config.output_dir, 'aggregate', config.output_format)
        return self._emit_fits(aggregate, config)

    def cmd_verify(self, config: RunConfig) -> int:
        """运行不变量校验套件"""
        options = VerifyOptions(
            realizations=config.verify_realizations,
            n_values=config.verify_n_values,
            max_cells=config.verify_max_cells,
            master_seed=config.master_seed,
            eps0=config.model.eps0,
            lambda0=config.model.lambda0,
        )
        results = run_suites(config.verify_suites, options)
        frame = pd.DataFrame([r.to_row() for r in results])
        write_table(frame, config.output_dir, 'verify', config.output_format)
        print(frame.to_string(index=False))
        failed = [r.name for r in results if not r.passed]
        if failed:
            battery_logger.error(f"Verification failed: {', '.join(failed)}")
            return EXIT_VERIFY_FAILED
        return EXIT_OK


__all__ = [
    'BatteryApp',
    'fit_aggregate',
    'write_table',
    'EXIT_OK',
    'EXIT_VERIFY_FAILED',
    'EXIT_CONFIG_ERROR',
    'EXIT_SWEEP_FAILED'
]
