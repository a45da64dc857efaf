"""
系综聚合
每个 (N, quantity) 给出均值、标准误、样本数与退化数；求和顺序固定为抽样序号
"""
import math
from typing import Any, Dict, Iterable, List

import numpy as np
import pandas as pd

AGGREGATE_COLUMNS = ['n_cells', 'quantity', 'mean', 'stderr', 'count', 'degenerate_count', 'failed_count']

# 比值类的量，退化样本一律不参与
RATIO_QUANTITIES = frozenset({'advantage', 'power_advantage'})


def _stderr(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def _usable(group: pd.DataFrame, column: str, exclude_degenerate: bool) -> np.ndarray:
    if column not in group.columns:
        return np.array([])
    mask = group['status'] != 'failed'
    if exclude_degenerate:
        mask &= group['status'] != 'degenerate'
    values = pd.to_numeric(group.loc[mask, column], errors='coerce').to_numpy(dtype=float)
    return values[np.isfinite(values)]


def _row(n_cells: int, quantity: str, mean: float, stderr: float, count: int,
         total: int, failed: int) -> Dict[str, Any]:
    return {
        'n_cells': int(n_cells),
        'quantity': quantity,
        'mean': mean,
        'stderr': stderr,
        'count': count,
        'degenerate_count': total - count,
        'failed_count': failed,
    }


def _ratio_of_means(n_cells: int, group: pd.DataFrame, total: int, failed: int) -> Dict[str, Any]:
    """
    Γ 的均值比 mean(τ^∥)/mean(τ^♯)，标准误用 delta 方法传播
    """
    usable = group[(group['status'] == 'ok')]
    if 'tau' not in usable.columns or 'baseline_tau' not in usable.columns:
        return _row(n_cells, 'advantage_rom', math.nan, math.nan, 0, total, failed)
    pairs = usable[['tau', 'baseline_tau']].apply(pd.to_numeric, errors='coerce').dropna()
    pairs = pairs[(pairs['tau'] > 0)]
    count = len(pairs)
    if count == 0:
        return _row(n_cells, 'advantage_rom', math.nan, math.nan, 0, total, failed)
    taus = pairs['tau'].to_numpy(dtype=float)
    bases = pairs['baseline_tau'].to_numpy(dtype=float)
    mean_tau, mean_base = float(np.mean(taus)), float(np.mean(bases))
    ratio = mean_base / mean_tau
    stderr = ratio * math.sqrt((_stderr(taus) / mean_tau) ** 2 + (_stderr(bases) / mean_base) ** 2)
    return _row(n_cells, 'advantage_rom', ratio, stderr, count, total, failed)


def aggregate_records(records: List[Dict[str, Any]], quantities: Iterable[str]) -> pd.DataFrame:
    """
    聚合原始记录

    Args:
        records: run_sweep 产出的记录
        quantities: 需要聚合的量；含 advantage 时额外输出 advantage_rom

    Returns:
        列为 AGGREGATE_COLUMNS 的 DataFrame，按 (n_cells, quantity 顺序) 排列
    """
    quantities = list(quantities)
    if not records:
        return pd.DataFrame(columns=AGGREGATE_COLUMNS)

    frame = pd.DataFrame(records).sort_values(['n_cells', 'realization'], kind='mergesort')
    rows = []
    for n_cells, group in frame.groupby('n_cells', sort=True):
        total = len(group)
        failed = int((group['status'] == 'failed').sum())
        for quantity in quantities:
            values = _usable(group, quantity, quantity in RATIO_QUANTITIES)
            mean = float(np.mean(values)) if len(values) else math.nan
            rows.append(_row(n_cells, quantity, mean, _stderr(values), len(values), total, failed))
            if quantity == 'advantage':
                rows.append(_ratio_of_means(n_cells, group, total, failed))
    return pd.DataFrame(rows, columns=AGGREGATE_COLUMNS)


def plot_table(aggregate: pd.DataFrame, quantity: str) -> pd.DataFrame:
    """绘图用的 (N, mean, stderr) 三列表"""
    subset = aggregate[aggregate['quantity'] == quantity]
    return subset[['n_cells', 'mean', 'stderr']].reset_index(drop=True)


__all__ = [
    'aggregate_records',
    'plot_table',
    'AGGREGATE_COLUMNS',
    'RATIO_QUANTITIES'
]
