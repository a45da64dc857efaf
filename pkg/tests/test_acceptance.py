"""
测试有限尺寸下的标度指数

每个用例扫描一组 N，对系综均值做幂律拟合，再与预测指数比较。
耗时较长，均标记为 slow。
"""
import math

import pytest

from src.ensemble.aggregate import plot_table
from src.ensemble.engine import run_sweep
from src.ensemble.plan import SweepPlan
from src.models.spec import ModelFamily, ModelSpec
from src.scaling.fit import fit_power_law
from src.scaling.predictions import predicted_exponent


def fitted_exponent(aggregate, quantity: str) -> float:
    """对聚合表中某个量的正均值做幂律拟合"""
    table = plot_table(aggregate, quantity)
    points = [
        (float(row.n_cells), float(row.mean), float(row.stderr))
        for row in table.itertuples()
        if math.isfinite(row.mean) and row.mean > 0
    ]
    return fit_power_law(points).exponent


def sweep(spec: ModelSpec, n_values, realizations: int, quantities, seed: int = 2024):
    plan = SweepPlan(spec, n_values=tuple(n_values), realizations=realizations,
                     master_seed=seed, quantities=tuple(quantities))
    result = run_sweep(plan)
    assert result.failed_count == 0
    return result.aggregate


@pytest.mark.slow
class TestVarianceScaling:
    """ΔH₁² 的标度测试"""

    def test_disordered_quadratic(self):
        """测试无序二次型 ΔH₁² ∼ N²"""
        aggregate = sweep(ModelSpec(ModelFamily.DISORDERED_QUADRATIC), range(3, 9), 100, ('variance',))
        assert fitted_exponent(aggregate, 'variance') == pytest.approx(2.0, abs=0.2)

    @pytest.mark.parametrize('q,alpha,expected', [
        (4, 4.0, 2.0),
        (4, 3.0, 1.0),
        (2, 1.0, 1.0),
    ])
    def test_rescaled_sparse_syk(self, q, alpha, expected):
        """测试重标度稀疏 SYK 的 ΔH₁² 指数"""
        assert predicted_exponent('variance', q, alpha) == pytest.approx(expected)
        spec = ModelSpec(ModelFamily.RESCALED_SPARSE_SYK, q=q, alpha=alpha)
        aggregate = sweep(spec, range(3, 8), 50, ('variance',))
        assert fitted_exponent(aggregate, 'variance') == pytest.approx(expected, abs=0.3)


@pytest.mark.slow
class TestConnectivityScaling:
    """耦合数与 Λ₂ 的标度测试"""

    def test_connection_count(self):
        """测试稀疏 SYK 的平均耦合数 C_q ∼ N^α"""
        spec = ModelSpec(ModelFamily.SPARSE_SYK, q=4, alpha=3.0)
        aggregate = sweep(spec, range(4, 11), 30, ('connection_count',))
        assert fitted_exponent(aggregate, 'connection_count') == pytest.approx(3.0, abs=0.3)

    @pytest.mark.parametrize('alpha', [2.0, 3.0])
    def test_lambda2(self, alpha):
        """测试简化模型 Λ₂ ∼ N^{-(x+1)}"""
        spec = ModelSpec(ModelFamily.SIMPLIFIED_VK, q=4, alpha=alpha)
        expected = predicted_exponent('lambda2', 4, alpha)
        assert expected == pytest.approx(-(spec.x + 1.0))
        aggregate = sweep(spec, range(3, 9), 50, ('lambda2',))
        assert fitted_exponent(aggregate, 'lambda2') == pytest.approx(expected, abs=0.3)


@pytest.mark.slow
class TestAdvantageScaling:
    """q = 4 重标度稀疏 SYK 的 Γ 指数测试"""

    ALPHAS = (4.0, 3.0, 2.0, 0.0)

    @pytest.fixture(scope='class')
    def exponents(self):
        fitted = {}
        for alpha in self.ALPHAS:
            spec = ModelSpec(ModelFamily.RESCALED_SPARSE_SYK, q=4, alpha=alpha)
            aggregate = sweep(spec, range(3, 8), 50, ('variance', 'advantage'))
            for column in ('advantage', 'advantage_rom'):
                fitted[(alpha, column)] = fitted_exponent(aggregate, column)
        return fitted

    @pytest.mark.parametrize('column', ['advantage', 'advantage_rom'])
    @pytest.mark.parametrize('alpha,expected', [(4.0, 1.0), (3.0, 0.5), (2.0, 0.0), (0.0, 1.0)])
    def test_both_columns(self, exponents, column, alpha, expected):
        """测试两种平均方式的 Γ 指数都落在容差内"""
        assert predicted_exponent(column, 4, alpha) == pytest.approx(expected)
        assert exponents[(alpha, column)] == pytest.approx(expected, abs=0.35)

    @pytest.mark.parametrize('column', ['advantage', 'advantage_rom'])
    def test_monotone_in_alpha(self, exponents, column):
        """测试 α ∈ {2, 3, 4} 上 Γ 指数随 α 不减"""
        assert exponents[(2.0, column)] <= exponents[(3.0, column)] <= exponents[(4.0, column)]


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
