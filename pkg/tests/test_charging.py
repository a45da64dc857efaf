"""
测试电池态、谱分解、可观测量、功曲线与充电流水线
"""
import math
from types import SimpleNamespace

import numpy as np
import pytest

from src.charging.evolution import WorkCurve, evolve_work_curve, optimal_tau
from src.charging.observables import (
    advantage,
    bhatia_davis_slack,
    cumulant_g2_check,
    fubini_length,
    mean_energy,
    power_advantage,
    spectral_extremes,
    spectral_gap,
    variance,
)
from src.charging.pipeline import ChargingPipeline
from src.charging.spectral import SpectralPropagator, Spectrum
from src.charging.state import BatteryState, ground_state, top_state
from src.models.factory import build_model
from src.models.quadratic import build_h0, build_parallel_drive
from src.models.spec import ModelFamily, ModelSpec
from src.utils.exceptions import (
    DegenerateRealizationError,
    DimensionMismatchError,
    NoChargingError,
    ResourceLimitError,
    ValidationError,
)


class TestBatteryState:
    """电池态测试"""

    def test_unnormalized_should_raise(self):
        """测试未归一应该抛出异常"""
        with pytest.raises(ValidationError, match="norm"):
            BatteryState(np.array([1.0, 1.0]))

    def test_dimension_should_be_power_of_two(self):
        """测试维数不是 2 的幂应该抛出异常"""
        with pytest.raises(DimensionMismatchError):
            BatteryState.normalized(np.ones(3))

    def test_normalized(self):
        """测试自动归一"""
        state = BatteryState.normalized(np.array([3.0, 0, 0, 4.0]))
        assert state.n_cells == 2
        assert np.isclose(np.linalg.norm(state.amplitudes), 1.0)
        with pytest.raises(ValidationError):
            BatteryState.normalized(np.zeros(4))

    def test_ground_and_top_are_orthogonal(self):
        """测试基态与最高能态正交"""
        ground, top = ground_state(3), top_state(3)
        assert abs(ground.overlap(top)) < 1e-12
        assert ground.infidelity(ground) == pytest.approx(0.0, abs=1e-12)
        assert ground.infidelity(top) == pytest.approx(1.0)

    def test_dense_cap(self, dense_cap):
        """测试基态受稠密上限约束"""
        dense_cap.DENSE_CAP = 4
        with pytest.raises(ResourceLimitError):
            ground_state(5)


class TestSpectrum:
    """谱分解测试"""

    def test_non_hermitian_should_raise(self):
        """测试非 Hermitian 矩阵应该抛出异常"""
        with pytest.raises(ValidationError, match="not Hermitian"):
            Spectrum(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_extremes_and_moments(self):
        """测试极值、谱宽与矩"""
        h1 = build_parallel_drive(3, 2.0)
        spectrum = Spectrum.of(h1)
        assert Spectrum.of(spectrum) is spectrum
        assert spectrum.e_min == pytest.approx(-6.0)
        assert spectrum.e_max == pytest.approx(6.0)
        assert spectral_gap(h1) == pytest.approx(12.0)
        assert spectral_extremes(h1) == pytest.approx((-6.0, 6.0))
        mu, var = spectrum.moments(ground_state(3))
        assert mu == pytest.approx(0.0, abs=1e-12)
        assert var == pytest.approx(12.0)

    def test_propagator(self):
        """测试谱演化在 t = 0 返回初态，分块输出与逐点一致"""
        spectrum = Spectrum.of(build_parallel_drive(2, 1.0))
        psi = ground_state(2).amplitudes
        propagator = SpectralPropagator(spectrum, psi)
        assert np.allclose(propagator.state_at(0.0), psi)
        times = np.linspace(0, 1, 7)
        blocks = list(propagator.states(times, chunk=3))
        assert [block.shape for block in blocks] == [(3, 4), (3, 4), (1, 4)]
        stacked = np.concatenate(blocks)
        assert np.allclose(stacked[5], propagator.state_at(times[5]))


class TestObservables:
    """可观测量测试"""

    def test_parallel_variance(self):
        """测试并行驱动 ΔH₁² = Nλ₀²"""
        for n_cells in range(1, 6):
            h1 = build_parallel_drive(n_cells, 0.7)
            psi = ground_state(n_cells)
            assert variance(h1, psi) == pytest.approx(n_cells * 0.49)
            assert mean_energy(h1, psi) == pytest.approx(0.0, abs=1e-12)

    def test_variance_paths_agree(self):
        """测试无矩阵与稠密路径给出相同方差"""
        model = build_model(ModelSpec(ModelFamily.DISORDERED_QUADRATIC, n_cells=3), 17)
        psi = ground_state(3)
        assert variance(model.hamiltonian, psi) == pytest.approx(variance(Spectrum.of(model.hamiltonian), psi))

    def test_bhatia_davis_slack(self):
        """测试 Bhatia-Davis 余量非负，测地线饱和"""
        psi = ground_state(3)
        parallel = build_parallel_drive(3, 1.0)
        assert bhatia_davis_slack(parallel, psi) >= 0.0
        geodesic = build_model(ModelSpec(ModelFamily.GEODESIC, n_cells=3)).hamiltonian
        assert bhatia_davis_slack(geodesic, psi) == pytest.approx(0.0, abs=1e-9)

    def test_fubini_length(self):
        """测试长度与负输入"""
        assert fubini_length(2.0, math.pi / 4) == pytest.approx(math.pi / 2)
        with pytest.raises(ValidationError):
            fubini_length(-1.0, 1.0)

    def test_advantage(self):
        """测试优势比值与未定义情形"""
        parallel = SimpleNamespace(tau=2.0, power=1.0)
        sharp = SimpleNamespace(tau=0.5, power=4.0)
        assert advantage(parallel, sharp) == pytest.approx(4.0)
        assert power_advantage(parallel, sharp) == pytest.approx(4.0)
        with pytest.raises(DegenerateRealizationError):
            advantage(parallel, SimpleNamespace(tau=None, power=None))
        with pytest.raises(DegenerateRealizationError):
            power_advantage(parallel, SimpleNamespace(tau=1.0, power=None))

    @pytest.mark.parametrize('family,q', [
        (ModelFamily.PARALLEL_DRIVE, 2),
        (ModelFamily.DISORDERED_QUADRATIC, 2),
        (ModelFamily.SPARSE_SYK, 4),
        (ModelFamily.GEODESIC, 2),
    ])
    def test_cumulant_matches_variance(self, family, q):
        """测试 -G''(0) 与 ΔH₁² 一致"""
        model = build_model(ModelSpec(family, n_cells=3, q=q), 21)
        assert cumulant_g2_check(model.hamiltonian, ground_state(3)) < 1e-3

    def test_cumulant_zero_variance(self):
        """测试零方差返回 0"""
        assert cumulant_g2_check(build_h0(2, 1.0), ground_state(2)) == 0.0


class TestWorkCurve:
    """功曲线与 τ 测试"""

    def test_parallel_closed_form(self):
        """测试 W(t) = 2Nε₀sin²(λ₀t)"""
        h0, h1 = build_h0(3, 1.0), build_parallel_drive(3, 1.0)
        curve = evolve_work_curve(h0, h1, ground_state(3))
        expected = 6.0 * np.sin(curve.times) ** 2
        assert np.max(np.abs(curve.works - expected)) < 1e-9
        assert np.allclose(curve.norms, 1.0)
        assert np.allclose(curve.h1_means, 0.0, atol=1e-10)
        assert curve.t_max == pytest.approx(4 * math.pi / math.sqrt(3))

    def test_optimal_tau_full_charge(self):
        """测试满充时间 τ = π/(2λ₀)"""
        h0, h1 = build_h0(2, 1.0), build_parallel_drive(2, 2.0)
        curve = evolve_work_curve(h0, h1, ground_state(2))
        tau, work = optimal_tau(curve, 1.0)
        assert tau == pytest.approx(math.pi / 4, rel=1e-6)
        assert work == pytest.approx(4.0, rel=1e-9)

    def test_optimal_tau_half_charge(self):
        """测试半充时间 τ = π/(4λ₀)"""
        h0, h1 = build_h0(2, 1.0), build_parallel_drive(2, 1.0)
        curve = evolve_work_curve(h0, h1, ground_state(2))
        tau, work = optimal_tau(curve, 0.5)
        assert tau == pytest.approx(math.pi / 4, rel=1e-6)
        assert work == pytest.approx(2.0, rel=1e-6)

    def test_no_charging_should_raise(self):
        """测试 H₁ = H₀ 时没有充电"""
        h0 = build_h0(2, 1.0)
        curve = evolve_work_curve(h0, h0, ground_state(2), n_samples=64)
        with pytest.raises(NoChargingError):
            optimal_tau(curve)

    def test_invalid_arguments_should_raise(self):
        """测试非法参数应该抛出异常"""
        h0, h1 = build_h0(1, 1.0), build_parallel_drive(1, 1.0)
        with pytest.raises(ValidationError):
            evolve_work_curve(h0, h1, ground_state(1), t_max=-1.0)
        with pytest.raises(ValidationError):
            evolve_work_curve(h0, h1, ground_state(1), n_samples=1)
        curve = evolve_work_curve(h0, h1, ground_state(1), n_samples=32)
        with pytest.raises(ValidationError, match="target_fraction"):
            optimal_tau(curve, 1.5)
        with pytest.raises(ValidationError):
            WorkCurve(times=np.array([]), works=np.array([]))


class TestChargingPipeline:
    """充电流水线测试"""

    def test_parallel_is_its_own_baseline(self):
        """测试并行驱动的优势为 1"""
        pipeline = ChargingPipeline()
        report = pipeline.run(ModelSpec(ModelFamily.PARALLEL_DRIVE, n_cells=3), 0)
        assert report.advantage == pytest.approx(1.0, rel=1e-6)
        assert report.length == pytest.approx(math.sqrt(3) * math.pi / 2, rel=1e-6)
        assert report.power == pytest.approx(12.0 / math.pi, rel=1e-6)
        assert not report.degenerate

    def test_geodesic_advantage(self):
        """测试测地线优势 Γ = Nλ/λ₀ 且长度为 π/2"""
        pipeline = ChargingPipeline()
        report = pipeline.run(ModelSpec(ModelFamily.GEODESIC, n_cells=4), 0)
        assert report.advantage == pytest.approx(4.0, rel=1e-6)
        assert report.length == pytest.approx(math.pi / 2, abs=1e-9)
        assert report.bhatia_slack == pytest.approx(0.0, abs=1e-9)

    def test_onsite_is_degenerate(self):
        """测试零方差抽样被标记为退化"""
        report = ChargingPipeline().run(ModelSpec(ModelFamily.ONSITE, n_cells=2), 0,
                                        ('variance', 'advantage', 'sandwich_fraction'))
        assert report.degenerate
        assert report.advantage is None
        assert report.to_record()['sandwich_fraction'] is None

    def test_optional_quantities(self):
        """测试连接数、Λ₂ 与夹心比例"""
        spec = ModelSpec(ModelFamily.SIMPLIFIED_VK, n_cells=3, q=4, alpha=3.0)
        report = ChargingPipeline().run(spec, 5, ('variance', 'connection_count', 'lambda2', 'sandwich_fraction'))
        model = build_model(spec, 5)
        assert report.connection_count == len(model.realization.mask)
        assert report.lambda2 is not None
        assert 0.0 <= report.sandwich_fraction <= 1.0
        assert report.tau is None

    def test_unknown_quantity_should_raise(self):
        """测试未知的量应该抛出异常"""
        with pytest.raises(ValidationError, match="Unknown quantities"):
            ChargingPipeline().run(ModelSpec(ModelFamily.ONSITE, n_cells=1), 0, ('entropy',))

    def test_spectrum_row(self):
        """测试谱行"""
        row = ChargingPipeline().spectrum_row(ModelSpec(ModelFamily.PARALLEL_DRIVE, n_cells=2), 0)
        assert row['gap'] == pytest.approx(4.0)
        assert row['degenerate'] is False

    def test_baseline_cached(self):
        """测试并行基线按 (N, ε₀, λ₀) 缓存"""
        pipeline = ChargingPipeline()
        assert pipeline.baseline(2, 1.0, 1.0) is pipeline.baseline(2, 1.0, 1.0)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
