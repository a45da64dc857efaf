"""
不变量校验套件
每个套件返回 SuiteResult，失败项以 "检查名[参数]: 说明" 的形式列出
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from config.settings import settings
from src.algebra.dense import to_dense
from src.algebra.majorana import MajoranaMap, anticommutation_table, jw_majorana
from src.algebra.pauli import OperatorSum, pauli_y
from src.charging.erratum import anticommuting_block, block_count_formula, erratum_rhs, sandwich_moment
from src.charging.evolution import evolve_work_curve, optimal_tau
from src.charging.observables import bhatia_davis_slack, cumulant_g2_check, variance
from src.charging.pipeline import ChargingPipeline
from src.charging.spectral import SpectralPropagator, Spectrum
from src.charging.state import ground_state, top_state
from src.ensemble.seeds import derive_seed
from src.models.factory import build_model
from src.models.quadratic import build_h0, build_parallel_drive
from src.models.spec import ModelFamily, ModelSpec
from src.scaling.fit import fit_power_law
from src.utils.exceptions import BatteryError
from src.utils.logger import battery_logger

ALGEBRA_TOLERANCE = 1e-12
CLOSED_FORM_RTOL = 1e-6
CUMULANT_TOLERANCE = 1e-3
ERRATUM_RTOL = 1e-9
GEODESIC_TOLERANCE = 1e-9
GEODESIC_EXPONENT_TOLERANCE = 0.05


@dataclass
class SuiteResult:
    """单个套件的结果"""
    name: str
    checks: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, condition: bool, label: str, detail: str = ''):
        self.checks += 1
        if not condition:
            self.failures.append(f"{label}: {detail}" if detail else label)

    def to_row(self) -> Dict[str, object]:
        return {
            'suite': self.name,
            'passed': self.passed,
            'checks': self.checks,
            'failures': '; '.join(self.failures),
        }


@dataclass(frozen=True)
class VerifyOptions:
    """套件参数"""
    realizations: int = 50
    n_values: tuple = (3, 4, 5)
    max_cells: int = 6
    master_seed: int = 0
    eps0: float = 1.0
    lambda0: float = 1.0
    majorana: MajoranaMap = jw_majorana


def _family_specs() -> List[ModelSpec]:
    """覆盖全部族的代表性声明"""
    return [
        ModelSpec(ModelFamily.ONSITE),
        ModelSpec(ModelFamily.PARALLEL_DRIVE),
        ModelSpec(ModelFamily.CLEAN_QUADRATIC),
        ModelSpec(ModelFamily.DISORDERED_QUADRATIC),
        ModelSpec(ModelFamily.ROTATED_QUADRATIC),
        ModelSpec(ModelFamily.SPARSE_SYK, q=4, alpha=3.0),
        ModelSpec(ModelFamily.RESCALED_SPARSE_SYK, q=4, alpha=3.0),
        ModelSpec(ModelFamily.SIMPLIFIED_VK, q=4, alpha=3.0),
        ModelSpec(ModelFamily.GEODESIC),
    ]


def suite_algebra(options: VerifyOptions) -> SuiteResult:
    """Majorana 反对易表、Hermitian 性与 γ² = 1"""
    result = SuiteResult('algebra')
    for n_cells in range(1, options.max_cells + 1):
        try:
            table = anticommutation_table(n_cells, majorana=options.majorana)
        except BatteryError as e:
            result.check(False, f"anticommutation[N={n_cells}]", str(e))
            continue
        deviation = float(np.max(np.abs(table - 2.0 * np.eye(2 * n_cells))))
        result.check(deviation <= ALGEBRA_TOLERANCE, f"anticommutation[N={n_cells}]",
                     f"table deviates from 2I by {deviation:.3e}")

        identity = np.eye(1 << n_cells)
        for m in range(1, 2 * n_cells + 1):
            gamma = to_dense(OperatorSum.from_term(options.majorana(m, n_cells)))
            result.check(np.max(np.abs(gamma - gamma.conj().T)) <= ALGEBRA_TOLERANCE,
                         f"hermitian[N={n_cells},m={m}]")
            result.check(np.max(np.abs(gamma @ gamma - identity)) <= ALGEBRA_TOLERANCE,
                         f"square[N={n_cells},m={m}]")
    return result


def suite_ground_state(options: VerifyOptions) -> SuiteResult:
    """H₀|0⟩ = 0 且 σʸ_i|0⟩ = -|0⟩"""
    result = SuiteResult('ground_state')
    for n_cells in range(1, min(10, settings.DENSE_CAP) + 1):
        psi = ground_state(n_cells).amplitudes
        residual = np.linalg.norm(build_h0(n_cells, options.eps0).apply(psi))
        result.check(residual <= ALGEBRA_TOLERANCE, f"zero_energy[N={n_cells}]", f"‖H0ψ‖={residual:.3e}")
        for cell in range(1, n_cells + 1):
            flipped = pauli_y(cell, n_cells).apply(psi)
            result.check(np.linalg.norm(flipped + psi) <= ALGEBRA_TOLERANCE,
                         f"sigma_y_eigenstate[N={n_cells},i={cell}]")
    return result


def _relative(value: float, expected: float) -> float:
    return abs(value - expected) / max(abs(expected), 1e-300)


def suite_parallel_closed_form(options: VerifyOptions) -> SuiteResult:
    """W(t) = 2Nε₀sin²(λ₀t)、τ = π/(2λ₀)、ΔH₁² = Nλ₀²、P = 4Nε₀λ₀/π"""
    result = SuiteResult('parallel_closed_form')
    eps0, lambda0 = options.eps0, options.lambda0
    for n_cells in range(1, 9):
        h0 = build_h0(n_cells, eps0)
        h1 = build_parallel_drive(n_cells, lambda0)
        psi = ground_state(n_cells)
        curve = evolve_work_curve(h0, h1, psi)
        expected = 2 * n_cells * eps0 * np.sin(lambda0 * curve.times) ** 2
        deviation = float(np.max(np.abs(curve.works - expected)))
        result.check(deviation <= 1e-9 * max(1.0, 2 * n_cells * eps0), f"work_curve[N={n_cells}]",
                     f"max deviation {deviation:.3e}")

        tau, work = optimal_tau(curve, 1.0)
        result.check(_relative(tau, math.pi / (2 * lambda0)) <= CLOSED_FORM_RTOL, f"tau[N={n_cells}]",
                     f"tau={tau:.12f}")
        var = variance(h1, psi)
        result.check(_relative(var, n_cells * lambda0 ** 2) <= CLOSED_FORM_RTOL, f"variance[N={n_cells}]",
                     f"variance={var:.12f}")
        power = work / tau
        result.check(_relative(power, 4 * n_cells * eps0 * lambda0 / math.pi) <= CLOSED_FORM_RTOL,
                     f"power[N={n_cells}]", f"power={power:.12f}")
    return result


def _realizations(spec: ModelSpec, options: VerifyOptions, n_cells: int) -> Iterable:
    concrete = spec.with_cells(n_cells)
    for index in range(options.realizations):
        yield index, build_model(concrete, derive_seed(options.master_seed, n_cells, index))


def suite_bhatia_davis(options: VerifyOptions) -> SuiteResult:
    """全部族的 Bhatia-Davis 余量非负；测地线饱和"""
    result = SuiteResult('bhatia_davis')
    for spec in _family_specs():
        for n_cells in options.n_values:
            psi = ground_state(n_cells)
            for index, model in _realizations(spec, options, n_cells):
                label = f"slack[{spec.family.value},N={n_cells},r={index}]"
                try:
                    slack = bhatia_davis_slack(model.hamiltonian, psi)
                except BatteryError as e:
                    result.check(False, label, str(e))
                    continue
                result.check(True, label)
                if spec.family == ModelFamily.GEODESIC:
                    var = variance(model.hamiltonian, psi)
                    result.check(abs(slack) <= GEODESIC_TOLERANCE * max(1.0, var),
                                 f"saturation[N={n_cells}]", f"slack={slack:.3e}")
    return result


def suite_cumulant(options: VerifyOptions) -> SuiteResult:
    """-G''(0) 与 ΔH₁² 一致"""
    result = SuiteResult('cumulant')
    n_cells = options.n_values[0]
    psi = ground_state(n_cells)
    for spec in _family_specs():
        for index, model in _realizations(spec, options, n_cells):
            label = f"g2[{spec.family.value},N={n_cells},r={index}]"
            try:
                deviation = cumulant_g2_check(model.hamiltonian, psi)
            except BatteryError as e:
                result.check(False, label, str(e))
                continue
            result.check(deviation <= CUMULANT_TOLERANCE, label, f"deviation={deviation:.3e}")
    return result


def suite_erratum(options: VerifyOptions) -> SuiteResult:
    """夹心矩恒等式、块计数与 (i-1)(N-i) 标度"""
    result = SuiteResult('erratum')
    spec = ModelSpec(ModelFamily.DISORDERED_QUADRATIC)
    n_cells = 4
    psi = ground_state(n_cells)
    for index, model in _realizations(spec, options, n_cells):
        for cell in range(1, n_cells + 1):
            lhs = sandwich_moment(model.hamiltonian, cell, options.eps0, psi)
            rhs = erratum_rhs(model.hamiltonian, cell, options.eps0, psi)
            result.check(abs(lhs - rhs) <= ERRATUM_RTOL * max(1.0, abs(lhs)),
                         f"identity[r={index},i={cell}]", f"{lhs:.12g} vs {rhs:.12g}")

    n_cells = 8
    model = build_model(spec.with_cells(n_cells), derive_seed(options.master_seed, n_cells, 0))
    ratios = []
    for cell in range(1, n_cells + 1):
        _, count = anticommuting_block(model.hamiltonian, cell)
        expected = block_count_formula(n_cells, cell)
        result.check(count == expected, f"block_count[N={n_cells},i={cell}]", f"{count} vs {expected}")
        interior = (cell - 1) * (n_cells - cell)
        if interior > 0:
            ratios.append(count / interior)
    if ratios:
        result.check(max(ratios) <= 2.0 * min(ratios), f"block_scaling[N={n_cells}]",
                     f"ratios span {min(ratios):.3f}..{max(ratios):.3f}")
    return result


def suite_geodesic(options: VerifyOptions) -> SuiteResult:
    """测地线到达最高能态、l(C) = π/2、Γ ∼ N"""
    result = SuiteResult('geodesic')
    pipeline = ChargingPipeline(target_fraction=1.0)
    n_points, gammas = [], []
    for n_cells in range(2, 9):
        spec = ModelSpec(ModelFamily.GEODESIC, n_cells=n_cells, eps0=options.eps0, lambda0=options.lambda0)
        model = build_model(spec)
        psi = ground_state(n_cells)
        tau = math.pi / (2 * n_cells * spec.geodesic_lambda)
        state = SpectralPropagator(Spectrum.of(model.hamiltonian), psi).state_at(tau)
        infidelity = top_state(n_cells).infidelity(state)
        result.check(infidelity <= GEODESIC_TOLERANCE, f"final_state[N={n_cells}]",
                     f"infidelity={infidelity:.3e}")

        report = pipeline.run(spec, 0, ('variance', 'advantage'))
        result.check(report.length is not None and abs(report.length - math.pi / 2) <= GEODESIC_TOLERANCE,
                     f"length[N={n_cells}]", f"length={report.length}")
        if report.advantage is not None:
            n_points.append(n_cells)
            gammas.append(report.advantage)

    if len(n_points) >= 3:
        fit = fit_power_law([(n, g, None) for n, g in zip(n_points, gammas)])
        result.check(abs(fit.exponent - 1.0) <= GEODESIC_EXPONENT_TOLERANCE, 'advantage_exponent',
                     f"exponent={fit.exponent:.4f}")
    else:
        result.check(False, 'advantage_exponent', "too few points")
    return result


SUITES: Dict[str, Callable[[VerifyOptions], SuiteResult]] = {
    'algebra': suite_algebra,
    'ground_state': suite_ground_state,
    'parallel_closed_form': suite_parallel_closed_form,
    'bhatia_davis': suite_bhatia_davis,
    'cumulant': suite_cumulant,
    'erratum': suite_erratum,
    'geodesic': suite_geodesic,
}


def run_suites(names: Optional[Iterable[str]] = None,
               options: Optional[VerifyOptions] = None) -> List[SuiteResult]:
    """
    依次运行校验套件；单个套件内部的异常记为该套件失败

    Args:
        names: 套件名，缺省为全部
        options: 套件参数
    """
    options = options or VerifyOptions()
    results = []
    for name in (names or SUITES):
        try:
            suite = SUITES[name](options)
        except Exception as e:
            battery_logger.error(f"Verify suite {name} crashed: {e}", exc_info=True)
            suite = SuiteResult(name, checks=1, failures=[f"crashed: {type(e).__name__}: {e}"])
        level = 'passed' if suite.passed else f"FAILED ({len(suite.failures)} failures)"
        battery_logger.info(f"Suite {name}: {suite.checks} checks {level}")
        results.append(suite)
    return results


__all__ = [
    'SuiteResult',
    'VerifyOptions',
    'SUITES',
    'run_suites'
]
