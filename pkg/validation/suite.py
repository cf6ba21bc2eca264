#!/usr/bin/env python3
"""
Suite - Verificação em tempo de execução de todos os módulos.

Funcionalidades:
- Checagens de fórmulas fechadas, potenciais efetivos e projeção de Landau
- Checagens do solver contra os casos exatos (Pekar, poço delta)
- Sanduíches variacionais, identidade da derivada e pareamento de densidades
- Modo rápido (subconjunto barato) e modo completo (escala de aceitação)
- Para na primeira falha; as checagens seguintes ficam marcadas como puladas
"""

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from asymptotics import (
    GridPolicy,
    LadderModel,
    LadderPoint,
    LadderSpec,
    classical_1d_spec,
    expansion_terms,
    extraction_bracket,
    fit_expansion,
    hydrogenic_correction,
    ladder_energies,
    perturbed_upper_bound,
)
from cli.defaults import STANDARD_LADDER as STANDARD_FIELDS
from closedform import (
    el_residuals,
    energy_beta_derivative,
    pekar_energy_closed,
    phi0,
    phi0_kinetic,
    phi0_limit_alpha0,
    phi0_origin_sq,
    phi0_quartic,
    sech_solution,
)
from core.functional import delta_well_spec, pekar_spec, scaled_pekar_spec
from core.grid import Grid1D, GridFn, dirichlet_energy, l2_norm, make_grid, normalize
from core.params import ModelParams
from effpot.bounds import delta_extraction_check, hydrogen_lower_bound
from effpot.constants import d_const, g_const
from effpot.landau import SquareGrid, landau_projection_apply, v_upper_from_landau
from effpot.potentials import v_lower, v_upper, window_integral
from perturbation import (
    atom_potential,
    concavity_defects,
    density_l1_distance,
    density_pairing,
    derivative_check,
    e_eps,
    gaussian_potential,
)
from solver.diagnostics import binding_inequality_check, decay_grid, richardson_energy
from solver.gradient_flow import (
    SolveOptions,
    directional_derivative_check,
    make_seed,
    minimize,
    smooth_directions,
)

logger = logging.getLogger(__name__)

UNIT = ModelParams(alpha=1.0, beta=1.0)
ACCEPTANCE_PARAMS = ((1.0, 1.0), (2.0, 0.5), (4.0, 1.0), (0.5, 2.0))
SWEEP_FIELDS = (1e3, 1e8, 1e20)


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float | None = None
    threshold: float | None = None
    detail: str = ""
    duration: float = 0.0
    skipped: bool = False


@dataclass
class SuiteReport:
    quick: bool
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def first_failure(self) -> str | None:
        for check in self.checks:
            if not check.skipped and not check.passed:
                return check.name
        return None

    @property
    def passed(self) -> bool:
        return self.first_failure is None

    def to_dict(self) -> dict:
        return {
            "quick": self.quick,
            "passed": self.passed,
            "first_failure": self.first_failure,
            "total": len(self.checks),
            "checks": [asdict(c) for c in self.checks],
        }


class SuiteContext:
    """Resultados caros compartilhados entre checagens (escadas, minimizadores)."""

    def __init__(self):
        self._ladders: dict[tuple[str, int | None], list[LadderPoint]] = {}

    def ladder(self, model: LadderModel, workers: int | None = None) -> list[LadderPoint]:
        key = (model.value, workers)
        if key not in self._ladders:
            spec = LadderSpec(fields=STANDARD_FIELDS, model=model, params=UNIT)
            self._ladders[key] = ladder_energies(spec, workers=workers)
        return self._ladders[key]


Outcome = tuple[bool, float | None, float | None, str]


def random_test_function(grid: Grid1D, rng: np.random.Generator, terms: int = 3) -> GridFn:
    """Soma de gaussianas com coeficientes positivos, centros em [−3,3] e larguras em [0.2,5]."""
    x = grid.nodes
    values = np.zeros(grid.n)
    for _ in range(terms):
        c = rng.uniform(0.1, 1.0)
        center = rng.uniform(-3.0, 3.0)
        width = rng.uniform(0.2, 5.0)
        values += c * np.exp(-0.5 * ((x - center) / width) ** 2)
    return normalize(GridFn(grid, values))


def sweep_grid(L: float, half_width: float = 40.0) -> Grid1D:
    """Menor grade 2^k + 1 em [−half_width, half_width] com espaçamento ≤ L/8."""
    k = 10
    while 2.0 * half_width / 2 ** k > L / 8.0:
        k += 1
    return make_grid(half_width, 2 ** k + 1)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------------------
# Fórmulas fechadas
# ---------------------------------------------------------------------------

def check_closed_form_energy(ctx) -> Outcome:
    err = max(abs(pekar_energy_closed(UNIT) + 19.0 / 48.0),
              abs(pekar_energy_closed(ModelParams(alpha=2.0, beta=0.5)) + 13.0 / 48.0))
    return err <= 1e-15, err, 1e-15, "𝔢₀(1,1) = −19/48, 𝔢₀(2,0.5) = −13/48"


def check_beta_derivative(ctx) -> Outcome:
    d = 1e-6
    fd = (pekar_energy_closed(UNIT.with_beta(1.0 + d))
          - pekar_energy_closed(UNIT.with_beta(1.0 - d))) / (2.0 * d)
    err = max(abs(fd - energy_beta_derivative(UNIT)),
              abs(energy_beta_derivative(UNIT) + phi0_origin_sq(UNIT)))
    return err <= 1e-8, err, 1e-8, "∂𝔢₀/∂β = −φ₀(0)² = −5/8"


def _phi0_integral(power: int) -> float:
    value, _ = quad(lambda x: phi0(UNIT, x) ** power, 0.0, math.inf,
                    epsabs=0.0, epsrel=1e-13, limit=200)
    return 2.0 * value


def check_phi0_normalization(ctx) -> Outcome:
    err = abs(_phi0_integral(2) - 1.0)
    return err <= 1e-10, err, 1e-10, "∫φ₀² = 1"


def check_phi0_quartic(ctx) -> Outcome:
    quartic = _phi0_integral(4)
    err = max(abs(quartic - 1.0 / 3.0), abs(phi0_quartic(UNIT) - 1.0 / 3.0))
    return err <= 1e-8, err, 1e-8, "∫φ₀⁴ = 2(λ + 𝔢₀)/α = 1/3"


def check_phi0_kinetic(ctx) -> Outcome:
    grid = make_grid(UNIT.default_half_width(), 16385)
    kinetic = dirichlet_energy(GridFn(grid, phi0(UNIT, grid.nodes)))
    err = _rel(kinetic, phi0_kinetic(UNIT))
    return err <= 1e-4, err, 1e-4, f"‖φ₀′‖² = {phi0_kinetic(UNIT):.10g}"


def _sampled_residuals(n: int, half_width: float = 40.0):
    grid = make_grid(half_width, n)
    psi = GridFn(grid, phi0(UNIT, grid.nodes))
    return el_residuals(psi, UNIT, sech_solution(UNIT).lam)


def check_el_closed_form(ctx) -> Outcome:
    worst = max(_sampled_residuals(4097).as_tuple())
    return worst <= 1e-3, worst, 1e-3, "resíduos de Euler–Lagrange de φ₀ amostrado"


def check_el_convergence(ctx) -> Outcome:
    levels = [_sampled_residuals(n) for n in (2049, 4097, 8193)]
    ratios = []
    for coarse, fine in zip(levels, levels[1:]):
        ratios.append(coarse.interior / fine.interior)
        ratios.append(coarse.jump / fine.jump)
    ok = all(3.5 <= r <= 4.5 for r in ratios)
    worst = max(ratios, key=lambda r: abs(r - 4.0))
    return ok, worst, 4.0, "razões " + ", ".join(f"{r:.3f}" for r in ratios)


# ---------------------------------------------------------------------------
# Potenciais efetivos
# ---------------------------------------------------------------------------

def check_v_upper_origin(ctx) -> Outcome:
    err = max(_rel(v_upper(B, 0.0), math.sqrt(math.pi * B / 2.0)) for B in (2.0, 1e6, 1e20))
    return err <= 1e-10, err, 1e-10, "V_U^B(0) = √(πB/2)"


def check_v_upper_methods(ctx) -> Outcome:
    B = 1e6
    err = max(_rel(v_upper(B, x), v_upper(B, x, method="quad"))
              for x in (1e-4, 1e-3, 1e-2, 0.1, 1.0))
    return err <= 1e-8, err, 1e-8, "erfcx × quadratura"


def check_v_lower_dominates(ctx) -> Outcome:
    x = np.linspace(-2.0, 2.0, 4001)
    gap = min(float(np.min(np.asarray(v_lower(B, x)) - np.asarray(v_upper(B, x))))
              for B in (2.0, 1e6, 1e20))
    ok = gap >= -1e-12 and abs(v_lower(2.0, 0.0) - 2.0) <= 1e-15
    return ok, gap, 0.0, "V_L^B ≥ V_U^B e V_L^2(0) = 2"


def _window_residuals(fields, windows_for) -> float:
    worst = 0.0
    for B in fields:
        leading = math.log(B) - 2.0 * math.log(math.log(B))
        for L in windows_for(B):
            worst = max(worst,
                        abs(window_integral(B, L, "upper") - leading - g_const(B, L)),
                        abs(window_integral(B, L, "lower") - leading - d_const(B, L)))
    return worst


def _standard_windows(B: float) -> tuple[float, ...]:
    return (0.05, 1.0 / math.log(B), 1.0)


def check_window_identities(ctx) -> Outcome:
    err = _window_residuals((1e6,), _standard_windows)
    return err <= 1e-7, err, 1e-7, "∫V = ln B − 2 ln ln B + 𝒢 (e 𝒟)"


def check_window_identities_full(ctx) -> Outcome:
    err = _window_residuals(SWEEP_FIELDS, _standard_windows)
    return err <= 1e-7, err, 1e-7, "9 pares (B, L)"


def _landau_error(points) -> float:
    return max(_rel(v_upper_from_landau(B, x), v_upper(B, x)) for B, x in points)


def check_landau_oracle(ctx) -> Outcome:
    err = _landau_error(((1e6, 0.0), (1e6, 1e-3), (1e6, 0.1)))
    return err <= 1e-8, err, 1e-8, "quadratura de γ_B² × forma fechada"


def check_landau_oracle_full(ctx) -> Outcome:
    points = ((2.0, 0.0), (2.0, 0.5), (1e6, 1e-4), (1e6, 0.05), (1e20, 1e-9), (1e20, 1.0))
    err = _landau_error(points)
    return err <= 1e-8, err, 1e-8, "6 pontos"


def check_landau_projection(ctx) -> Outcome:
    B = 4.0
    grid = SquareGrid(10.0 / math.sqrt(B), 161)
    x1, x2 = grid.mesh()
    rng = np.random.default_rng(11)
    f = np.zeros((grid.n, grid.n))
    for _ in range(3):
        c1, c2 = rng.uniform(-1.0, 1.0, size=2) / math.sqrt(2.0 * B)
        f += rng.uniform(0.5, 1.0) * np.exp(-0.5 * B * ((x1 - c1) ** 2 + (x2 - c2) ** 2))
    once = landau_projection_apply(B, f, grid)
    twice = landau_projection_apply(B, once, grid)
    err = float(np.linalg.norm(twice - once) / np.linalg.norm(once))
    return err <= 1e-8, err, 1e-8, "P₀² = P₀"


def _extraction_violations(count: int, fields, seed: int) -> tuple[int, int]:
    rng = np.random.default_rng(seed)
    total = violations = 0
    for B in fields:
        for L in _standard_windows(B):
            grid = sweep_grid(L)
            for _ in range(count):
                phi = random_test_function(grid, rng)
                for which in ("upper", "lower", "convolution"):
                    total += 1
                    if not delta_extraction_check(B, L, phi, which).holds:
                        violations += 1
    return violations, total


def check_extraction_quick(ctx) -> Outcome:
    violations, total = _extraction_violations(5, (1e3,), seed=3)
    return violations == 0, float(violations), 0.0, f"{total} desigualdades"


def check_extraction_sweep(ctx) -> Outcome:
    violations, total = _extraction_violations(100, SWEEP_FIELDS, seed=2024)
    return violations == 0, float(violations), 0.0, f"{total} desigualdades"


def check_hydrogen_bound_valid(ctx) -> Outcome:
    bound = hydrogen_lower_bound(1e12, 1.0)
    margin = 2.0 * bound.d_value / math.log(1e12)
    return bound.valid, margin, 0.5, "2τε|𝒟| < 1/2 em B = 10¹²"


# ---------------------------------------------------------------------------
# Expansões
# ---------------------------------------------------------------------------

def check_expansion_dominance(ctx) -> Outcome:
    ok = True
    for B in (1e12, 1e18, 1e24, 1e36):
        mags = [abs(t) for t in expansion_terms(B, 1.0)[1:]]
        ok &= all(a > b for a, b in zip(mags, mags[1:]))
    return ok, None, None, "termos decrescentes para ln B ≳ 27"


def check_synthetic_fit(ctx) -> Outcome:
    points = [(B, hydrogenic_correction(B, 1.0)) for B in STANDARD_FIELDS]
    fit = fit_expansion(points)
    err = abs(fit.a + 0.25) / 0.25
    return err <= 0.03, err, 0.03, f"a={fit.a:.6g} b={fit.b:.6g}"


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

def check_el_jump_minimizer(ctx) -> Outcome:
    grid = make_grid(20.0, 2049)
    report = minimize(pekar_spec(UNIT, grid))
    res = el_residuals(report.minimizer, UNIT, sech_solution(UNIT).lam)
    return res.jump <= 0.1, res.jump, 0.1, "salto φ′(0⁻) − φ′(0⁺) = βφ(0) no minimizador"


def check_gradient_fd(ctx) -> Outcome:
    worst = 0.0
    grid = make_grid(20.0, 2049)
    specs = [pekar_spec(UNIT, grid)]
    B = 1e6
    specs.append(classical_1d_spec(B, UNIT, GridPolicy(n=1025).grid_for(B)))
    for spec in specs:
        f = make_seed(spec, SolveOptions())
        dirs = smooth_directions(spec.grid, 20, seed=7)
        worst = max(worst, directional_derivative_check(f, spec, dirs))
    return worst <= 1e-6, worst, 1e-6, "⟨∇E, h⟩ × diferenças centradas"


def _pekar_case(p: ModelParams, n: int, richardson: bool) -> tuple[float, float]:
    grid = decay_grid(p.decay_rate, n)
    if richardson:
        result = richardson_energy(lambda g: pekar_spec(p, g), grid)
        value, psi = result.extrapolated, result.fine.minimizer
    else:
        report = minimize(pekar_spec(p, grid))
        value, psi = report.energy.total, report.minimizer
    l2 = l2_norm(psi - GridFn(grid, phi0(p, grid.nodes)))
    return _rel(value, pekar_energy_closed(p)), l2


def check_pekar_solve_coarse(ctx) -> Outcome:
    rel, l2 = _pekar_case(UNIT, 2049, richardson=False)
    return rel <= 2e-3 and l2 <= 5e-3, rel, 2e-3, f"‖ψ − φ₀‖ = {l2:.2e}"


def check_pekar_solve(ctx) -> Outcome:
    rel, l2 = _pekar_case(UNIT, 4097, richardson=False)
    return rel <= 1e-4 and l2 <= 1e-3, rel, 1e-4, f"‖ψ − φ₀‖ = {l2:.2e}"


def check_scaling_dilation(ctx) -> Outcome:
    base = minimize(pekar_spec(UNIT, decay_grid(UNIT.decay_rate, 1025))).energy.total
    worst = 0.0
    for mu in (2.0, 5.0, 10.0):
        grid = decay_grid(mu * UNIT.decay_rate, 1025)
        value = minimize(scaled_pekar_spec(UNIT, grid, mu)).energy.total
        worst = max(worst, _rel(value / mu ** 2, base))
    return worst <= 1e-9, worst, 1e-9, "grade dilatada por μ: mínimo × μ²"


def check_scaling_law(ctx) -> Outcome:
    worst = 0.0
    target = pekar_energy_closed(UNIT)
    for mu in (2.0, 5.0, 10.0):
        grid = decay_grid(mu * UNIT.decay_rate, 8193)
        result = richardson_energy(lambda g: scaled_pekar_spec(UNIT, g, mu), grid)
        worst = max(worst, _rel(result.extrapolated, mu ** 2 * target))
    return worst <= 1e-5, worst, 1e-5, "{1, (α/2)μ, βμ} → μ²𝔢₀"


def check_pekar_richardson(ctx) -> Outcome:
    worst_rel = worst_l2 = 0.0
    for a, b in ACCEPTANCE_PARAMS:
        rel, l2 = _pekar_case(ModelParams(alpha=a, beta=b), 8193, richardson=True)
        worst_rel, worst_l2 = max(worst_rel, rel), max(worst_l2, l2)
    ok = worst_rel <= 1e-6 and worst_l2 <= 1e-4
    return ok, worst_rel, 1e-6, f"‖ψ − φ₀‖ ≤ {worst_l2:.2e}"


def _delta_case(beta: float, richardson: bool, n: int = 8193) -> tuple[float, float]:
    grid = decay_grid(beta / 2.0, n)
    if richardson:
        result = richardson_energy(lambda g: delta_well_spec(beta, g), grid)
        value, psi = result.extrapolated, result.fine.minimizer
    else:
        report = minimize(delta_well_spec(beta, grid))
        value, psi = report.energy.total, report.minimizer
    l2 = l2_norm(psi - GridFn(grid, phi0_limit_alpha0(beta, grid.nodes)))
    return _rel(value, -0.25 * beta * beta), l2


def check_delta_well_coarse(ctx) -> Outcome:
    rel, l2 = _delta_case(1.0, richardson=False, n=2049)
    return rel <= 1e-3 and l2 <= 5e-3, rel, 1e-3, f"‖ψ − √(β/2)e^(−β|x|/2)‖ = {l2:.2e}"


def check_delta_well(ctx) -> Outcome:
    rel, l2 = _delta_case(1.0, richardson=False)
    return rel <= 1e-4 and l2 <= 1e-3, rel, 1e-4, f"‖ψ − √(β/2)e^(−β|x|/2)‖ = {l2:.2e}"


def check_delta_well_full(ctx) -> Outcome:
    cases = [_delta_case(beta, richardson=True) for beta in (0.5, 1.0, 2.0)]
    worst_rel = max(c[0] for c in cases)
    worst_l2 = max(c[1] for c in cases)
    return worst_rel <= 1e-6 and worst_l2 <= 1e-4, worst_rel, 1e-6, f"L² ≤ {worst_l2:.2e}"


def check_binding(ctx) -> Outcome:
    report = binding_inequality_check(UNIT)
    return report.holds, report.gap, report.pinning_bound, "𝔢_T − 𝔢₀ ≥ β·φ_T(0)²"


def random_binding_params(count: int = 10, seed: int = 42) -> list[ModelParams]:
    """(α, β) sorteados uniformemente em [0.1, 5]²."""
    rng = np.random.default_rng(seed)
    return [ModelParams(alpha=float(a), beta=float(b))
            for a, b in rng.uniform(0.1, 5.0, size=(count, 2))]


def check_binding_sweep(ctx) -> Outcome:
    reports = [binding_inequality_check(p) for p in random_binding_params()]
    bad = sum(not r.holds for r in reports)
    worst = min(r.gap - r.pinning_bound for r in reports)
    return bad == 0, worst, 0.0, f"{len(reports)} pares (α, β), folga mínima {worst:.3e}"


# ---------------------------------------------------------------------------
# Perturbação
# ---------------------------------------------------------------------------

def check_perturb_atom_discrete(ctx) -> Outcome:
    eps = 0.1
    grid = decay_grid(UNIT.decay_rate, 2049)
    value = e_eps(eps, atom_potential(), UNIT, grid)
    reference = minimize(pekar_spec(UNIT.with_beta(1.0 + eps), grid)).energy.total
    err = _rel(value, reference)
    return err <= 1e-9, err, 1e-9, "átomo em 0 ≡ β + ε na mesma grade"


def check_perturb_atom(ctx) -> Outcome:
    eps = 0.1
    value = e_eps(eps, atom_potential(), UNIT, decay_grid(UNIT.decay_rate, 8193))
    err = _rel(value, pekar_energy_closed(UNIT.with_beta(1.0 + eps)))
    return err <= 1e-4, err, 1e-4, "átomo em 0 soma ε a β"


def check_concavity(ctx) -> Outcome:
    defects = concavity_defects([-0.05, 0.0, 0.05], 0.05, gaussian_potential(), UNIT)
    worst = max(defects)
    return worst <= 1e-8, worst, 1e-8, "e(ε−δ) + e(ε+δ) − 2e(ε) ≤ 0"


def check_derivative_atom(ctx) -> Outcome:
    report = derivative_check(atom_potential(), UNIT, extrapolate=True)
    violations = report.sandwich_violations()
    ok = (report.observed_order >= 0.9 and report.closed_form_gap <= 1e-6
          and abs(report.target + 0.625) <= 1e-12 and violations == 0)
    return ok, report.closed_form_gap, 1e-6, \
        f"ordem {report.observed_order:.3f}, {violations} fora do sanduíche"


def check_derivative_gaussian(ctx) -> Outcome:
    report = derivative_check(gaussian_potential(), UNIT, extrapolate=True)
    below = all(r <= report.target + 1e-6 for r in report.right)
    return report.observed_order >= 0.9 and below, report.observed_order, 0.9, \
        "secantes à direita abaixo de −∫Wφ₀²"


# ---------------------------------------------------------------------------
# Campo forte
# ---------------------------------------------------------------------------

def _single_point(B: float, model: LadderModel) -> LadderPoint:
    spec = LadderSpec(fields=(B,), model=model, params=UNIT)
    return ladder_energies(spec, workers=1)[0]


def _sandwich_holds(point: LadderPoint, p: ModelParams) -> bool:
    if not point.ok:
        return False
    mu2e0 = point.mu ** 2 * pekar_energy_closed(p)
    bracket = extraction_bracket(point.B, p, point.report.minimizer)
    tol = 1e-9 * max(1.0, abs(point.e_eff))
    return point.e_eff <= point.trial.value + tol and abs(point.e_eff - mu2e0) <= bracket


def check_hydrogen_sandwich(ctx) -> Outcome:
    B = 1e12
    point = _single_point(B, LadderModel.HYDROGENIC)
    bound = hydrogen_lower_bound(B, 1.0).value
    ok = point.ok and bound <= point.e_eff <= point.trial.value + 1e-9 * abs(point.e_eff)
    return ok, point.e_eff, bound, "cota inferior ≤ e_eff ≤ estado teste"


def check_polaron_sandwich(ctx) -> Outcome:
    point = _single_point(1e6, LadderModel.POLARON)
    return _sandwich_holds(point, UNIT), point.e_eff, point.trial.value if point.trial else None, \
        "e_eff ≤ teste e |e_eff − μ²𝔢₀| ≤ colchete"


def _ladder_fit(ctx, model: LadderModel, target: float) -> Outcome:
    points = ctx.ladder(model)
    fit = fit_expansion(points)
    err = abs(fit.a - target) / abs(target)
    logger.info(f"📊 {model.value}: a={fit.a:.6g} b={fit.b:.6g} c={fit.c:.6g}")
    return err <= 0.03, err, 0.03, f"a={fit.a:.6g} b={fit.b:.6g}"


def check_ladder_polaron(ctx) -> Outcome:
    return _ladder_fit(ctx, LadderModel.POLARON, pekar_energy_closed(UNIT))


def check_ladder_hydrogenic(ctx) -> Outcome:
    return _ladder_fit(ctx, LadderModel.HYDROGENIC, -0.25)


def check_ladder_sandwich(ctx) -> Outcome:
    bad = 0
    for model in (LadderModel.POLARON, LadderModel.HYDROGENIC):
        points = ctx.ladder(model)
        p = LadderSpec(fields=STANDARD_FIELDS, model=model, params=UNIT).params_for(STANDARD_FIELDS[0])
        bad += sum(not _sandwich_holds(pt, p) for pt in points)
    return bad == 0, float(bad), 0.0, "sanduíche variacional em todos os pontos"


def check_hydrogenic_ratio(ctx) -> Outcome:
    points = ctx.ladder(LadderModel.HYDROGENIC)
    gaps = [abs(pt.e_eff / pt.mu ** 2 + 0.25) for pt in points]
    ok = all(b <= a + 1e-9 for a, b in zip(gaps, gaps[1:]))
    return ok, gaps[-1], None, "|e_eff/μ² − 𝔢₀| não cresce ao longo da escada"


def check_polaron_ratio(ctx) -> Outcome:
    e0 = pekar_energy_closed(UNIT)
    gaps = [abs(pt.e_eff / pt.mu ** 2 - e0) for pt in ctx.ladder(LadderModel.POLARON)]
    ok = all(b <= a + 1e-6 for a, b in zip(gaps, gaps[1:]))
    return ok, gaps[-1], None, "e_eff/μ² se aproxima de 𝔢₀ monotonamente"


def check_perturbed_bound(ctx) -> Outcome:
    grid = decay_grid(UNIT.decay_rate, 4097)
    spec = pekar_spec(UNIT, grid)
    phi = minimize(spec).minimizer
    bad = 0
    for pt in ctx.ladder(LadderModel.POLARON):
        bound = perturbed_upper_bound(pt.B, UNIT, spec, phi)
        lnln = math.log(math.log(pt.B))
        bad += not (pt.ok and pt.e_eff <= bound.upper
                    and abs(bound.g_tilde) <= 2.0 * abs(lnln) + 1.0)
    return bad == 0, float(bad), 0.0, "e_eff ≤ ℓ²ℰ(φ) + colchete em L = 1/ln B"


def check_determinism(ctx) -> Outcome:
    serial = [pt.e_eff for pt in ctx.ladder(LadderModel.HYDROGENIC, workers=1)]
    pooled = [pt.e_eff for pt in ctx.ladder(LadderModel.HYDROGENIC, workers=2)]
    return serial == pooled, None, None, "1 thread × 2 threads"


def check_density_pairing(ctx) -> Outcome:
    W = atom_potential()
    target = phi0_origin_sq(UNIT)
    policy = GridPolicy()
    gaps, l1 = [], []
    for pt in ctx.ladder(LadderModel.POLARON):
        f = pt.report.minimizer
        gaps.append(abs(density_pairing(pt.B, W, UNIT, policy, minimizer=f) - target))
        l1.append(density_l1_distance(pt.B, UNIT, f))
    monotone = all(b <= a + 1e-6 for a, b in zip(gaps, gaps[1:]))
    decreasing = all(b <= a for a, b in zip(l1, l1[1:]))
    ok = monotone and decreasing and l1[-1] <= 0.05
    return ok, l1[-1], 0.05, f"gap final {gaps[-1]:.3e}"


# O modo rápido só resolve grades de até 2049 nós.
QUICK_CHECKS: list[tuple[str, Callable]] = [
    ("closed_form_energy", check_closed_form_energy),
    ("beta_derivative", check_beta_derivative),
    ("phi0_normalization", check_phi0_normalization),
    ("phi0_quartic_identity", check_phi0_quartic),
    ("phi0_kinetic_identity", check_phi0_kinetic),
    ("el_residuals_closed_form", check_el_closed_form),
    ("el_residuals_convergence", check_el_convergence),
    ("v_upper_origin", check_v_upper_origin),
    ("v_upper_methods", check_v_upper_methods),
    ("v_lower_dominates", check_v_lower_dominates),
    ("window_identities", check_window_identities),
    ("landau_oracle", check_landau_oracle),
    ("landau_projection_idempotent", check_landau_projection),
    ("extraction_quick", check_extraction_quick),
    ("hydrogen_bound_valid", check_hydrogen_bound_valid),
    ("expansion_dominance", check_expansion_dominance),
    ("synthetic_fit", check_synthetic_fit),
    # primeira checagem que passa pelo solver
    ("el_jump_minimizer", check_el_jump_minimizer),
    ("gradient_fd_check", check_gradient_fd),
    ("pekar_solve_coarse", check_pekar_solve_coarse),
    ("delta_well_coarse", check_delta_well_coarse),
    ("scaling_dilation", check_scaling_dilation),
    ("perturb_atom_discrete", check_perturb_atom_discrete),
]

FULL_CHECKS: list[tuple[str, Callable]] = [
    ("pekar_solve", check_pekar_solve),
    ("delta_well_solve", check_delta_well),
    ("binding_inequality", check_binding),
    ("perturb_atom_closed_form", check_perturb_atom),
    ("concavity", check_concavity),
    ("hydrogen_sandwich", check_hydrogen_sandwich),
    ("polaron_sandwich", check_polaron_sandwich),
    ("pekar_richardson", check_pekar_richardson),
    ("delta_well_richardson", check_delta_well_full),
    ("scaling_law", check_scaling_law),
    ("binding_sweep", check_binding_sweep),
    ("window_identities_full", check_window_identities_full),
    ("landau_oracle_full", check_landau_oracle_full),
    ("extraction_sweep", check_extraction_sweep),
    ("derivative_identity_atom", check_derivative_atom),
    ("derivative_identity_gaussian", check_derivative_gaussian),
    ("ladder_polaron_fit", check_ladder_polaron),
    ("ladder_hydrogenic_fit", check_ladder_hydrogenic),
    ("ladder_sandwich", check_ladder_sandwich),
    ("hydrogenic_ratio", check_hydrogenic_ratio),
    ("polaron_ratio", check_polaron_ratio),
    ("perturbed_upper_bound", check_perturbed_bound),
    ("density_pairing", check_density_pairing),
    ("determinism", check_determinism),
]


def _run_check(name: str, fn: Callable, ctx: SuiteContext) -> CheckResult:
    start = time.perf_counter()
    try:
        passed, value, threshold, detail = fn(ctx)
    except Exception as exc:
        logger.error(f"❌ {name}: {type(exc).__name__}: {exc}")
        return CheckResult(name=name, passed=False, detail=f"{type(exc).__name__}: {exc}",
                           duration=time.perf_counter() - start)
    value = None if value is None or not math.isfinite(value) else float(value)
    return CheckResult(name=name, passed=bool(passed), value=value, threshold=threshold,
                       detail=detail, duration=time.perf_counter() - start)


def run_suite(quick: bool = False, fail_fast: bool = True) -> SuiteReport:
    """
    Roda as checagens rápidas e, fora do modo rápido, as de aceitação.

    Args:
        quick: Apenas o subconjunto barato
        fail_fast: Marca as checagens após a primeira falha como puladas

    Returns:
        SuiteReport com uma entrada por checagem
    """
    checks = QUICK_CHECKS if quick else QUICK_CHECKS + FULL_CHECKS
    ctx = SuiteContext()
    report = SuiteReport(quick=quick)

    print("\n🔍 VERIFICAÇÃO " + ("RÁPIDA" if quick else "COMPLETA"))
    print("=" * 80)
    failed = False
    for i, (name, fn) in enumerate(checks, 1):
        if failed and fail_fast:
            report.checks.append(CheckResult(name=name, passed=False, skipped=True))
            continue
        result = _run_check(name, fn, ctx)
        report.checks.append(result)
        icon = "✅" if result.passed else "❌"
        print(f"   {i:2d}. {icon} {name} ({result.duration:.2f}s) {result.detail}")
        failed = failed or not result.passed

    print("\n" + "=" * 80)
    print(f"📊 RESULTADO GERAL: {'✅ PASSOU' if report.passed else '❌ FALHOU'}")
    print("=" * 80)
    return report
