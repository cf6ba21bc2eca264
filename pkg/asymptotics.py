"""
Laboratório de campo forte: funcionais clássicos efetivos em campo B.

Funcionalidades:
- Funcional 1D restrito ao nível de Landau mais baixo (núcleo de auto-interação
  e poço coulombiano efetivo)
- Estado teste √μ·φ₀(μx) e a cota superior com o colchete de extração
- Cota superior do funcional perturbado pelo estado √(ln B)·φ(x ln B)
- Escadas de campos em paralelo com mesclagem ordenada
- Ajuste de mínimos quadrados da expansão a(ln B)² + b ln B ln ln B + c ln B
- Expansão hidrogênica de seis termos
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from closedform import pekar_energy_closed, scaled_trial
from core.errors import FitError, PolaronError, ResolutionError
from core.functional import FunctionalSpec, energy
from core.grid import Grid1D, GridFn, dirichlet_norm, make_grid, normalize
from core.params import ModelParams
from effpot.constants import g_const, g_tilde_const
from effpot.potentials import (
    EULER_GAMMA,
    cell_averaged_kernel,
    cell_averaged_potential,
    mu_field,
    v_upper,
)
from solver.gradient_flow import SolveOptions, SolveReport, minimize
from utils.parallel import WorkMonitor, ordered_map

logger = logging.getLogger(__name__)

MIN_FIELD = math.exp(math.e)


def _check_ladder_field(B: float) -> None:
    if not (math.isfinite(B) and B > MIN_FIELD):
        raise ValueError(f"B deve ser > e^e ≈ {MIN_FIELD:.4f}, recebido {B!r}")


class LadderModel(Enum):
    POLARON = "polaron"
    HYDROGENIC = "hydrogenic"


@dataclass(frozen=True)
class GridPolicy:
    """Regra B ↦ grade: half_width = scale/μ(B), n nós."""

    scale: float = 40.0
    n: int = 4097

    def grid_for(self, B: float) -> Grid1D:
        return make_grid(self.scale / mu_field(B), self.n)


@dataclass(frozen=True)
class LadderSpec:
    fields: tuple[float, ...]
    model: LadderModel
    params: ModelParams
    grid_policy: GridPolicy = GridPolicy()

    def __post_init__(self):
        fields = tuple(float(B) for B in self.fields)
        for B in fields:
            _check_ladder_field(B)
        if any(b <= a for a, b in zip(fields, fields[1:])):
            raise ValueError("os campos da escada devem ser estritamente crescentes")
        object.__setattr__(self, "fields", fields)

    def params_for(self, B: float) -> ModelParams:
        alpha = self.params.alpha if self.model is LadderModel.POLARON else 0.0
        return ModelParams(alpha=alpha, beta=self.params.beta, field=B)


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    c: float
    residual: float


@dataclass(frozen=True)
class TrialBound:
    value: float
    leading: float
    bracket: float

    @property
    def upper(self) -> float:
        return self.leading + self.bracket


@dataclass(frozen=True)
class LadderPoint:
    B: float
    e_eff: float
    ok: bool
    iterations: int = 0
    trial: TrialBound | None = None
    report: SolveReport | None = None
    error: str | None = None

    @property
    def mu(self) -> float:
        return mu_field(self.B)


def classical_1d_spec(B: float, p: ModelParams, grid: Grid1D,
                      cell_average: bool = True) -> FunctionalSpec:
    """
    Funcional efetivo ℰ_eff(f) = 𝒫(γ_B f) − B na órbita de Landau mais baixa.

    ∫|f′|² − (α/√8)∬|f(x)|²V_U^B((x−y)/√2)|f(y)|² − β∫V_U^B|f|²

    Args:
        B: Campo (> e^e)
        p: Parâmetros α, β
        grid: Grade (resolve 1/μ(B))
        cell_average: Usa médias exatas por célula (padrão) ou amostras pontuais
    """
    _check_ladder_field(B)
    mu = mu_field(B)
    if grid.spacing > 1.0 / (8.0 * mu) or grid.half_width < 4.0 / mu:
        raise ResolutionError(
            f"grade {grid} não resolve a largura 1/μ(B) = {1.0 / mu:.4g}"
        )
    if cell_average:
        potential = cell_averaged_potential(B, grid, "upper")
    else:
        potential = np.asarray(v_upper(B, grid.nodes))

    kernel_row = None
    if p.alpha > 0:
        if cell_average:
            # (α/√8)·V_U(·/√2) = (α/2)·[(1/√2)V_U(·/√2)]
            kernel_row = 0.5 * p.alpha * cell_averaged_kernel(B, grid)
        else:
            lags = grid.spacing * np.arange(grid.n)
            kernel_row = p.alpha / math.sqrt(8.0) * np.asarray(v_upper(B, lags / math.sqrt(2.0)))

    return FunctionalSpec(
        grid=grid,
        kinetic_coeff=1.0,
        potential=GridFn(grid, p.beta * potential),
        potential_sign=-1,
        kernel_row=kernel_row,
    )


def trial_state(B: float, p: ModelParams, grid: Grid1D) -> GridFn:
    """f_B(x) = √μ(B)·φ₀(μ(B)x), normalizado na grade."""
    mu = mu_field(B)
    return normalize(GridFn(grid, scaled_trial(p, mu, grid.nodes)))


def extraction_bracket(B: float, p: ModelParams, f: GridFn) -> float:
    """
    Colchete de erro da troca V_U^B → μ(B)δ₀ em L = 1/ln B.

    Termo de auto-interação com 𝒢(B, L/√2), termo coulombiano com 𝒢(B, L).
    """
    L = 1.0 / math.log(B)
    d = dirichlet_norm(f)
    base = 1.0 / L + 8.0 * math.sqrt(L) * d ** 1.5
    self_part = 0.5 * p.alpha * (base + abs(g_const(B, L / math.sqrt(2.0))) * d)
    coulomb_part = p.beta * (base + abs(g_const(B, L)) * d)
    return self_part + coulomb_part


def trial_upper_bound(B: float, p: ModelParams, grid: Grid1D | None = None,
                      policy: GridPolicy = GridPolicy()) -> TrialBound:
    """
    Avalia o funcional clássico no estado teste (sem o termo B).

    Returns:
        TrialBound com o valor, o termo principal μ²𝔢₀ e o colchete
    """
    grid = grid or policy.grid_for(B)
    trial = trial_state(B, p, grid)
    value = energy(trial, classical_1d_spec(B, p, grid)).total
    leading = mu_field(B) ** 2 * pekar_energy_closed(p)
    return TrialBound(value=value, leading=leading, bracket=extraction_bracket(B, p, trial))


@dataclass(frozen=True)
class PerturbedBound:
    """
    Cota do funcional clássico no estado g_B(x) = √ℓ·φ(ℓx), ℓ = ln B.

    scaled_energy = ℓ²·ℰ_ε(φ); o colchete vem da troca V_U^B → ℓδ₀ em L = 1/ℓ.
    """

    B: float
    scaled_energy: float
    bracket: float
    g_tilde: float

    @property
    def upper(self) -> float:
        return self.scaled_energy + self.bracket


def perturbed_upper_bound(B: float, p: ModelParams, spec: FunctionalSpec,
                          phi: GridFn) -> PerturbedBound:
    """
    Cota superior (sem o termo B) para o funcional perturbado em campo B.

    ℓ²ℰ_ε(φ) + (α/2 + β)·ℓ·(1 + 8‖φ′‖^{3/2} + |𝒢̃(B, L/√2)|·‖φ′‖), L = 1/ln B.

    Args:
        B: Campo (> 1)
        p: Parâmetros α, β
        spec: Funcional ℰ_ε discreto na grade de φ (ε = 0 dá o de Pekar)
        phi: Estado normalizado, em geral o minimizador de ℰ_ε

    Raises:
        ValueError: se B ≤ 1
    """
    if not (math.isfinite(B) and B > 1.0):
        raise ValueError(f"B deve ser > 1, recebido {B!r}")
    ell = math.log(B)
    g_tilde = g_tilde_const(B, 1.0 / (math.sqrt(2.0) * ell))
    d = dirichlet_norm(phi)
    bracket = (0.5 * p.alpha + p.beta) * ell * (1.0 + 8.0 * d ** 1.5 + abs(g_tilde) * d)
    return PerturbedBound(B=B, scaled_energy=ell * ell * energy(phi, spec).total,
                          bracket=bracket, g_tilde=g_tilde)


def _solve_point(spec: LadderSpec, B: float, opts: SolveOptions) -> LadderPoint:
    p = spec.params_for(B)
    try:
        grid = spec.grid_policy.grid_for(B)
        cspec = classical_1d_spec(B, p, grid)
        trial = trial_state(B, p, grid)
        bound = TrialBound(
            value=energy(trial, cspec).total,
            leading=mu_field(B) ** 2 * pekar_energy_closed(p),
            bracket=extraction_bracket(B, p, trial),
        )
        report = minimize(cspec, replace(opts, seed_profile=trial))
    except PolaronError as exc:
        logger.error(f"❌ B={B:.3g}: {exc}")
        return LadderPoint(B=B, e_eff=math.nan, ok=False, error=str(exc))
    return LadderPoint(
        B=B,
        e_eff=report.energy.total,
        ok=report.converged,
        iterations=report.iterations,
        trial=bound,
        report=report,
        error=None if report.converged else "solver não convergiu",
    )


def ladder_energies(spec: LadderSpec, opts: SolveOptions | None = None,
                    workers: int | None = None) -> list[LadderPoint]:
    """
    Minimiza o funcional clássico em cada campo da escada.

    Pontos independentes rodam em paralelo; a saída segue a ordem dos campos.
    """
    opts = opts or SolveOptions()
    monitor = WorkMonitor(f"escada {spec.model.value}")
    logger.info(f"🚀 escada {spec.model.value}: {len(spec.fields)} campos")
    points = ordered_map(lambda B: _solve_point(spec, B, opts), spec.fields,
                         workers=workers, monitor=monitor, is_success=lambda pt: pt.ok)
    monitor.log_summary()
    return points


def _pairs(points: Iterable) -> list[tuple[float, float]]:
    out = []
    for pt in points:
        if isinstance(pt, LadderPoint):
            if pt.ok and math.isfinite(pt.e_eff):
                out.append((pt.B, pt.e_eff))
        else:
            B, e = pt
            out.append((float(B), float(e)))
    return out


def fit_expansion(points: Sequence) -> FitResult:
    """
    Ajuste e(B) ≈ a(ln B)² + b·ln B·ln ln B + c·ln B por mínimos quadrados.

    Args:
        points: Pares (B, e_eff) ou LadderPoint (pontos com falha são ignorados)

    Raises:
        FitError: menos de 4 pontos ou matriz de projeto degenerada
    """
    pairs = _pairs(points)
    if len(pairs) < 4:
        raise FitError(f"o ajuste exige ao menos 4 pontos, recebidos {len(pairs)}")
    B = np.array([b for b, _ in pairs])
    e = np.array([v for _, v in pairs])
    if np.any(B <= MIN_FIELD):
        raise FitError("todos os campos devem exceder e^e")
    ln = np.log(B)
    lnln = np.log(ln)
    design = np.column_stack((ln * ln, ln * lnln, ln))
    scale = np.linalg.norm(design, axis=0)
    scaled = design / scale
    if np.linalg.matrix_rank(scaled) < 3:
        raise FitError("matriz de projeto degenerada (espaçamento de B insuficiente)")
    coef, *_ = np.linalg.lstsq(scaled, e, rcond=None)
    coef = coef / scale
    residual = float(np.max(np.abs(design @ coef - e)))
    return FitResult(a=float(coef[0]), b=float(coef[1]), c=float(coef[2]), residual=residual)


def expansion_terms(B: float, beta: float) -> tuple[float, ...]:
    """Os seis termos da expansão hidrogênica, na ordem da soma."""
    _check_ladder_field(B)
    ln = math.log(B)
    lnln = math.log(ln)
    b2 = beta * beta
    return (
        B,
        -0.25 * b2 * ln * ln,
        b2 * ln * lnln,
        -b2 * (-0.5 * EULER_GAMMA + math.log(2.0)) * ln,
        -b2 * lnln * lnln,
        2.0 * b2 * (-0.5 * EULER_GAMMA - 1.0 + math.log(2.0)) * lnln,
    )


def hydrogenic_expansion(B: float, beta: float) -> float:
    """
    B − (β²/4)(ln B)² + β² ln B ln ln B − β²(−γ_E/2 + ln 2) ln B
    − β²(ln ln B)² + 2β²(−γ_E/2 − 1 + ln 2) ln ln B.

    Para B grande a soma arredonda a correção; use hydrogenic_correction
    quando só os termos após B interessam.
    """
    if beta == 0:
        return float(B)
    return math.fsum(expansion_terms(B, beta))


def hydrogenic_correction(B: float, beta: float) -> float:
    """hydrogenic_expansion(B, β) − B, somada sem passar por B."""
    if beta == 0:
        return 0.0
    return math.fsum(expansion_terms(B, beta)[1:])


def energy_law(B: float, p: ModelParams) -> float:
    """B + 𝔢₀(ln B)²."""
    return B + pekar_energy_closed(p) * math.log(B) ** 2


def upper_law(B: float, p: ModelParams) -> float:
    """B + 𝔢₀(ln B)² − 4𝔢₀ ln B ln ln B (sem a constante C ln B)."""
    e0 = pekar_energy_closed(p)
    ln = math.log(B)
    return B + e0 * ln * ln - 4.0 * e0 * ln * math.log(ln)
