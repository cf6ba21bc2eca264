"""
Energia perturbada 𝔢_ε = inf (ℰ₀(φ) − ε∫W|φ|²) e a identidade da derivada.

Funcionalidades:
- PerturbPotential: átomos (parte de medida) + parte limitada ω
- e_eps com guarda de coercividade
- derivative_check: secantes laterais contra −∫Wφ₀²
- density_pairing: pareamento da densidade reescalada no funcional clássico
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from asymptotics import GridPolicy, classical_1d_spec, trial_state
from closedform import pekar_energy_closed, phi0, phi0_limit_alpha0, scaled_trial
from core.errors import CoercivityError
from core.functional import DeltaAtom, FunctionalSpec, pekar_spec
from core.grid import Grid1D, GridFn
from core.params import ModelParams
from effpot.potentials import mu_field
from solver.diagnostics import decay_grid, richardson_energy
from solver.gradient_flow import SolveOptions, SolveReport, minimize

logger = logging.getLogger(__name__)

EPS_LADDER = (1e-2, 1e-3, 1e-4)
# A guarda exige que a grade resolva o comprimento 1/c implicado pela cota.
COERCIVITY_RESOLUTION = 0.25

BoundedPart = Callable[[np.ndarray], np.ndarray] | GridFn


@dataclass(frozen=True)
class PerturbPotential:
    """
    W = μ + ω: átomos (location, weight) e parte limitada opcional.

    bounded_part aceita uma função vetorizada de x ou uma GridFn.
    """

    atoms: tuple[DeltaAtom, ...] = ()
    bounded_part: BoundedPart | None = None
    bounded_sup: float = field(default=math.nan)

    def __post_init__(self):
        atoms = tuple(a if isinstance(a, DeltaAtom) else DeltaAtom(*a) for a in self.atoms)
        for a in atoms:
            if not (math.isfinite(a.location) and math.isfinite(a.weight)):
                raise ValueError(f"átomo inválido: {a}")
        object.__setattr__(self, "atoms", atoms)

    @property
    def total_variation(self) -> float:
        """|μ|(ℝ) = Σ|w|."""
        return math.fsum(abs(a.weight) for a in self.atoms)

    @property
    def is_zero(self) -> bool:
        return not self.atoms and self.bounded_part is None

    def sample(self, grid: Grid1D, scale: float = 1.0) -> np.ndarray | None:
        """Valores de ω(scale·x) nos nós da grade."""
        if self.bounded_part is None:
            return None
        if isinstance(self.bounded_part, GridFn):
            source = self.bounded_part
            x = scale * grid.nodes
            if source.grid == grid and scale == 1.0:
                return np.array(source.values)
            return np.interp(x, source.grid.nodes, source.values, left=0.0, right=0.0)
        values = np.asarray(self.bounded_part(scale * grid.nodes), dtype=float)
        if values.shape == ():
            values = np.full(grid.n, float(values))
        if not np.all(np.isfinite(values)):
            raise ValueError("parte limitada de W não é finita na grade")
        return values

    def sup_norm(self, grid: Grid1D) -> float:
        if math.isfinite(self.bounded_sup):
            return self.bounded_sup
        values = self.sample(grid)
        return 0.0 if values is None else float(np.max(np.abs(values)))


def atom_potential(location: float = 0.0, weight: float = 1.0) -> PerturbPotential:
    return PerturbPotential(atoms=(DeltaAtom(location, weight),))


def gaussian_potential(amplitude: float = 1.0, width: float = 1.0) -> PerturbPotential:
    """ω(x) = amplitude·e^{−x²/width²}."""
    return PerturbPotential(
        bounded_part=lambda x: amplitude * np.exp(-(np.asarray(x) / width) ** 2),
        bounded_sup=abs(amplitude),
    )


def constant_potential(value: float = 1.0) -> PerturbPotential:
    return PerturbPotential(
        bounded_part=lambda x: np.full(np.shape(x), value, dtype=float),
        bounded_sup=abs(value),
    )


def coercivity_bound(eps: float, W: PerturbPotential, p: ModelParams, grid: Grid1D) -> float:
    """
    Cota inferior de 𝔢_ε após absorver os termos pontuais no cinético:
    −(α/2 + |ε||μ|(ℝ) + β)² − |ε|‖ω‖∞.
    """
    strength = 0.5 * p.alpha + abs(eps) * W.total_variation + p.beta
    return -strength ** 2 - abs(eps) * W.sup_norm(grid)


def _snap_atoms(eps: float, W: PerturbPotential, grid: Grid1D) -> tuple[DeltaAtom, ...]:
    atoms = []
    for atom in W.atoms:
        index, distance = grid.snap(atom.location)
        if distance > 0:
            logger.debug(f"átomo em {atom.location} movido {distance:.3e} até o nó {index}")
        atoms.append(DeltaAtom(float(grid.nodes[index]), eps * atom.weight))
    return tuple(atoms)


def perturbed_spec(eps: float, W: PerturbPotential, p: ModelParams, grid: Grid1D) -> FunctionalSpec:
    """
    ℰ_ε = ℰ₀ − ε∫W|φ|²: átomos com peso ε·w e ω como potencial de sinal −1.

    Raises:
        CoercivityError: se a grade não resolve a escala implicada pela cota
    """
    base = pekar_spec(p, grid)
    if eps == 0 or W.is_zero:
        return base
    bound = coercivity_bound(eps, W, p, grid)
    if math.sqrt(-bound) * grid.spacing > COERCIVITY_RESOLUTION:
        raise CoercivityError(
            f"|ε|={abs(eps):g} grande demais: cota {bound:.4g} exige espaçamento "
            f"≤ {COERCIVITY_RESOLUTION / math.sqrt(-bound):.3g}"
        )
    spec = base.with_atoms(_snap_atoms(eps, W, grid))
    omega = W.sample(grid)
    if omega is not None:
        spec = spec.with_potential(GridFn(grid, eps * omega), sign=-1)
    return spec


def e_eps(eps: float, W: PerturbPotential, p: ModelParams, grid: Grid1D | None = None,
          opts: SolveOptions | None = None, extrapolate: bool = False) -> float:
    """
    Mínimo de ℰ_ε na esfera unitária.

    Args:
        eps: Intensidade da perturbação
        W: Potencial de perturbação
        p: Parâmetros α, β
        grid: Grade (padrão pela taxa (α+2β)/4)
        extrapolate: Usa Richardson entre h e 2h
    """
    grid = grid or decay_grid(p.decay_rate, 8193)
    if extrapolate:
        return richardson_energy(lambda g: perturbed_spec(eps, W, p, g), grid, opts).extrapolated
    return e_eps_with_state(eps, W, p, grid, opts).energy.total


def e_eps_with_state(eps: float, W: PerturbPotential, p: ModelParams, grid: Grid1D | None = None,
                     opts: SolveOptions | None = None) -> SolveReport:
    """Como e_eps, mas devolve o relatório completo (minimizador φ_ε incluído)."""
    grid = grid or decay_grid(p.decay_rate, 8193)
    return minimize(perturbed_spec(eps, W, p, grid), opts)


def grid_pairing(W: PerturbPotential, f: GridFn) -> float:
    """∫W|f|² na grade de f (átomos no nó mais próximo)."""
    grid = f.grid
    dens = f.values ** 2
    total = math.fsum(a.weight * dens[grid.snap(a.location)[0]] for a in W.atoms)
    omega = W.sample(grid)
    if omega is not None:
        total += float(np.dot(grid.weights, omega * dens))
    return total


def _phi0_values(p: ModelParams, x):
    return phi0_limit_alpha0(p.beta, x) if p.alpha == 0 else phi0(p, x)


def pairing_target(W: PerturbPotential, p: ModelParams) -> float:
    """∫Wφ₀² (átomos: Σ w·φ₀(loc)²; parte limitada por quadratura adaptativa)."""
    total = math.fsum(a.weight * _phi0_values(p, a.location) ** 2 for a in W.atoms)
    if W.bounded_part is None:
        return total
    if isinstance(W.bounded_part, GridFn):
        grid = W.bounded_part.grid
        dens = _phi0_values(p, grid.nodes) ** 2
        return total + float(np.dot(grid.weights, W.bounded_part.values * dens))

    def integrand(x):
        return float(W.bounded_part(np.array([x]))[0]) * _phi0_values(p, x) ** 2

    value, _ = quad(integrand, -math.inf, math.inf, epsabs=1e-13, epsrel=1e-12, limit=400)
    return total + value


@dataclass(frozen=True)
class DerivativeReport:
    """
    Secantes em ε = 0 e o sanduíche de cada uma.

    right_lower[i] = −∫W|φ_ε|² − ε e left_upper[i] = −∫W|φ_{−ε}|² + ε, com
    φ_{±ε} os minimizadores discretos; do outro lado a cota é discrete_target.
    Os lados são comparados com as secantes discretas (right_discrete,
    left_discrete), que coincidem com right/left sem extrapolação.
    """

    eps: tuple[float, ...]
    left: tuple[float, ...]
    right: tuple[float, ...]
    target: float
    discrete_target: float
    observed_order: float
    closed_form_gap: float | None = None
    right_lower: tuple[float, ...] = ()
    left_upper: tuple[float, ...] = ()
    right_discrete: tuple[float, ...] = ()
    left_discrete: tuple[float, ...] = ()

    @property
    def two_sided(self) -> tuple[float, ...]:
        return tuple(0.5 * (a + b) for a, b in zip(self.left, self.right))

    def sandwich_violations(self, tol: float = 1e-8) -> int:
        """Número de secantes fora de [−∫W|φ_ε|² − ε, −∫Wφ₀²] (invertido para −ε)."""
        upper = self.discrete_target + tol
        bad = sum(not (lo - tol <= r <= upper)
                  for lo, r in zip(self.right_lower, self.right_discrete))
        bad += sum(not (self.discrete_target - tol <= l <= hi + tol)
                   for hi, l in zip(self.left_upper, self.left_discrete))
        return bad


def _observed_order(eps: Sequence[float], errors: Sequence[float]) -> float:
    orders = []
    for (e1, r1), (e2, r2) in zip(zip(eps, errors), zip(eps[1:], errors[1:])):
        if r1 > 0 and r2 > 0:
            orders.append(math.log(r1 / r2) / math.log(e1 / e2))
    return min(orders) if orders else math.inf


def _solve_eps(eps: float, W: PerturbPotential, p: ModelParams, grid: Grid1D,
               opts: SolveOptions | None, extrapolate: bool) -> tuple[float, SolveReport]:
    if extrapolate:
        result = richardson_energy(lambda g: perturbed_spec(eps, W, p, g), grid, opts)
        return result.extrapolated, result.fine
    report = e_eps_with_state(eps, W, p, grid, opts)
    return report.energy.total, report


def derivative_check(W: PerturbPotential, p: ModelParams, grid: Grid1D | None = None,
                     eps_ladder: Sequence[float] = EPS_LADDER, opts: SolveOptions | None = None,
                     extrapolate: bool = False) -> DerivativeReport:
    """
    Secantes laterais de ε ↦ 𝔢_ε em ε = 0 contra −∫Wφ₀².

    left = (𝔢₀ − 𝔢_{−ε})/ε, right = (𝔢_ε − 𝔢₀)/ε. A ordem observada compara a
    secante direita com a derivada discreta −Σ w·φ_h² do próprio minimizador
    (ou com −∫Wφ₀² quando extrapolate=True). O sanduíche usa sempre as
    energias discretas da grade fina.

    Returns:
        DerivativeReport (closed_form_gap preenchido quando W é um átomo em 0)
    """
    if p.alpha <= 0:
        raise ValueError("derivative_check exige α > 0")
    grid = grid or decay_grid(p.decay_rate, 8193)
    target = -pairing_target(W, p)

    base = minimize(pekar_spec(p, grid), opts)
    e0_discrete = base.energy.total
    if extrapolate:
        e0 = e_eps(0.0, W, p, grid, opts, extrapolate=True)
    else:
        e0 = e0_discrete
    discrete = -grid_pairing(W, base.minimizer)

    left, right = [], []
    left_d, right_d, right_lower, left_upper = [], [], [], []
    for eps in eps_ladder:
        plus, plus_state = _solve_eps(eps, W, p, grid, opts, extrapolate)
        minus, minus_state = _solve_eps(-eps, W, p, grid, opts, extrapolate)
        right.append((plus - e0) / eps)
        left.append((e0 - minus) / eps)
        right_d.append((plus_state.energy.total - e0_discrete) / eps)
        left_d.append((e0_discrete - minus_state.energy.total) / eps)
        right_lower.append(-grid_pairing(W, plus_state.minimizer) - eps)
        left_upper.append(-grid_pairing(W, minus_state.minimizer) + eps)

    # Richardson remove o O(h²): a referência passa a ser a derivada contínua.
    reference = target if extrapolate else discrete
    order = _observed_order(list(eps_ladder), [abs(r - reference) for r in right])

    gap = None
    if W.bounded_part is None and len(W.atoms) == 1 and W.atoms[0].location == 0.0:
        w = W.atoms[0].weight
        gap = max(
            abs(r - (pekar_energy_closed(p.with_beta(p.beta + eps * w))
                     - pekar_energy_closed(p)) / eps)
            for eps, r in zip(eps_ladder, right)
        )
    logger.info(f"📊 derivada: alvo={target:.10g} discreta={discrete:.10g} ordem={order:.3g}")
    report = DerivativeReport(
        eps=tuple(eps_ladder), left=tuple(left), right=tuple(right), target=target,
        discrete_target=discrete, observed_order=order, closed_form_gap=gap,
        right_lower=tuple(right_lower), left_upper=tuple(left_upper),
        right_discrete=tuple(right_d), left_discrete=tuple(left_d),
    )
    violations = report.sandwich_violations()
    if violations:
        logger.warning(f"⚠️ {violations} secantes fora do sanduíche")
    return report


def concavity_defects(eps_values: Sequence[float], delta: float, W: PerturbPotential,
                      p: ModelParams, grid: Grid1D | None = None,
                      opts: SolveOptions | None = None) -> list[float]:
    """e(ε−δ) + e(ε+δ) − 2e(ε) em cada ε; concavidade ⇔ todos ≤ 0."""
    grid = grid or decay_grid(p.decay_rate)
    cache: dict[float, float] = {}

    def value(eps: float) -> float:
        key = round(eps, 15)
        if key not in cache:
            cache[key] = e_eps(eps, W, p, grid, opts)
        return cache[key]

    return [value(e - delta) + value(e + delta) - 2.0 * value(e) for e in eps_values]


def classical_minimizer(B: float, p: ModelParams, policy: GridPolicy,
                        opts: SolveOptions | None) -> GridFn:
    """Minimizador do funcional clássico em B, semeado pelo estado teste."""
    grid = policy.grid_for(B)
    seed = trial_state(B, p, grid)
    base = opts or SolveOptions()
    return minimize(classical_1d_spec(B, p, grid), replace(base, seed_profile=seed)).minimizer


def density_pairing(B: float, W: PerturbPotential, p: ModelParams,
                    policy: GridPolicy = GridPolicy(), opts: SolveOptions | None = None,
                    minimizer: GridFn | None = None) -> float:
    """
    (1/s)∫W(x)ρ_B(x/s)dx com s = μ(B) e ρ_B a densidade do minimizador clássico.

    A densidade é a do funcional clássico no nível de Landau mais baixo, não o
    estado fundamental do modelo quantizado.
    """
    s = mu_field(B)
    f = minimizer if minimizer is not None else classical_minimizer(B, p, policy, opts)
    grid = f.grid
    rho = f.values ** 2
    total = 0.0
    for atom in W.atoms:
        index, _ = grid.snap(atom.location / s)
        total += atom.weight * rho[index] / s
    omega = W.sample(grid, scale=s)
    if omega is not None:
        total += float(np.dot(grid.weights, omega * rho))
    return total


def density_l1_distance(B: float, p: ModelParams, minimizer: GridFn) -> float:
    """∫|ρ_B(x) − μφ₀(μx)²| dx na grade do minimizador."""
    grid = minimizer.grid
    reference = scaled_trial(p, mu_field(B), grid.nodes) ** 2
    return float(np.dot(grid.weights, np.abs(minimizer.values ** 2 - reference)))
