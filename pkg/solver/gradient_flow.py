"""
Minimização de funcionais discretos sobre a esfera unitária de L².

Funcionalidades:
- Gradiente variacional exato do funcional discreto
- Fluxo gradiente projetado com métrica de Sobolev, busca com retrocesso
  e módulo do iterado a cada passo
- Recentralização periódica para funcionais invariantes por translação
- Verificação periódica do gradiente por diferenças finitas
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import solve_banded

from core.errors import GridError, SolverError
from core.functional import EnergySplit, FunctionalSpec, energy, toeplitz_apply
from core.grid import GridFn, inner, normalize

logger = logging.getLogger(__name__)

# Menor passo tentado antes de declarar estagnação.
MIN_STEP = 1e-12
# Teto do passo; o passo natural da métrica de Sobolev é ~1.
MAX_STEP = 4.0


class SeedProfile(Enum):
    GAUSSIAN = "gaussian"
    SECH = "sech"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class SolveOptions:
    """
    Controles do fluxo gradiente.

    seed_profile aceita um SeedProfile ou uma GridFn (semente explícita).
    tol_grad limita a norma de Sobolev do gradiente projetado, que não
    depende do espaçamento da grade. check_gradient_every = 0 desliga a
    verificação por diferenças finitas durante a minimização.
    """

    max_iter: int = 20000
    tol_energy: float = 1e-13
    tol_grad: float = 1e-6
    step_init: float = 1.0
    step_shrink: float = 0.5
    seed_profile: SeedProfile | GridFn = SeedProfile.GAUSSIAN
    seed_width: float | None = None
    recenter_every: int = 50
    check_gradient_every: int = 100
    gradient_check_directions: int = 20

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError(f"max_iter deve ser ≥ 1, recebido {self.max_iter}")
        if not (self.tol_energy > 0 and self.tol_grad > 0):
            raise ValueError("tol_energy e tol_grad devem ser positivos")
        if self.check_gradient_every < 0 or self.gradient_check_directions < 1:
            raise ValueError("verificação do gradiente mal configurada")
        if not (0.0 < self.step_shrink < 1.0):
            raise ValueError(f"step_shrink deve estar em (0,1), recebido {self.step_shrink}")
        if not self.step_init > 0:
            raise ValueError(f"step_init deve ser positivo, recebido {self.step_init}")


@dataclass(frozen=True)
class SolveReport:
    """grad_norm é a norma de Sobolev do gradiente projetado no último iterado."""

    minimizer: GridFn
    energy: EnergySplit
    iterations: int
    converged: bool
    energy_trace: tuple[float, ...]
    grad_norm: float
    gradient_checks: tuple[float, ...] = field(default=())


def _check_grid(f: GridFn, spec: FunctionalSpec) -> None:
    if f.grid != spec.grid:
        raise GridError(f"função na grade {f.grid}, funcional na grade {spec.grid}")


def _atom_gradient(values: np.ndarray, spec: FunctionalSpec) -> np.ndarray:
    """−2(w/peso)·f no nó de cada átomo."""
    g = np.zeros_like(values)
    weights = spec.grid.weights
    for atom, i in zip(spec.delta_atoms, spec.atom_indices):
        g[i] -= 2.0 * atom.weight * values[i] / weights[i]
    return g


def variational_gradient(f: GridFn, spec: FunctionalSpec) -> GridFn:
    """
    Gradiente L² do funcional discreto: W⁻¹∂E/∂f, com W os pesos do trapézio.

    Assim ⟨gradiente, h⟩ coincide com a derivada direcional discreta.
    """
    _check_grid(f, spec)
    grid = spec.grid
    v = f.values
    w = grid.weights
    h = grid.spacing

    raw = np.zeros_like(v)
    if spec.kinetic_coeff:
        d = np.diff(v) / h
        raw[:-1] -= 2.0 * d
        raw[1:] += 2.0 * d
        raw *= spec.kinetic_coeff
    g = raw / w
    if spec.quartic_coeff:
        g -= 4.0 * spec.quartic_coeff * v ** 3
    g += _atom_gradient(v, spec)
    if spec.potential is not None:
        g += 2.0 * spec.potential_sign * spec.potential.values * v
    if spec.kernel_row is not None:
        g -= 4.0 * v * toeplitz_apply(spec.kernel_row, w * v * v)
    return GridFn(grid, g)


def directional_derivative_check(f: GridFn, spec: FunctionalSpec, directions: list[GridFn],
                                 eps: float = 1e-5) -> float:
    """
    Maior desvio |⟨∇E, h⟩ − (E(f+εh) − E(f−εh))/2ε| sobre as direções dadas.
    """
    g = variational_gradient(f, spec)
    worst = 0.0
    for d in directions:
        plus = energy(f + eps * d, spec).total
        minus = energy(f - eps * d, spec).total
        fd = (plus - minus) / (2.0 * eps)
        worst = max(worst, abs(inner(g, d) - fd))
    return worst


def smooth_directions(grid, count: int, seed: int) -> list[GridFn]:
    """Direções suaves e normalizadas (somas de três gaussianas com sinais)."""
    rng = np.random.default_rng(seed)
    x = grid.nodes
    scale = grid.half_width / 8.0
    out = []
    for _ in range(count):
        values = np.zeros(grid.n)
        for _ in range(3):
            center = rng.uniform(-scale, scale)
            width = rng.uniform(0.2, 1.0) * scale
            values += rng.uniform(-1.0, 1.0) * np.exp(-0.5 * ((x - center) / width) ** 2)
        out.append(normalize(GridFn(grid, values)))
    return out


def _default_width(spec: FunctionalSpec) -> float:
    strength = 2.0 * spec.quartic_coeff + 2.0 * spec.total_atom_weight
    if strength > 0:
        return 2.0 / strength
    return spec.grid.half_width / 8.0


def make_seed(spec: FunctionalSpec, opts: SolveOptions) -> GridFn:
    """Semente determinística normalizada."""
    grid = spec.grid
    if isinstance(opts.seed_profile, GridFn):
        if opts.seed_profile.grid != grid:
            raise GridError("semente em outra grade")
        return normalize(abs(opts.seed_profile))
    width = opts.seed_width or _default_width(spec)
    x = grid.nodes / width
    if opts.seed_profile is SeedProfile.GAUSSIAN:
        values = np.exp(-0.5 * x * x)
    elif opts.seed_profile is SeedProfile.SECH:
        values = 1.0 / np.cosh(np.minimum(np.abs(x), 700.0))
    elif opts.seed_profile is SeedProfile.EXPONENTIAL:
        values = np.exp(-np.abs(x))
    else:
        raise ValueError(f"perfil de semente desconhecido: {opts.seed_profile!r}")
    return normalize(GridFn(grid, values))


def _stiffness_bands(spec: FunctionalSpec, shift: float) -> np.ndarray:
    """Bandas de A = 2k·K + 2c·W (K: rigidez de Σ h·d², W: pesos)."""
    grid = spec.grid
    n, h = grid.n, grid.spacing
    k = spec.kinetic_coeff
    main = np.full(n, 2.0 / h)
    main[0] = main[-1] = 1.0 / h
    off = np.full(n - 1, -1.0 / h)
    bands = np.zeros((3, n))
    bands[0, 1:] = 2.0 * k * off
    bands[1] = 2.0 * k * main + 2.0 * shift * grid.weights
    bands[2, :-1] = 2.0 * k * off
    return bands


def _recenter(f: GridFn) -> GridFn:
    shift = f.grid.origin_index - int(np.argmax(f.values))
    if shift == 0:
        return f
    return GridFn(f.grid, np.roll(f.values, shift))


def minimize(spec: FunctionalSpec, opts: SolveOptions | None = None) -> SolveReport:
    """
    Fluxo gradiente projetado na esfera unitária.

    A direção é o gradiente L² levado pela métrica de Sobolev (−Δ + c)
    e projetada no espaço tangente; o passo é aceito quando a energia não
    aumenta e encolhido caso contrário. Nessa métrica o passo natural é ~1,
    por isso o passo inicial é step_init e não 0.1/‖∇E‖∞.

    Converge quando a queda de energia fica abaixo de tol_energy e a norma
    de Sobolev do gradiente projetado fica abaixo de tol_grad. Se a busca
    linear estagnar, só conta como convergência se o teste do gradiente
    já vale.

    Args:
        spec: Funcional discreto
        opts: Opções (padrões de SolveOptions se None)

    Returns:
        SolveReport com minimizador normalizado e não negativo

    Raises:
        SolverError: se a energia virar NaN
    """
    opts = opts or SolveOptions()
    grid = spec.grid
    w = grid.weights

    f = make_seed(spec, opts)
    current = energy(f, spec).total
    if not math.isfinite(current):
        raise SolverError("energia não finita na semente")
    trace = [current]
    checks: list[float] = []
    step = opts.step_init
    converged = False
    residual = math.inf
    iterations = 0

    for iterations in range(1, opts.max_iter + 1):
        g = variational_gradient(f, spec)
        multiplier = inner(g, f)

        if opts.check_gradient_every and iterations % opts.check_gradient_every == 0:
            dirs = smooth_directions(grid, opts.gradient_check_directions, seed=iterations)
            checks.append(directional_derivative_check(f, spec, dirs))

        shift = max(-0.5 * multiplier, 1.0 / grid.half_width ** 2)
        rhs = np.column_stack((w * g.values, w * f.values))
        sol = solve_banded((1, 1), _stiffness_bands(spec, shift), rhs)
        s_g, s_f = sol[:, 0], sol[:, 1]
        theta = np.dot(w * f.values, s_g) / np.dot(w * f.values, s_f)
        direction = s_g - theta * s_f
        # ‖d‖²_A = ⟨d, g − θf⟩_W
        residual = math.sqrt(max(float(np.dot(w * direction, g.values - theta * f.values)), 0.0))
        grad_ok = residual < opts.tol_grad * max(1.0, abs(multiplier))

        accepted = False
        while step >= MIN_STEP:
            trial = np.abs(f.values - step * direction)
            norm = math.sqrt(float(np.dot(w, trial * trial)))
            if norm == 0.0 or not math.isfinite(norm):
                step *= opts.step_shrink
                continue
            if not np.all(np.isfinite(trial)):
                raise SolverError(f"iterado não finito na iteração {iterations}")
            candidate = GridFn(grid, trial / norm)
            value = energy(candidate, spec).total
            if math.isnan(value):
                raise SolverError(f"energia NaN na iteração {iterations} (passo {step:.3g})")
            if value <= current:
                accepted = True
                break
            step *= opts.step_shrink

        if not accepted:
            converged = grad_ok
            logger.debug(f"busca linear estagnou na iteração {iterations} (resíduo {residual:.2e})")
            break

        decrease = current - value
        f, current = candidate, value
        trace.append(current)
        step = min(step / opts.step_shrink, MAX_STEP)

        if (spec.is_translation_invariant and opts.recenter_every
                and iterations % opts.recenter_every == 0):
            moved = _recenter(f)
            moved_value = energy(moved, spec).total
            if moved_value <= current:
                f, current = moved, moved_value
                trace.append(current)

        if decrease < opts.tol_energy * max(1.0, abs(current)) and grad_ok:
            converged = True
            break

        if iterations % 1000 == 0:
            logger.debug(f"iteração {iterations}: E={current:.15g} resíduo={residual:.3e}")

    report = SolveReport(
        minimizer=f,
        energy=energy(f, spec),
        iterations=iterations,
        converged=converged,
        energy_trace=tuple(trace),
        grad_norm=residual,
        gradient_checks=tuple(checks),
    )
    status = "✅" if converged else "⚠️"
    logger.info(f"{status} minimização: E={report.energy.total:.12g} "
                f"iterações={iterations} resíduo={residual:.2e}")
    return report
