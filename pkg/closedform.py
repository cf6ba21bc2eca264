"""
Fórmulas fechadas do problema 1D de Pekar com poço delta.

Funcionalidades:
- Energia mínima 𝔢₀ = −(α² + 6αβ + 12β²)/48 e o caso invariante por translação
- Minimizador φ₀ (perfil sech deslocado) e o limite α → 0
- Multiplicador de Lagrange λ e deslocamento τ
- Resíduos de Euler–Lagrange usados como oráculo pelos demais módulos
"""

import math
from dataclasses import dataclass

import numpy as np

from core.errors import DegenerateFunctionError, GridError
from core.grid import GridFn
from core.params import ModelParams


@dataclass(frozen=True)
class SechSolution:
    """λ = ((α+2β)/4)² e τ = −(4/(α+2β))·artanh(2β/(α+2β))."""

    lam: float
    tau: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class ELResiduals:
    interior: float
    jump: float
    first_integral: float

    def as_tuple(self) -> tuple[float, float, float]:
        return self.interior, self.jump, self.first_integral


def _artanh(t: float) -> float:
    return 0.5 * math.log((1.0 + t) / (1.0 - t))


def _sech(z: np.ndarray) -> np.ndarray:
    # 2e^{−z}/(1 + e^{−2z}) não transborda para z grande
    e = np.exp(-np.abs(z))
    return 2.0 * e / (1.0 + e * e)


def _require_alpha(p: ModelParams) -> None:
    if p.alpha <= 0:
        raise DegenerateFunctionError(
            "α = 0 degenera o perfil sech; use phi0_limit_alpha0"
        )


def pekar_energy_closed(p: ModelParams) -> float:
    """Retorna 𝔢₀ = −(α² + 6αβ + 12β²)/48."""
    a, b = p.alpha, p.beta
    return -(a * a + 6.0 * a * b + 12.0 * b * b) / 48.0


def pekar_energy_translation_invariant(alpha: float) -> float:
    """𝔢_T = −α²/48 (problema sem o poço delta)."""
    return -alpha * alpha / 48.0


def energy_beta_derivative(p: ModelParams) -> float:
    """∂𝔢₀/∂β = −(6α + 24β)/48."""
    return -(6.0 * p.alpha + 24.0 * p.beta) / 48.0


def sech_solution(p: ModelParams) -> SechSolution:
    """
    Multiplicador e deslocamento da solução sech.

    Raises:
        DegenerateFunctionError: se α = 0
    """
    _require_alpha(p)
    s = p.alpha + 2.0 * p.beta
    return SechSolution(
        lam=(s / 4.0) ** 2,
        tau=-(4.0 / s) * _artanh(2.0 * p.beta / s),
        alpha=p.alpha,
        beta=p.beta,
    )


def phi0(p: ModelParams, x):
    """
    Minimizador φ₀(x) = (α+2β)/(√(8α)·cosh(((α+2β)/4)|x| + artanh(2β/(α+2β)))).

    Args:
        p: Parâmetros (α > 0)
        x: Ponto ou array de pontos

    Returns:
        Valores de φ₀ (mesmo formato de x)
    """
    _require_alpha(p)
    s = p.alpha + 2.0 * p.beta
    z = 0.25 * s * np.abs(np.asarray(x, dtype=float)) + _artanh(2.0 * p.beta / s)
    values = s / math.sqrt(8.0 * p.alpha) * _sech(z)
    return float(values) if np.ndim(values) == 0 else values


def phi0_limit_alpha0(beta: float, x):
    """Limite α → 0⁺ de φ₀: √(β/2)·e^{−β|x|/2}."""
    if beta <= 0:
        raise ValueError(f"β deve ser positivo, recebido {beta}")
    values = math.sqrt(0.5 * beta) * np.exp(-0.5 * beta * np.abs(np.asarray(x, dtype=float)))
    return float(values) if np.ndim(values) == 0 else values


def phi_translation_invariant(alpha: float, x):
    """Minimizador centrado do problema sem delta: √(α/8)·sech(αx/4)."""
    if alpha <= 0:
        raise DegenerateFunctionError("o problema invariante por translação exige α > 0")
    values = math.sqrt(alpha / 8.0) * _sech(0.25 * alpha * np.asarray(x, dtype=float))
    return float(values) if np.ndim(values) == 0 else values


def limiting_density(p: ModelParams, x):
    """Densidade limite φ₀²; para α = 0 vale (β/2)e^{−β|x|}."""
    if p.alpha == 0:
        return np.square(phi0_limit_alpha0(p.beta, x))
    return np.square(phi0(p, x))


def phi0_origin_sq(p: ModelParams) -> float:
    """φ₀(0)² = (α + 4β)/8."""
    return (p.alpha + 4.0 * p.beta) / 8.0


def phi0_quartic(p: ModelParams) -> float:
    """∫φ₀⁴ = 2(λ + 𝔢₀)/α."""
    _require_alpha(p)
    return 2.0 * (sech_solution(p).lam + pekar_energy_closed(p)) / p.alpha


def phi0_kinetic(p: ModelParams) -> float:
    """‖φ₀′‖₂² = 2𝔢₀ + λ + β(α + 4β)/8 (vale também para α = 0)."""
    lam = (p.decay_rate) ** 2
    return 2.0 * pekar_energy_closed(p) + lam + p.beta * phi0_origin_sq(p)


def scaled_trial(p: ModelParams, mu: float, x):
    """Estado teste dilatado √μ·φ₀(μx) (α = 0 usa o limite exponencial)."""
    xs = mu * np.asarray(x, dtype=float)
    base = phi0_limit_alpha0(p.beta, xs) if p.alpha == 0 else phi0(p, xs)
    return math.sqrt(mu) * base


def el_residuals(psi: GridFn, p: ModelParams, lam: float) -> ELResiduals:
    """
    Resíduos do sistema de Euler–Lagrange −ψ″ − αψ³ = −λψ, salto em 0 e integral primeira.

    O resíduo interior exclui os 3 nós mais próximos da origem e os 2 nós de
    borda; o salto usa estênceis unilaterais de segunda ordem.

    Args:
        psi: Função amostrada (grade com nó na origem)
        p: Parâmetros α, β
        lam: Multiplicador λ > 0

    Returns:
        ELResiduals(interior, jump, first_integral)
    """
    grid = psi.grid
    if grid.n < 9:
        raise GridError(f"são necessários ao menos 9 nós, recebido n={grid.n}")
    if abs(grid.nodes[grid.origin_index]) != 0.0:
        raise GridError("a grade não contém a origem")
    if lam <= 0:
        raise ValueError(f"λ deve ser positivo, recebido {lam}")

    v = psi.values
    h = grid.spacing
    o = grid.origin_index
    a = p.alpha

    mask = np.ones(grid.n, dtype=bool)
    mask[[0, grid.n - 1, o - 1, o, o + 1]] = False
    idx = np.nonzero(mask)[0]

    second = (v[idx + 1] - 2.0 * v[idx] + v[idx - 1]) / (h * h)
    interior = np.max(np.abs(-second - a * v[idx] ** 3 + lam * v[idx]))

    first = (v[idx + 1] - v[idx - 1]) / (2.0 * h)
    first_integral = np.max(np.abs(first ** 2 + 0.5 * a * v[idx] ** 4 - lam * v[idx] ** 2))

    right = (-3.0 * v[o] + 4.0 * v[o + 1] - v[o + 2]) / (2.0 * h)
    left = (3.0 * v[o] - 4.0 * v[o - 1] + v[o - 2]) / (2.0 * h)
    jump = abs(left - right - p.beta * v[o])

    return ELResiduals(float(interior), float(jump), float(first_integral))
