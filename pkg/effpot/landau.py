"""
Estado fundamental de Landau γ_B e o projetor P₀^B sobre o nível mais baixo.

Usado apenas em grades 2D pequenas, para verificar a média gaussiana que
define V_U^B e as propriedades de projetor do núcleo.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import quad

from core.errors import GridError, ResolutionError
from effpot.potentials import check_field

logger = logging.getLogger(__name__)

# Nós mínimos por comprimento magnético 1/√B.
NODES_PER_MAGNETIC_LENGTH = 8


def gamma_landau(B: float, r_perp):
    """γ_B(r) = √(B/2π)·e^{−B r²/4}."""
    if not (math.isfinite(B) and B > 0):
        raise ValueError(f"B deve ser positivo, recebido {B!r}")
    r = np.asarray(r_perp, dtype=float)
    values = math.sqrt(B / (2.0 * math.pi)) * np.exp(-0.25 * B * r * r)
    return float(values) if np.ndim(values) == 0 else values


def v_upper_from_landau(B: float, x3: float) -> float:
    """
    ∫ γ_B(x_⊥)²/√(|x_⊥|² + x₃²) dx_⊥ por quadratura radial.

    Com r = ρ/√B o integrando vira ρ·e^{−ρ²/2}/√(ρ²/B + x₃²).
    """
    check_field(B)
    x = float(x3)
    if x == 0.0:
        value, _ = quad(lambda rho: math.exp(-0.5 * rho * rho), 0.0, 40.0,
                        epsabs=0.0, epsrel=1e-13, limit=200)
        return math.sqrt(B) * value

    def integrand(rho):
        return rho * math.exp(-0.5 * rho * rho) / math.sqrt(rho * rho / B + x * x)

    knee = abs(x) * math.sqrt(B)
    points = [knee] if 0.0 < knee < 40.0 else None
    value, _ = quad(integrand, 0.0, 40.0, epsabs=0.0, epsrel=1e-13, limit=400, points=points)
    return value


@dataclass(frozen=True)
class SquareGrid:
    """Grade N×N uniforme em [−half_width, half_width]²."""

    half_width: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.half_width) and self.half_width > 0) or self.n < 3:
            raise GridError(f"grade 2D inválida: half_width={self.half_width}, n={self.n}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    @cached_property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordenadas (x₁, x₂) com x₁ no primeiro índice."""
        return np.meshgrid(self.axis, self.axis, indexing="ij")


def landau_projection_apply(B: float, f: np.ndarray, grid: SquareGrid) -> np.ndarray:
    """
    (P₀f)(x) = ∫ (B/2π) e^{−B|x−y|²/4} e^{iB(x₁y₂−x₂y₁)/2} f(y) dy.

    O núcleo fatora em gaussianas 1D e duas fases; cada linha x₁ custa um
    produto matricial N×N.

    Args:
        B: Campo magnético
        f: Amostras N×N (f[i, j] = f(x₁ = axis[i], x₂ = axis[j]))
        grid: Grade quadrada que resolve 1/√B

    Returns:
        Amostras complexas N×N de P₀f
    """
    if not (math.isfinite(B) and B > 0):
        raise ValueError(f"B deve ser positivo, recebido {B!r}")
    f = np.asarray(f, dtype=complex)
    if f.shape != (grid.n, grid.n):
        raise GridError(f"esperado formato {(grid.n, grid.n)}, recebido {f.shape}")
    limit = 1.0 / (NODES_PER_MAGNETIC_LENGTH * math.sqrt(B))
    if grid.spacing > limit * (1.0 + 1e-12):
        raise ResolutionError(
            f"espaçamento {grid.spacing:.4g} não resolve o comprimento magnético "
            f"(máximo {limit:.4g})"
        )

    x = grid.axis
    gauss = np.exp(-0.25 * B * (x[:, None] - x[None, :]) ** 2)
    phase_in = np.exp(-0.5j * B * np.outer(x, x))   # [c, b] = e^{−iB y₁ x₂/2}
    phase_out = np.exp(0.5j * B * np.outer(x, x))   # [a, d] = e^{+iB x₁ y₂/2}

    out = np.empty_like(f)
    for a in range(grid.n):
        m = gauss[a][:, None] * f * phase_out[a][None, :]
        t = m @ gauss.T
        out[a] = np.sum(phase_in * t, axis=0)
    return (B / (2.0 * math.pi)) * grid.spacing ** 2 * out
