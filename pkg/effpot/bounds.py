"""
Desigualdades de extração do delta e a cota inferior do hidrogênio efetivo.

Funcionalidades:
- delta_extraction_check: compara ∫V|φ|² com μ(B)|φ(0)|² (ou a versão dupla
  com o núcleo de auto-interação) contra o lado direito explícito
- hydrogen_lower_bound: cota inferior de ‖f′‖² − τ∫V_U^B f² com ε = L = 1/ln B
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.errors import ResolutionError
from core.functional import toeplitz_apply
from core.grid import GridFn, dirichlet_norm, l2_norm
from effpot.constants import d_const, g_const
from effpot.potentials import cell_averaged_kernel, cell_averaged_potential, mu_field

logger = logging.getLogger(__name__)

# Tolerância relativa ao decidir se lhs ≤ rhs.
HOLD_RTOL = 1e-12


@dataclass(frozen=True)
class ExtractionCheck:
    which: str
    lhs: float
    rhs: float
    holds: bool


def delta_extraction_check(B: float, L: float, phi: GridFn, which: str = "upper") -> ExtractionCheck:
    """
    Verifica a estimativa de extração do delta numa função amostrada.

    Args:
        B: Campo (> e)
        L: Raio da janela (espaçamento ≤ L/8)
        phi: Função de teste
        which: 'upper' (V_U^B), 'lower' (V_L^B) ou 'convolution' (núcleo duplo)

    Returns:
        ExtractionCheck(lhs, rhs, holds)
    """
    grid = phi.grid
    if grid.spacing > L / 8.0:
        raise ResolutionError(
            f"espaçamento {grid.spacing:.4g} grosso demais para L={L} (máximo L/8)"
        )
    mu = mu_field(B)
    w = grid.weights
    rho = phi.values ** 2
    norm = l2_norm(phi)
    dnorm = dirichlet_norm(phi)

    if which in ("upper", "lower"):
        potential = cell_averaged_potential(B, grid, which)
        lhs = abs(float(np.dot(w, potential * rho)) - mu * phi.at_origin() ** 2)
        const = g_const(B, L) if which == "upper" else d_const(B, L)
        rhs = (norm ** 2 / L + 8.0 * math.sqrt(L) * dnorm ** 1.5 * norm ** 0.5
               + abs(const) * dnorm * norm)
    elif which == "convolution":
        kernel = cell_averaged_kernel(B, grid)
        wrho = w * rho
        double = float(np.dot(wrho, toeplitz_apply(kernel, wrho)))
        lhs = abs(double - mu * float(np.dot(w, rho * rho)))
        rhs = (norm ** 4 / L + 8.0 * math.sqrt(L) * dnorm ** 1.5 * norm ** 2.5
               + abs(g_const(B, L / math.sqrt(2.0))) * dnorm * norm ** 3)
    else:
        raise ValueError(f"variante desconhecida: {which!r}")

    holds = lhs <= rhs * (1.0 + HOLD_RTOL)
    if not holds:
        logger.warning(f"⚠️ extração violada ({which}, B={B:g}, L={L:g}): {lhs:.6g} > {rhs:.6g}")
    return ExtractionCheck(which=which, lhs=lhs, rhs=rhs, holds=holds)


@dataclass(frozen=True)
class HydrogenBound:
    value: float
    d_value: float
    valid: bool


def hydrogen_lower_bound(B: float, tau: float) -> HydrogenBound:
    """
    Cota inferior explícita para inf (‖f′‖² − τ∫V_U^B f²) com ‖f‖ = 1.

    Com ε = L = 1/ln B:
    (−τ²/4 − τ³ε|𝒟|)μ² − 432τL²/(|𝒟|³ε³) − τ/L − τ|𝒟|/ε,
    válida quando 2τε|𝒟| < 1/2.
    """
    if tau <= 0:
        raise ValueError(f"τ deve ser positivo, recebido {tau}")
    eps = L = 1.0 / math.log(B)
    d_abs = abs(d_const(B, L))
    mu = mu_field(B)
    valid = 2.0 * tau * eps * d_abs < 0.5
    value = ((-0.25 * tau ** 2 - tau ** 3 * eps * d_abs) * mu ** 2
             - 432.0 * tau * L ** 2 / (d_abs ** 3 * eps ** 3)
             - tau / L - tau * d_abs / eps)
    return HydrogenBound(value=value, d_value=d_abs, valid=valid)
