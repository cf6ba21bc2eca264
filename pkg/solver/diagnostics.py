"""
Diagnósticos sobre minimizadores: distância H¹, desigualdade de ligação
e extrapolação de Richardson das energias discretas.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from closedform import phi_translation_invariant
from core.grid import Grid1D, GridFn, check_same_grid, dirichlet_energy, l2_norm, make_grid
from core.functional import FunctionalSpec, pekar_spec, translation_invariant_spec
from core.params import ModelParams
from solver.gradient_flow import SolveOptions, SolveReport, minimize

logger = logging.getLogger(__name__)

# Nós usados pelas grades padrão dos diagnósticos.
DEFAULT_NODES = 4097


def h1_distance(f: GridFn, g: GridFn) -> float:
    """(‖f−g‖₂² + ‖f′−g′‖₂²)^{1/2} com a derivada nos pontos médios."""
    check_same_grid(f, g)
    diff = f - g
    return math.sqrt(l2_norm(diff) ** 2 + dirichlet_energy(diff))


@dataclass(frozen=True)
class BindingReport:
    e0: float
    eT: float
    gap: float
    pinning_bound: float
    holds: bool


def decay_grid(rate: float, n: int = DEFAULT_NODES) -> Grid1D:
    """Grade com meia-largura 40/rate (≈ e^{−40} nas bordas)."""
    return make_grid(40.0 / rate, n)


def binding_inequality_check(p: ModelParams, grid: Grid1D | None = None,
                             opts: SolveOptions | None = None, tol: float = 1e-6) -> BindingReport:
    """
    Minimiza o funcional completo e o invariante por translação.

    Args:
        p: Parâmetros (α > 0)
        grid: Grade do problema completo (padrão pela taxa (α+2β)/4)
        opts: Opções do solver
        tol: Folga numérica na comparação gap ≥ β·φ_T(0)²

    Returns:
        BindingReport com e0, eT, gap = eT − e0 e a cota β·φ_T(0)²
    """
    if p.alpha <= 0:
        raise ValueError("a desigualdade de ligação exige α > 0")
    full_grid = grid or decay_grid(p.decay_rate)
    ti_grid = decay_grid(p.alpha / 4.0, full_grid.n)

    e0 = minimize(pekar_spec(p, full_grid), opts).energy.total
    eT = minimize(translation_invariant_spec(p.alpha, ti_grid), opts).energy.total
    gap = eT - e0
    bound = p.beta * phi_translation_invariant(p.alpha, 0.0) ** 2
    holds = gap > 0 and gap >= bound - tol
    icon = "✅" if holds else "❌"
    logger.info(f"{icon} ligação α={p.alpha:g} β={p.beta:g}: gap={gap:.8g} cota={bound:.8g}")
    return BindingReport(e0=e0, eT=eT, gap=gap, pinning_bound=bound, holds=holds)


@dataclass(frozen=True)
class RichardsonResult:
    fine: SolveReport
    coarse: SolveReport
    extrapolated: float


def richardson_energy(build: Callable[[Grid1D], FunctionalSpec], grid: Grid1D,
                      opts: SolveOptions | None = None) -> RichardsonResult:
    """
    Elimina o termo O(h²) do erro de discretização: (4E_h − E_{2h})/3.

    Args:
        build: Constrói o funcional para uma grade
        grid: Grade fina (n ≡ 1 mod 4)
    """
    fine = minimize(build(grid), opts)
    coarse = minimize(build(grid.coarsen()), opts)
    value = (4.0 * fine.energy.total - coarse.energy.total) / 3.0
    return RichardsonResult(fine=fine, coarse=coarse, extrapolated=value)


def is_unimodal(f: GridFn, tol: float = 1e-12) -> bool:
    """Não decrescente até a origem e não crescente depois dela."""
    v = f.values
    o = f.grid.origin_index
    left = np.diff(v[:o + 1])
    right = np.diff(v[o:])
    return bool(np.all(left >= -tol) and np.all(right <= tol))
