"""
Constantes 𝒢(B,L), 𝒢̃(B,L) e 𝒟(B,L) das estimativas de extração do delta.

∫_{|x|≤L} V_U^B = ln B − 2 ln ln B + 𝒢(B,L)
∫_{|x|<L}  V_L^B = ln B − 2 ln ln B + 𝒟(B,L)
"""

import math

from scipy.integrate import quad

from effpot.potentials import EULER_GAMMA, check_field


def _check_window(L: float) -> None:
    if not (math.isfinite(L) and L > 0):
        raise ValueError(f"L deve ser positivo, recebido {L!r}")


def _check_loglog(B: float) -> None:
    if not (math.isfinite(B) and B > math.e):
        raise ValueError(f"a constante exige B > e (ln ln B definido), recebido {B!r}")


def _log_integral(B: float, L: float) -> float:
    # 2∫e^{−u} ln(√(1/u+κ) + √(1/u)) du = 2∫e^{−u} ln(1 + √(1+κu)) du + γ_E
    kappa = 2.0 / (B * L * L)
    value, _ = quad(lambda u: math.exp(-u) * math.log1p(math.sqrt(1.0 + kappa * u)),
                    0.0, math.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
    return 2.0 * value + EULER_GAMMA


def g_tilde_const(B: float, L: float) -> float:
    """𝒢̃(B,L): 𝒢 sem o termo 2 ln ln B (definida para B > 1)."""
    check_field(B)
    _check_window(L)
    return 2.0 * math.log(L) + _log_integral(B, L) - math.log(2.0)


def g_const(B: float, L: float) -> float:
    """
    𝒢(B,L) = 2 ln L + 2 ln ln B + 2∫₀^∞ e^{−u} ln(√(1/u + 2/(BL²)) + √(1/u)) du − ln 2.

    Raises:
        ValueError: se B ≤ e
    """
    _check_loglog(B)
    return g_tilde_const(B, L) + 2.0 * math.log(math.log(B))


def d_const(B: float, L: float) -> float:
    """𝒟(B,L) em forma fechada."""
    _check_loglog(B)
    _check_window(L)
    r = math.sqrt(1.0 + 2.0 / (B * L * L))
    return (2.0 * math.log(L) + 2.0 * math.log(math.log(B)) + 2.0 / (r + 1.0)
            + 2.0 * math.log(r + 1.0) - math.log(2.0))
