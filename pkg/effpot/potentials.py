"""
Potenciais coulombianos efetivos no nível de Landau mais baixo.

Funcionalidades:
- V_U^B (média gaussiana do Coulomb 3D) em forma fechada via erfcx e por quadratura
- Núcleo de auto-interação (1/√2)·V_U^B(·/√2)
- Potencial de banheira V_L^B
- Primitivas, médias por célula e integrais de janela ∫_{|x|≤L} V
"""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy.integrate import quad, quad_vec
from scipy.special import erfcx

from core.grid import Grid1D

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.5772156649015329

# Truncamento da variável s em ∫ 2s·e^{−s²}(…) ds: cauda e^{−81}.
S_MAX = 9.0


def check_field(B: float) -> None:
    if not (math.isfinite(B) and B > 1):
        raise ValueError(f"campo B deve ser finito e > 1, recebido {B!r}")


def mu_field(B: float) -> float:
    """μ(B) = ln B − 2 ln ln B."""
    if not (math.isfinite(B) and B > math.e):
        raise ValueError(f"μ(B) exige B > e, recebido {B!r}")
    return math.log(B) - 2.0 * math.log(math.log(B))


def _as_finite_array(x3) -> np.ndarray:
    x = np.asarray(x3, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("x₃ precisa ser finito")
    return x


def _unwrap(values: np.ndarray):
    return float(values) if np.ndim(values) == 0 else values


def _v_upper_quad(B: float, x: float) -> float:
    a2 = 2.0 / B
    if x == 0.0:
        # integrando constante √(2B)·e^{−s²}
        return math.sqrt(math.pi * B / 2.0)

    def integrand(s):
        return 2.0 * s * math.exp(-s * s) / math.sqrt(x * x + a2 * s * s)

    s_knee = abs(x) * math.sqrt(B / 2.0)
    points = [s_knee] if 0.0 < s_knee < S_MAX else None
    value, _ = quad(integrand, 0.0, S_MAX, epsabs=0.0, epsrel=1e-13, limit=400, points=points)
    return value


def v_upper(B: float, x3, method: str = "erfcx"):
    """
    V_U^B(x₃) = ∫₀^∞ e^{−u}/√(x₃² + 2u/B) du.

    Args:
        B: Campo magnético (> 1)
        x3: Ponto ou array
        method: 'erfcx' (forma fechada √(πB/2)·erfcx(|x₃|√(B/2))) ou 'quad'
            (quadratura adaptativa após u = s²)

    Returns:
        Valores de V_U^B
    """
    check_field(B)
    x = _as_finite_array(x3)
    if method == "erfcx":
        return _unwrap(math.sqrt(math.pi * B / 2.0) * erfcx(np.abs(x) * math.sqrt(B / 2.0)))
    if method == "quad":
        values = np.vectorize(lambda t: _v_upper_quad(B, float(t)), otypes=[float])(x)
        return _unwrap(values)
    raise ValueError(f"método desconhecido para v_upper: {method!r}")


def self_interaction_kernel(B: float, lag, method: str = "erfcx"):
    """(1/√2)·V_U^B(lag/√2)."""
    x = _as_finite_array(lag)
    return _unwrap(np.asarray(v_upper(B, x / math.sqrt(2.0), method=method)) / math.sqrt(2.0))


def v_lower(B: float, x3):
    """V_L^B(x₃) = 2/(√(2/B + x₃²) + |x₃|)."""
    check_field(B)
    x = np.abs(_as_finite_array(x3))
    return _unwrap(2.0 / (np.sqrt(2.0 / B + x * x) + x))


def v_upper_primitive(B: float, t):
    """
    P(t) = ∫₀ᵗ V_U^B (função ímpar).

    Usa P(t) = ∫₀^∞ 2s·e^{−s²} ln(t + √(t² + a²s²)) ds − ln a + γ_E/2 com a² = 2/B.
    """
    check_field(B)
    t = _as_finite_array(t)
    flat = np.abs(t).ravel()
    out = np.zeros_like(flat)
    positive = flat > 0
    if np.any(positive):
        tp = flat[positive]
        a = math.sqrt(2.0 / B)

        def integrand(s):
            return 2.0 * s * math.exp(-s * s) * np.log(tp + np.sqrt(tp * tp + (a * s) ** 2))

        integral, _ = quad_vec(integrand, 0.0, S_MAX, epsabs=1e-14, epsrel=1e-13, norm="max")
        out[positive] = integral - math.log(a) + 0.5 * EULER_GAMMA
    return _unwrap(np.sign(t) * out.reshape(t.shape))


def v_lower_primitive(B: float, t):
    """∫₀ᵗ V_L^B = t/(√(a²+t²) + t) + asinh(t/a), a² = 2/B (forma sem cancelamento)."""
    check_field(B)
    t = _as_finite_array(t)
    a = math.sqrt(2.0 / B)
    s = np.abs(t)
    value = s / (np.sqrt(a * a + s * s) + s) + np.arcsinh(s / a)
    return _unwrap(np.sign(t) * value)


def _primitive(which: str):
    if which == "upper":
        return v_upper_primitive
    if which == "lower":
        return v_lower_primitive
    raise ValueError(f"potencial desconhecido: {which!r} (use 'upper' ou 'lower')")


def _averages_from_edges(P_edges: np.ndarray, h: float) -> np.ndarray:
    """Médias nas células [(k−½)h, (k+½)h], k ≥ 0, a partir de P((k+½)h)."""
    avg = np.empty_like(P_edges)
    avg[0] = 2.0 * P_edges[0] / h
    avg[1:] = np.diff(P_edges) / h
    return avg


@lru_cache(maxsize=64)
def _cell_potential_cached(B: float, grid: Grid1D, which: str) -> np.ndarray:
    h = grid.spacing
    m = grid.origin_index
    edges = (np.arange(m + 1) + 0.5) * h
    half = _averages_from_edges(np.asarray(_primitive(which)(B, edges)), h)
    values = np.concatenate((half[:0:-1], half))
    values.setflags(write=False)
    return values


def cell_averaged_potential(B: float, grid: Grid1D, which: str = "upper") -> np.ndarray:
    """
    Médias exatas de V_U^B ou V_L^B sobre a célula de cada nó.

    O pico de V_U^B tem largura 1/√B, muito menor que o espaçamento para B
    grande; a média preserva a integral local e, com ela, o peso ln B.
    """
    check_field(B)
    return _cell_potential_cached(float(B), grid, which)


@lru_cache(maxsize=64)
def _cell_kernel_cached(B: float, grid: Grid1D) -> np.ndarray:
    h = grid.spacing
    r2 = math.sqrt(2.0)
    edges = (np.arange(grid.n) + 0.5) * h / r2
    # ∫(1/√2)V_U(t/√2)dt = P(t/√2)
    row = _averages_from_edges(np.asarray(v_upper_primitive(B, edges)), h)
    row.setflags(write=False)
    return row


def cell_averaged_kernel(B: float, grid: Grid1D) -> np.ndarray:
    """Primeira linha de Toeplitz do núcleo (1/√2)V_U^B(·/√2), médias por célula."""
    check_field(B)
    return _cell_kernel_cached(float(B), grid)


def _scaled_window(g, Y: float) -> float:
    """∫₀^Y g(y) dy, com y = e^r acima de 1."""
    head_end = min(Y, 1.0)
    head, _ = quad(g, 0.0, head_end, epsabs=1e-14, epsrel=1e-13, limit=200)
    if Y <= 1.0:
        return head
    tail, _ = quad(lambda r: g(math.exp(r)) * math.exp(r), 0.0, math.log(Y),
                   epsabs=1e-14, epsrel=1e-13, limit=400)
    return head + tail


def window_integral(B: float, L: float, which: str = "upper") -> float:
    """
    ∫_{|x|≤L} V dx por quadratura direta na variável y = x√(B/2).

    Args:
        B: Campo (> 1)
        L: Meia-largura da janela (> 0)
        which: 'upper' (V_U^B) ou 'lower' (V_L^B)
    """
    check_field(B)
    if not (math.isfinite(L) and L > 0):
        raise ValueError(f"L deve ser positivo, recebido {L!r}")
    Y = L * math.sqrt(B / 2.0)
    if which == "upper":
        half = math.sqrt(math.pi) * _scaled_window(lambda y: float(erfcx(y)), Y)
    elif which == "lower":
        half = 2.0 * _scaled_window(lambda y: 1.0 / (math.sqrt(1.0 + y * y) + y), Y)
    else:
        raise ValueError(f"potencial desconhecido: {which!r}")
    return 2.0 * half
