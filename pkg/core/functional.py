"""
Modelo de dados do funcional de energia discreto.

E(f) = k∫|f′|² − q∫|f|⁴ − Σ w_a|f(x_a)|² + s∫V|f|² − ∬|f(x)|²K(x−y)|f(y)|²

O termo cinético usa diferenças nos pontos médios, as integrais usam o
trapézio, os átomos delta leem o valor nodal sem peso de quadratura e a
convolução passa pelo núcleo de Toeplitz.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz
from scipy.signal import fftconvolve

from core.errors import GridError
from core.grid import Grid1D, GridFn, dirichlet_energy
from core.params import ModelParams

logger = logging.getLogger(__name__)

# Abaixo deste tamanho a convolução é feita pela matriz de Toeplitz densa.
DIRECT_CONV_MAX_N = 2049


@dataclass(frozen=True)
class DeltaAtom:
    """Átomo −weight·|φ(location)|²; location precisa ser um nó da grade."""

    location: float
    weight: float


@dataclass(frozen=True, eq=False)
class FunctionalSpec:
    """
    Coeficientes de um funcional discreto.

    kernel_row é a primeira linha de Toeplitz do núcleo de convolução,
    amostrada nos atrasos 0, h, 2h, …, (n−1)h.
    """

    grid: Grid1D
    kinetic_coeff: float = 1.0
    quartic_coeff: float = 0.0
    delta_atoms: tuple[DeltaAtom, ...] = ()
    potential: GridFn | None = None
    potential_sign: int = 1
    kernel_row: np.ndarray | None = None
    atom_indices: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kinetic_coeff < 0 or self.quartic_coeff < 0:
            raise ValueError(
                f"coeficientes devem ser ≥ 0 (cinético={self.kinetic_coeff}, "
                f"quártico={self.quartic_coeff})"
            )
        if self.potential_sign not in (1, -1):
            raise ValueError(f"potential_sign deve ser ±1, recebido {self.potential_sign}")
        atoms = tuple(self.delta_atoms)
        object.__setattr__(self, "delta_atoms", atoms)
        object.__setattr__(
            self, "atom_indices", tuple(self.grid.index_of(a.location) for a in atoms)
        )
        if self.potential is not None and self.potential.grid != self.grid:
            raise GridError("potencial amostrado em outra grade")
        if self.kernel_row is not None:
            row = np.array(self.kernel_row, dtype=float)
            if row.shape != (self.grid.n,):
                raise GridError(
                    f"kernel_row deve ter {self.grid.n} atrasos, recebido {row.shape}"
                )
            if not np.all(np.isfinite(row)):
                raise GridError("kernel_row contém valores não finitos")
            row.setflags(write=False)
            object.__setattr__(self, "kernel_row", row)

    @property
    def is_translation_invariant(self) -> bool:
        return not self.delta_atoms and self.potential is None

    @property
    def total_atom_weight(self) -> float:
        return float(sum(a.weight for a in self.delta_atoms))

    def with_atoms(self, extra: tuple[DeltaAtom, ...]) -> "FunctionalSpec":
        return FunctionalSpec(
            grid=self.grid,
            kinetic_coeff=self.kinetic_coeff,
            quartic_coeff=self.quartic_coeff,
            delta_atoms=self.delta_atoms + tuple(extra),
            potential=self.potential,
            potential_sign=self.potential_sign,
            kernel_row=self.kernel_row,
        )

    def with_potential(self, potential: GridFn, sign: int) -> "FunctionalSpec":
        if self.potential is not None:
            raise ValueError("o funcional já tem um potencial amostrado")
        return FunctionalSpec(
            grid=self.grid,
            kinetic_coeff=self.kinetic_coeff,
            quartic_coeff=self.quartic_coeff,
            delta_atoms=self.delta_atoms,
            potential=potential,
            potential_sign=sign,
            kernel_row=self.kernel_row,
        )


@dataclass(frozen=True)
class EnergySplit:
    """Parcelas da energia; total é a soma delas, nesta ordem."""

    kinetic: float
    quartic: float
    delta: float
    external: float
    convolution: float

    @property
    def total(self) -> float:
        return self.kinetic + self.quartic + self.delta + self.external + self.convolution

    def to_dict(self) -> dict[str, float]:
        return {
            "kinetic": self.kinetic,
            "quartic": self.quartic,
            "delta": self.delta,
            "external": self.external,
            "convolution": self.convolution,
            "total": self.total,
        }


def pekar_spec(p: ModelParams, grid: Grid1D) -> FunctionalSpec:
    """Funcional de Pekar com poço delta: ∫|φ′|² − (α/2)∫|φ|⁴ − β|φ(0)|²."""
    return FunctionalSpec(
        grid=grid,
        kinetic_coeff=1.0,
        quartic_coeff=0.5 * p.alpha,
        delta_atoms=(DeltaAtom(0.0, p.beta),),
    )


def scaled_pekar_spec(p: ModelParams, grid: Grid1D, mu: float) -> FunctionalSpec:
    """Versão dilatada {cinético 1, quártico (α/2)μ, delta βμ}; mínimo μ²𝔢₀."""
    return FunctionalSpec(
        grid=grid,
        kinetic_coeff=1.0,
        quartic_coeff=0.5 * p.alpha * mu,
        delta_atoms=(DeltaAtom(0.0, p.beta * mu),),
    )


def delta_well_spec(beta: float, grid: Grid1D) -> FunctionalSpec:
    return FunctionalSpec(grid=grid, delta_atoms=(DeltaAtom(0.0, beta),))


def translation_invariant_spec(alpha: float, grid: Grid1D) -> FunctionalSpec:
    return FunctionalSpec(grid=grid, quartic_coeff=0.5 * alpha)


def toeplitz_apply(kernel_row: np.ndarray, u: np.ndarray, method: str = "auto") -> np.ndarray:
    """
    Produto pela matriz de Toeplitz simétrica de primeira linha kernel_row.

    Args:
        kernel_row: K(0), K(h), …, K((n−1)h)
        u: vetor de tamanho n
        method: 'direct', 'fft' ou 'auto' (direto para n < DIRECT_CONV_MAX_N)

    Returns:
        (T u)_i = Σ_j K(|i−j|h) u_j
    """
    n = len(u)
    if len(kernel_row) != n:
        raise GridError(f"núcleo com {len(kernel_row)} atrasos para vetor de tamanho {n}")
    if method == "auto":
        method = "direct" if n < DIRECT_CONV_MAX_N else "fft"
    if method == "direct":
        return toeplitz(kernel_row) @ u
    if method == "fft":
        full = np.concatenate((kernel_row[:0:-1], kernel_row))
        return fftconvolve(u, full)[n - 1:2 * n - 1]
    raise ValueError(f"método de convolução desconhecido: {method!r}")


def _check_grid(f: GridFn, spec: FunctionalSpec) -> None:
    if f.grid != spec.grid:
        raise GridError(f"função na grade {f.grid}, funcional na grade {spec.grid}")


def energy(f: GridFn, spec: FunctionalSpec) -> EnergySplit:
    """
    Avalia o funcional discreto.

    Args:
        f: Função na grade do funcional
        spec: Coeficientes e dados amostrados

    Returns:
        EnergySplit com as cinco parcelas
    """
    _check_grid(f, spec)
    w = spec.grid.weights
    rho = f.values * f.values

    kinetic = spec.kinetic_coeff * dirichlet_energy(f) if spec.kinetic_coeff else 0.0
    quartic = -spec.quartic_coeff * float(np.dot(w, rho * rho)) if spec.quartic_coeff else 0.0
    delta = -math.fsum(a.weight * rho[i] for a, i in zip(spec.delta_atoms, spec.atom_indices))
    external = 0.0
    if spec.potential is not None:
        external = spec.potential_sign * float(np.dot(w, spec.potential.values * rho))
    convolution = 0.0
    if spec.kernel_row is not None:
        wrho = w * rho
        convolution = -float(np.dot(wrho, toeplitz_apply(spec.kernel_row, wrho)))

    return EnergySplit(
        kinetic=float(kinetic),
        quartic=float(quartic),
        delta=float(delta),
        external=float(external),
        convolution=float(convolution),
    )
