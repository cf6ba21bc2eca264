"""
Grades uniformas 1D e funções amostradas.

Funcionalidades:
- Grid1D com nó exato na origem (n ímpar)
- GridFn imutável com aritmética elemento a elemento
- Produto interno e norma L² pela regra do trapézio
- Norma de Dirichlet com diferenças nos pontos médios das células
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from core.errors import DegenerateFunctionError, GridError

# Tolerância (em unidades de espaçamento) para considerar um ponto sobre um nó.
ON_GRID_TOL = 1e-9


@dataclass(frozen=True)
class Grid1D:
    """Grade uniforme em [−half_width, half_width] com n nós (n ímpar)."""

    half_width: float
    n: int

    def __post_init__(self):
        if not (isinstance(self.half_width, (int, float)) and math.isfinite(self.half_width)
                and self.half_width > 0):
            raise GridError(f"half_width deve ser finito e positivo, recebido {self.half_width!r}")
        if int(self.n) != self.n or self.n < 3 or self.n % 2 == 0:
            raise GridError(f"n deve ser inteiro ímpar ≥ 3, recebido {self.n!r}")
        object.__setattr__(self, "half_width", float(self.half_width))
        object.__setattr__(self, "n", int(self.n))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def origin_index(self) -> int:
        return (self.n - 1) // 2

    @cached_property
    def nodes(self) -> np.ndarray:
        # Offsets inteiros em torno da origem: x = 0 exato e simetria exata.
        x = self.spacing * (np.arange(self.n, dtype=float) - self.origin_index)
        x.setflags(write=False)
        return x

    @cached_property
    def weights(self) -> np.ndarray:
        """Pesos da regra do trapézio."""
        w = np.full(self.n, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        w.setflags(write=False)
        return w

    def snap(self, location: float) -> tuple[int, float]:
        """
        Nó mais próximo de uma posição.

        Returns:
            (índice, distância até o nó)
        """
        if not math.isfinite(location):
            raise GridError(f"posição não finita: {location!r}")
        index = self.origin_index + int(round(location / self.spacing))
        if index < 0 or index >= self.n:
            raise GridError(f"posição {location} fora do domínio ±{self.half_width}")
        return index, abs(location - self.nodes[index])

    def index_of(self, location: float) -> int:
        """Índice de um ponto que precisa coincidir com um nó."""
        index, distance = self.snap(location)
        if distance > ON_GRID_TOL * self.spacing:
            raise GridError(
                f"posição {location} não coincide com um nó (distância {distance:.3e})"
            )
        return index

    def refine(self) -> "Grid1D":
        return Grid1D(self.half_width, 2 * self.n - 1)

    def coarsen(self) -> "Grid1D":
        """Grade com espaçamento dobrado; exige n ≡ 1 (mod 4) para manter a origem."""
        m = (self.n + 1) // 2
        if m < 3 or m % 2 == 0:
            raise GridError(f"grade com n={self.n} não pode ser engrossada mantendo a origem")
        return Grid1D(self.half_width, m)


def make_grid(half_width: float, n: int) -> Grid1D:
    """
    Cria uma grade uniforme com nó exato em x = 0.

    Args:
        half_width: Meia-largura do domínio (> 0)
        n: Número de nós (ímpar, ≥ 3)

    Returns:
        Grid1D com espaçamento 2·half_width/(n−1)
    """
    return Grid1D(half_width, n)


@dataclass(frozen=True, eq=False)
class GridFn:
    """Função real amostrada nos nós de uma grade."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise GridError(
                f"esperados {self.grid.n} valores, recebido formato {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise GridError("GridFn contém valores não finitos")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid: Grid1D, func: Callable[[np.ndarray], np.ndarray]) -> "GridFn":
        return cls(grid, func(grid.nodes))

    @classmethod
    def zeros(cls, grid: Grid1D) -> "GridFn":
        return cls(grid, np.zeros(grid.n))

    def _other_values(self, other) -> np.ndarray | float:
        if isinstance(other, GridFn):
            check_same_grid(self, other)
            return other.values
        return float(other)

    def __add__(self, other):
        return GridFn(self.grid, self.values + self._other_values(other))

    def __sub__(self, other):
        return GridFn(self.grid, self.values - self._other_values(other))

    def __mul__(self, other):
        return GridFn(self.grid, self.values * self._other_values(other))

    __rmul__ = __mul__
    __radd__ = __add__

    def __truediv__(self, scalar: float):
        return GridFn(self.grid, self.values / float(scalar))

    def __neg__(self):
        return GridFn(self.grid, -self.values)

    def __abs__(self):
        return GridFn(self.grid, np.abs(self.values))

    def at_origin(self) -> float:
        return float(self.values[self.grid.origin_index])


def check_same_grid(f: GridFn, g: GridFn) -> None:
    if f.grid != g.grid:
        raise GridError(f"grades incompatíveis: {f.grid} vs {g.grid}")


def inner(f: GridFn, g: GridFn) -> float:
    """Produto interno L² pela regra do trapézio."""
    check_same_grid(f, g)
    return float(np.sum(f.grid.weights * f.values * g.values))


def l2_norm(f: GridFn) -> float:
    """Aproximação trapezoidal de (∫f²)^{1/2}."""
    return math.sqrt(max(inner(f, f), 0.0))


def normalize(f: GridFn) -> GridFn:
    """
    Normaliza f em L².

    Raises:
        DegenerateFunctionError: se f é nula
    """
    norm = l2_norm(f)
    if norm == 0.0:
        raise DegenerateFunctionError("não é possível normalizar a função nula")
    return f / norm


def midpoint_derivative(f: GridFn) -> np.ndarray:
    """
    Derivada nos pontos médios x_{i+½}: (f_{i+1} − f_i)/h.

    Substitui o estêncil centrado nos nós, cujo modo alternado tem energia nula.
    """
    return np.diff(f.values) / f.grid.spacing


def dirichlet_energy(f: GridFn) -> float:
    """Σ h·((f_{i+1} − f_i)/h)², aproximação de ∫|f′|²."""
    d = midpoint_derivative(f)
    return float(f.grid.spacing * np.dot(d, d))


def dirichlet_norm(f: GridFn) -> float:
    return math.sqrt(dirichlet_energy(f))


def max_norm(f: GridFn) -> float:
    return float(np.max(np.abs(f.values)))
