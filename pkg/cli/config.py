"""
Configuração validada da CLI.

Um documento JSON (--config) é mesclado sobre a tabela de padrões e as
flags são mescladas por último. Chaves desconhecidas são rejeitadas em
todos os níveis.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from cli.defaults import get_defaults
from core.errors import ConfigError
from core.functional import DeltaAtom
from core.grid import Grid1D, make_grid
from core.params import ModelParams
from perturbation import PerturbPotential, gaussian_potential
from solver.gradient_flow import SolveOptions

logger = logging.getLogger(__name__)

Command = Literal["solve", "potential", "ladder", "perturb", "verify"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _check_odd(n: int) -> int:
    if n % 2 == 0:
        raise ValueError(f"n deve ser ímpar (origem em um nó), recebido {n}")
    return n


class GridConfig(_Strict):
    half_width: float | None = Field(None, gt=0, allow_inf_nan=False)
    n: int = Field(8193, ge=9)

    @field_validator("n")
    @classmethod
    def _odd(cls, n: int) -> int:
        return _check_odd(n)

    def build(self, p: ModelParams) -> Grid1D:
        return make_grid(self.half_width or p.default_half_width(), self.n)


class SolverConfig(_Strict):
    max_iter: int = Field(20000, ge=1)
    tol_energy: float = Field(1e-13, gt=0)
    tol_grad: float = Field(1e-6, gt=0)
    step_init: float = Field(1.0, gt=0)
    step_shrink: float = Field(0.5, gt=0, lt=1)
    recenter_every: int = Field(50, ge=0)

    def options(self) -> SolveOptions:
        return SolveOptions(**self.model_dump())


class LadderConfig(_Strict):
    fields: list[float] = Field(default_factory=list)
    model: Literal["polaron", "hydrogenic"] = "polaron"
    scale: float = Field(40.0, gt=0)
    n: int = Field(4097, ge=9)

    @field_validator("n")
    @classmethod
    def _odd(cls, n: int) -> int:
        return _check_odd(n)


class PotentialConfig(_Strict):
    field: float = Field(1e6, gt=1, allow_inf_nan=False)
    x_min: float = Field(0.0, allow_inf_nan=False)
    x_max: float = Field(1.0, allow_inf_nan=False)
    samples: int = Field(201, ge=2)
    windows: list[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_range(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max ({self.x_max}) deve ser maior que x_min ({self.x_min})")
        if any(not (math.isfinite(L) and L > 0) for L in self.windows):
            raise ValueError("todas as janelas L devem ser positivas")
        return self


class AtomConfig(_Strict):
    location: float = Field(0.0, allow_inf_nan=False)
    weight: float = Field(1.0, allow_inf_nan=False)


class GaussianConfig(_Strict):
    amplitude: float = Field(1.0, allow_inf_nan=False)
    width: float = Field(1.0, gt=0, allow_inf_nan=False)


class PerturbConfig(_Strict):
    atoms: list[AtomConfig] = Field(default_factory=list)
    gaussian: GaussianConfig | None = None
    eps_ladder: list[float] = Field(default_factory=lambda: [1e-2, 1e-3, 1e-4])
    extrapolate: bool = True
    pairing_fields: list[float] = Field(default_factory=list)

    @field_validator("eps_ladder")
    @classmethod
    def _positive(cls, values: list[float]) -> list[float]:
        if not values or any(not (math.isfinite(e) and e > 0) for e in values):
            raise ValueError("eps_ladder deve conter valores positivos")
        return values

    def potential(self) -> PerturbPotential:
        bounded = None
        sup = math.nan
        if self.gaussian is not None:
            g = gaussian_potential(self.gaussian.amplitude, self.gaussian.width)
            bounded, sup = g.bounded_part, g.bounded_sup
        atoms = tuple(DeltaAtom(a.location, a.weight) for a in self.atoms)
        return PerturbPotential(atoms=atoms, bounded_part=bounded, bounded_sup=sup)


class RunConfig(_Strict):
    """Configuração completa de um comando."""

    command: Command
    params: ModelParams = ModelParams()
    grid: GridConfig = GridConfig()
    solver: SolverConfig = SolverConfig()
    ladder: LadderConfig = LadderConfig()
    potential: PotentialConfig = PotentialConfig()
    perturb: PerturbConfig = PerturbConfig()
    out: str = "runs"
    format: Literal["csv", "json"] = "csv"
    delta_well: bool = False
    quick: bool = False

    def public_dict(self) -> dict:
        """Forma JSON embutida nos artefatos."""
        return self.model_dump(mode="json")


def _base_document() -> dict[str, Any]:
    d = get_defaults()
    return {
        "params": d["params"],
        "grid": d["grid"],
        "solver": d["solver"],
        "ladder": d["ladder"],
        "potential": d["potential"],
        "perturb": d["perturb"],
        "out": d["output"]["out"],
        "format": d["output"]["format"],
    }


def merge(base: dict, override: dict) -> dict:
    """Mescla recursiva; dicionários aninhados são combinados, o resto substituído."""
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge(out[key], value)
        else:
            out[key] = value
    return out


def _describe(exc: ValidationError) -> str:
    first = exc.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<raiz>"
    return f"chave '{location}': {first['msg']}"


def read_config_file(path: str | Path) -> dict:
    """
    Lê o documento JSON de configuração.

    Raises:
        ConfigError: arquivo ausente, JSON malformado ou raiz que não é objeto
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"não foi possível ler {path}: {exc}") from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON inválido em {path} (linha {exc.lineno}): {exc.msg}") from exc
    if not isinstance(document, dict):
        raise ConfigError(f"{path}: a configuração deve ser um objeto JSON")
    return document


def build_config(command: str, file_document: dict | None = None,
                 overrides: dict | None = None) -> RunConfig:
    """
    Padrões ← arquivo ← flags, validados como RunConfig.

    Raises:
        ConfigError: com a chave ofensora no texto
    """
    document = _base_document()
    if file_document:
        document = merge(document, file_document)
    if overrides:
        document = merge(document, overrides)
    file_command = document.get("command")
    if file_command is not None and file_command != command:
        raise ConfigError(f"chave 'command': arquivo pede '{file_command}', linha de comando '{command}'")
    document["command"] = command
    try:
        return RunConfig.model_validate(document)
    except ValidationError as exc:
        raise ConfigError(_describe(exc)) from exc
