"""
Parâmetros físicos do modelo (α, β, B).

Os limites de cada campo são declarados com Field e validados na construção.
"""

import math

from pydantic import BaseModel, ConfigDict, Field


class ModelParams(BaseModel):
    """
    Acoplamento α ≥ 0, força coulombiana β > 0 e campo magnético B > 1.

    O campo só entra nos módulos de campo forte; as fórmulas 1D o ignoram.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(1.0, ge=0, allow_inf_nan=False)
    beta: float = Field(1.0, gt=0, allow_inf_nan=False)
    field: float = Field(1.0e6, gt=1, allow_inf_nan=False)

    @property
    def decay_rate(self) -> float:
        """Taxa de decaimento (α + 2β)/4 do minimizador φ₀."""
        return (self.alpha + 2.0 * self.beta) / 4.0

    def with_beta(self, beta: float) -> "ModelParams":
        return ModelParams(alpha=self.alpha, beta=beta, field=self.field)

    def with_field(self, field: float) -> "ModelParams":
        return ModelParams(alpha=self.alpha, beta=self.beta, field=field)

    def default_half_width(self) -> float:
        """Meia-largura padrão 40/((α + 2β)/4) usada nos testes de aceitação."""
        rate = self.decay_rate
        if not math.isfinite(rate) or rate <= 0:
            raise ValueError(f"taxa de decaimento inválida: {rate}")
        return 40.0 / rate
