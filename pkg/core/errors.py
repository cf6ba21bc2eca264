"""
Hierarquia de exceções do pacote.

Código de biblioteca levanta estas exceções; apenas a CLI as converte em
códigos de saída (ver cli/commands.py).
"""


class PolaronError(Exception):
    """Raiz de todos os erros do projeto."""


class GridError(PolaronError, ValueError):
    """Discretização inválida, grades incompatíveis ou átomo fora da grade."""


class ResolutionError(GridError):
    """Grade grossa demais para a escala pedida."""


class DegenerateFunctionError(PolaronError, ValueError):
    """Função nula ou solução sech degenerada (α = 0)."""


class SolverError(PolaronError, RuntimeError):
    """Energia NaN ou passo explodiu durante a minimização."""


class CoercivityError(PolaronError, ValueError):
    """|ε| grande demais para a cota de coercividade."""


class FitError(PolaronError, ValueError):
    """Matriz de projeto singular ou pontos insuficientes."""


class ConfigError(PolaronError, ValueError):
    """Configuração de execução inválida."""
