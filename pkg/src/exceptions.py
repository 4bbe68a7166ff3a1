"""
Exceções do simulador.

Todas derivam de SimulationError e também das exceções nativas
correspondentes (ValueError, RuntimeError), para que código que
captura as nativas continue funcionando.
"""

from typing import Optional


class SimulationError(Exception):
    """Erro base. `context` guarda parâmetros úteis para diagnóstico."""

    def __init__(self, message: str, context: Optional[dict] = None):
        super().__init__(message)
        self.context = dict(context or {})

    def to_dict(self) -> dict:
        return {
            "type": type(self).__name__,
            "message": str(self),
            "context": {k: repr(v) for k, v in self.context.items()},
        }


class DomainError(SimulationError, ValueError):
    """Números quânticos inválidos ou combinação não suportada."""


class ConfigurationError(SimulationError, ValueError):
    """Configuração inválida: chaves desconhecidas, limites, dimensões."""


class NumericalError(SimulationError, RuntimeError):
    """Falha de autovalores, integrador ou conservação do traço."""


class TrajectoryError(NumericalError):
    """Falha numérica em uma trajetória específica do ensemble."""

    def __init__(self, message: str, index: int, seed: int, context: Optional[dict] = None):
        ctx = {"index": index, "seed": seed}
        ctx.update(context or {})
        super().__init__(message, ctx)
        self.index = index
        self.seed = seed
