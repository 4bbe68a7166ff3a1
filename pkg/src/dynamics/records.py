"""
Registros clássicos das trajetórias (saltos detectados e estado final).
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..basis import SystemBasis
from ..config import OUTPUT_CONFIG


@dataclass
class JumpEvent:
    t: float
    channel: str

    def to_dict(self) -> dict:
        return {"t": self.t, "channel": self.channel}


@dataclass
class TrajectoryRecord:
    """
    Registro de uma trajetória quântica.

    Attributes:
        index: Índice da trajetória no ensemble
        seed: Semente derivada de (semente base, índice)
        events: Saltos em ordem estritamente crescente de tempo
        final_state: Estado normalizado em t_end
        flags: Marcações da pós-seleção (accepted, rejection, warning)
        atom_outcomes: Resultados da medição atômica anexados depois
        max_cutoff_population: Máxima população na camada n = n_max
        zero_rate_draws: Sorteios em que a taxa total de saltos era nula
    """
    index: int
    seed: int
    events: List[JumpEvent] = field(default_factory=list)
    final_state: Optional[np.ndarray] = None
    flags: Dict[str, Any] = field(default_factory=dict)
    atom_outcomes: List[dict] = field(default_factory=list)
    max_cutoff_population: float = 0.0
    zero_rate_draws: int = 0

    @property
    def n_jumps(self) -> int:
        return len(self.events)

    def jump_times(self) -> np.ndarray:
        return np.array([e.t for e in self.events], dtype=float)

    def channel_counts(self) -> Counter:
        return Counter(e.channel for e in self.events)

    def final_probabilities(self, basis: SystemBasis, min_population: float = None) -> Dict[str, float]:
        """Probabilidades finais por estado da base (omitindo as menores que o limiar)."""
        if self.final_state is None:
            return {}
        if min_population is None:
            min_population = OUTPUT_CONFIG["min_output_population"]
        probs = np.abs(self.final_state) ** 2
        return {basis.label(int(i)): float(probs[i]) for i in np.flatnonzero(probs > min_population)}

    def to_dict(self, basis: Optional[SystemBasis] = None) -> dict:
        data = {
            "index": self.index,
            "seed": self.seed,
            "events": [e.to_dict() for e in self.events],
            "final_probs": self.final_probabilities(basis) if basis is not None else {},
            "max_cutoff_population": self.max_cutoff_population,
        }
        if self.flags:
            data["flags"] = dict(self.flags)
        if self.atom_outcomes:
            data["atom_outcomes"] = list(self.atom_outcomes)
        return data
