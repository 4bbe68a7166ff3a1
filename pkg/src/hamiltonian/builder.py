"""
Hamiltoniano de Interação e Hamiltoniano Efetivo
================================================

No referencial girante na frequência do laser (ħ = 1):

    H_int = δ+ a+†a+ + δ- a-†a-
            - i g(t) (a+† A_{+1} - A_{+1}† a+)
            - i g(t) (a-† A_{-1} - A_{-1}† a-)
            + i Ω(t) (A_0 - A_0†)

    H_eff = H_int - i κ (a+†a+ + a-†a-) - i (Γ/2) Σ_σ A_σ† A_σ

A montagem em cada instante reutiliza operadores constituintes em
cache; só os escalares g(t) e Ω(t) mudam entre passos.
"""

import logging
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import breadth_first_order

from ..basis import (
    BasisState,
    GROUND,
    LevelScheme,
    OperatorMatrix,
    SystemBasis,
    dagger,
    enumerate_basis,
)
from ..config import PHYSICS_CONFIG
from ..exceptions import ConfigurationError
from .pulses import PulseProfile, pulse_value

logger = logging.getLogger(__name__)

CAVITY_MODES = ("both", "minus")

Amplitude = Tuple[BasisState, complex]


@dataclass(frozen=True)
class SimulationConfig:
    """
    Parâmetros físicos de uma simulação (unidades de Γ).

    Attributes:
        scheme: Esquema de níveis
        n_max: Corte de fótons por modo
        cavity_pulse: Perfil g(t)
        pump_pulse: Perfil Ω(t)
        delta_plus, delta_minus: Dessintonias δ± dos modos
        kappa: Taxa de decaimento do campo κ
        gamma: Taxa de emissão espontânea Γ
        t_start, t_end: Janela de simulação
        initial_state: Pares (estado da base, amplitude complexa)
        cavity_modes: "both" ou "minus" (somente σ-)
    """
    scheme: LevelScheme
    n_max: int
    cavity_pulse: PulseProfile
    pump_pulse: PulseProfile
    delta_plus: float = 0.0
    delta_minus: float = 0.0
    kappa: float = 0.0
    gamma: float = 1.0
    t_start: float = 0.0
    t_end: float = 40.0
    initial_state: Tuple[Amplitude, ...] = field(default=())
    cavity_modes: str = "both"

    def __post_init__(self):
        # entradas repetidas somam amplitudes antes da verificação da norma
        merged = {}
        for state, amp in self.initial_state:
            key = tuple(state)
            merged[key] = merged.get(key, 0j) + complex(amp)
        object.__setattr__(self, "initial_state", tuple(merged.items()))

        if self.kappa < 0:
            raise ConfigurationError(f"kappa deve ser >= 0 (recebido {self.kappa})", {"kappa": self.kappa})
        if self.gamma < 0:
            raise ConfigurationError(f"gamma deve ser >= 0 (recebido {self.gamma})", {"gamma": self.gamma})
        if self.n_max < 0:
            raise ConfigurationError(f"n_max deve ser >= 0 (recebido {self.n_max})", {"n_max": self.n_max})
        for name in ("delta_plus", "delta_minus", "kappa", "gamma", "t_start", "t_end"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} deve ser finito", {name: getattr(self, name)})
        if self.t_end <= self.t_start:
            raise ConfigurationError(
                f"Janela inválida: t_end={self.t_end} <= t_start={self.t_start}",
                {"t_start": self.t_start, "t_end": self.t_end},
            )
        if self.cavity_modes not in CAVITY_MODES:
            raise ConfigurationError(
                f"cavity_modes deve ser um de {CAVITY_MODES} (recebido {self.cavity_modes!r})",
                {"cavity_modes": self.cavity_modes},
            )
        if not self.initial_state:
            raise ConfigurationError("Estado inicial vazio")
        norm = sum(abs(amp) ** 2 for _, amp in self.initial_state)
        if abs(norm - 1.0) > 1e-12:
            raise ConfigurationError(
                f"Estado inicial não normalizado: norma² = {norm!r}", {"norm": norm}
            )

    def with_updates(self, **changes) -> "SimulationConfig":
        return replace(self, **changes)

    def build_basis(self) -> SystemBasis:
        return enumerate_basis(self.scheme, self.n_max)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["initial_state"] = [
            {"state": list(state), "amplitude": [amp.real, amp.imag]} for state, amp in self.initial_state
        ]
        return data


def default_simulation_config(**overrides) -> SimulationConfig:
    """Configuração padrão de PHYSICS_CONFIG, estado inicial |g_{-F_g}, 0, 0⟩."""
    physics = PHYSICS_CONFIG
    scheme = overrides.pop("scheme", None) or LevelScheme(**physics["level_scheme"])
    values = {
        "scheme": scheme,
        "n_max": physics["n_max"],
        "cavity_pulse": PulseProfile(**physics["cavity_pulse"]),
        "pump_pulse": PulseProfile(**physics["pump_pulse"]),
        "delta_plus": physics["delta_plus"],
        "delta_minus": physics["delta_minus"],
        "kappa": physics["kappa"],
        "gamma": physics["gamma"],
        "t_start": physics["t_start"],
        "t_end": physics["t_end"],
        "initial_state": (((GROUND, scheme.ground_ms[0], 0, 0), 1.0),),
        "cavity_modes": physics["cavity_modes"],
    }
    values.update(overrides)
    return SimulationConfig(**values)


def check_basis(cfg: SimulationConfig, basis: SystemBasis) -> None:
    if basis.scheme != cfg.scheme or basis.n_max != cfg.n_max:
        raise ConfigurationError(
            f"Base ({basis.scheme.label()}, n_max={basis.n_max}) incompatível com a "
            f"configuração ({cfg.scheme.label()}, n_max={cfg.n_max})",
            {"basis_dimension": basis.dimension},
        )


def state_vector(basis: SystemBasis, amplitudes: Iterable[Amplitude]) -> np.ndarray:
    psi = np.zeros(basis.dimension, dtype=complex)
    for state, amp in amplitudes:
        try:
            psi[basis.index_of(state)] += amp
        except ValueError as e:
            raise ConfigurationError(f"Estado inicial fora da base: {state}", {"state": state}) from e
    return psi


def initial_vector(cfg: SimulationConfig, basis: SystemBasis) -> np.ndarray:
    check_basis(cfg, basis)
    return state_vector(basis, cfg.initial_state)


def is_hermitian(op: OperatorMatrix, tol: float = 1e-12) -> bool:
    diff = op - dagger(op)
    scale = max(abs(op).max(), 1.0) if op.nnz else 1.0
    return (abs(diff).max() if diff.nnz else 0.0) <= tol * scale


@lru_cache(maxsize=64)
def _assemble_parts(
    basis: SystemBasis,
    delta_plus: float,
    delta_minus: float,
    kappa: float,
    gamma: float,
    cavity_modes: str,
) -> Tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    lib = basis.operators
    lowering = lib.lowering

    detuning = (delta_plus * lib.number_plus + delta_minus * lib.number_minus).tocsr()
    detuning.eliminate_zeros()

    emission_minus = dagger(lib.a_minus) @ lowering[-1]
    coupling = -1j * (emission_minus - dagger(emission_minus))
    if cavity_modes == "both":
        emission_plus = dagger(lib.a_plus) @ lowering[1]
        coupling = coupling - 1j * (emission_plus - dagger(emission_plus))
    coupling = coupling.tocsr()
    coupling.eliminate_zeros()

    pump = (1j * (lowering[0] - dagger(lowering[0]))).tocsr()
    pump.eliminate_zeros()

    spontaneous = dagger(lowering[-1]) @ lowering[-1]
    for sigma in (0, 1):
        spontaneous = spontaneous + dagger(lowering[sigma]) @ lowering[sigma]
    decay = (-1j * kappa * (lib.number_plus + lib.number_minus) - 0.5j * gamma * spontaneous).tocsr()
    decay.eliminate_zeros()

    logger.debug(
        f"Operadores montados: dim={basis.dimension}, nnz(V_g)={coupling.nnz}, nnz(V_Ω)={pump.nnz}"
    )
    return detuning, coupling, pump, decay


@dataclass(frozen=True, eq=False)
class HamiltonianParts:
    """Constituintes de H(t) = H_det + g(t) V_g + Ω(t) V_Ω (+ parte de decaimento)."""
    detuning: OperatorMatrix
    coupling: OperatorMatrix
    pump: OperatorMatrix
    decay: OperatorMatrix
    cavity_pulse: PulseProfile
    pump_pulse: PulseProfile

    def coefficients(self, t: float) -> Tuple[float, float]:
        return pulse_value(self.cavity_pulse, t), pulse_value(self.pump_pulse, t)

    def h_int(self, t: float) -> OperatorMatrix:
        g, omega = self.coefficients(t)
        return (self.detuning + g * self.coupling + omega * self.pump).tocsr()

    def h_eff(self, t: float) -> OperatorMatrix:
        return (self.h_int(t) + self.decay).tocsr()

    def apply_h_eff(self, t: float, psi: np.ndarray) -> np.ndarray:
        g, omega = self.coefficients(t)
        return self.static_eff @ psi + g * (self.coupling @ psi) + omega * (self.pump @ psi)

    @property
    def static_eff(self) -> OperatorMatrix:
        cached = self.__dict__.get("_static_eff")
        if cached is None:
            cached = (self.detuning + self.decay).tocsr()
            object.__setattr__(self, "_static_eff", cached)
        return cached

    def restrict(self, indices: Sequence[int]) -> "HamiltonianParts":
        """Mesmos termos projetados no subespaço `indices` (fechado sob H_eff)."""
        indices = np.asarray(indices, dtype=int)

        def pick(op: OperatorMatrix) -> OperatorMatrix:
            return op[indices][:, indices].tocsr()

        return replace(
            self,
            detuning=pick(self.detuning),
            coupling=pick(self.coupling),
            pump=pick(self.pump),
            decay=pick(self.decay),
        )


def hamiltonian_parts(cfg: SimulationConfig, basis: SystemBasis) -> HamiltonianParts:
    check_basis(cfg, basis)
    detuning, coupling, pump, decay = _assemble_parts(
        basis,
        float(cfg.delta_plus),
        float(cfg.delta_minus),
        float(cfg.kappa),
        float(cfg.gamma),
        cfg.cavity_modes,
    )
    return HamiltonianParts(detuning, coupling, pump, decay, cfg.cavity_pulse, cfg.pump_pulse)


def build_h_int(cfg: SimulationConfig, basis: SystemBasis, t: float) -> OperatorMatrix:
    """H_int(t), hermitiano."""
    return hamiltonian_parts(cfg, basis).h_int(t)


def build_h_eff(cfg: SimulationConfig, basis: SystemBasis, t: float) -> OperatorMatrix:
    """H_eff(t) = H_int(t) - iκ(N+ + N-) - i(Γ/2) Σ A_σ†A_σ."""
    return hamiltonian_parts(cfg, basis).h_eff(t)


def reachable_states(operators: Sequence[OperatorMatrix], sources: Sequence[int], dimension: int) -> np.ndarray:
    """
    Índices alcançáveis a partir de `sources` seguindo o padrão de esparsidade.

    Uma entrada op[r, c] != 0 é uma aresta c -> r.
    """
    adjacency = sparse.csr_matrix((dimension, dimension), dtype=float)
    for op in operators:
        adjacency = adjacency + abs(op).T
    adjacency = adjacency.tocsr()
    adjacency.eliminate_zeros()

    reached = set()
    for source in sources:
        if source in reached:
            continue
        order = breadth_first_order(adjacency, source, directed=True, return_predecessors=False)
        reached.update(int(i) for i in order)
    return np.array(sorted(reached), dtype=int)


def coupled_manifold(cfg: SimulationConfig, basis: SystemBasis, extra: Optional[Sequence[OperatorMatrix]] = None) -> np.ndarray:
    """Subespaço acoplado ao estado inicial por H_int (e, opcionalmente, outros operadores)."""
    parts = hamiltonian_parts(cfg, basis)
    psi0 = initial_vector(cfg, basis)
    sources = np.flatnonzero(np.abs(psi0) > 0)
    operators = [parts.detuning, parts.coupling, parts.pump] + list(extra or [])
    return reachable_states(operators, sources, basis.dimension)
