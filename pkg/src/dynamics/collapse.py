"""
Conjuntos de Operadores de Colapso
==================================

Conjunto padrão (cinco canais):
- √(2κ) a+ e √(2κ) a-   (decaimento dos modos da cavidade)
- √Γ A_σ, σ = -1, 0, +1  (emissão espontânea)

Conjunto de detectores (K analisadores, 2K canais de cavidade):
- √(2κ/K) a_x(2φ_k) e √(2κ/K) a_y(2φ_k), mais os três canais atômicos

Em ambos Σ C†C = 2κ (a+†a+ + a-†a-) + Γ Σ_σ A_σ†A_σ: as duas
descrições levam à mesma equação mestra.
"""

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from ..basis import SIGMAS, OperatorMatrix, SystemBasis, dagger
from ..correlations.observables import STANDARD_CAVITY_LABELS, detector_label, rotated_mode_operators
from ..exceptions import ConfigurationError
from ..hamiltonian import SimulationConfig, check_basis, hamiltonian_parts, initial_vector, reachable_states

CAVITY = "cavity"
SPONTANEOUS = "spontaneous"

SPONTANEOUS_LABELS = {-1: "spont_-1", 0: "spont_0", 1: "spont_+1"}


@dataclass(frozen=True, eq=False)
class CollapseChannel:
    label: str
    operator: OperatorMatrix
    kind: str


@dataclass(eq=False)
class CollapseSet:
    """Sequência rotulada de canais de salto."""
    channels: Tuple[CollapseChannel, ...]

    def __len__(self) -> int:
        return len(self.channels)

    def __iter__(self) -> Iterator[CollapseChannel]:
        return iter(self.channels)

    @property
    def labels(self) -> List[str]:
        return [c.label for c in self.channels]

    @property
    def operators(self) -> List[OperatorMatrix]:
        return [c.operator for c in self.channels]

    @property
    def cavity_channels(self) -> List[CollapseChannel]:
        return [c for c in self.channels if c.kind == CAVITY]

    @cached_property
    def rate_operator(self) -> OperatorMatrix:
        """Σ_c C_c† C_c."""
        total = None
        for channel in self.channels:
            term = dagger(channel.operator) @ channel.operator
            total = term if total is None else total + term
        return total.tocsr()

    def restrict(self, manifold: np.ndarray) -> "CollapseSet":
        """Canais projetados no subespaço `manifold` (mesmos rótulos e ordem)."""
        return CollapseSet(tuple(
            replace(c, operator=restrict_operator(c.operator, manifold)) for c in self.channels
        ))

    def rates(self, psi: np.ndarray) -> np.ndarray:
        """Taxas ‖C_c ψ‖² de cada canal."""
        out = np.empty(len(self.channels))
        for i, channel in enumerate(self.channels):
            phi = channel.operator @ psi
            out[i] = np.vdot(phi, phi).real
        return out


def _spontaneous_channels(cfg: SimulationConfig, basis: SystemBasis) -> List[CollapseChannel]:
    lowering = basis.operators.lowering
    weight = np.sqrt(cfg.gamma)
    return [
        CollapseChannel(SPONTANEOUS_LABELS[sigma], (weight * lowering[sigma]).tocsr(), SPONTANEOUS)
        for sigma in SIGMAS
    ]


def standard_collapse_set(cfg: SimulationConfig, basis: SystemBasis) -> CollapseSet:
    """Cinco canais: dois de cavidade (σ+, σ-) e três atômicos."""
    check_basis(cfg, basis)
    lib = basis.operators
    weight = np.sqrt(2.0 * cfg.kappa)
    cavity = [
        CollapseChannel(STANDARD_CAVITY_LABELS[pol], (weight * lib.mode(pol)).tocsr(), CAVITY)
        for pol in ("plus", "minus")
    ]
    return CollapseSet(tuple(cavity + _spontaneous_channels(cfg, basis)))


def detector_collapse_set(cfg: SimulationConfig, basis: SystemBasis, angles: Sequence[float]) -> CollapseSet:
    """
    Canais de detecção rotacionados para K analisadores.

    Args:
        angles: Fases GHZ φ_k; o analisador k usa a_x(2φ_k), a_y(2φ_k)
    """
    check_basis(cfg, basis)
    if len(angles) == 0:
        raise ConfigurationError("Pelo menos um analisador é necessário")
    weight = np.sqrt(2.0 * cfg.kappa / len(angles))
    cavity = []
    for k, phi in enumerate(angles, start=1):
        a_x, a_y = rotated_mode_operators(basis, 2.0 * float(phi))
        cavity.append(CollapseChannel(detector_label(k, "x"), (weight * a_x).tocsr(), CAVITY))
        cavity.append(CollapseChannel(detector_label(k, "y"), (weight * a_y).tocsr(), CAVITY))
    return CollapseSet(tuple(cavity + _spontaneous_channels(cfg, basis)))


def dissipator_sum(cfg: SimulationConfig, basis: SystemBasis) -> OperatorMatrix:
    """2κ (N+ + N-) + Γ Σ_σ A_σ†A_σ, independente da escolha de canais."""
    lib = basis.operators
    total = 2.0 * cfg.kappa * (lib.number_plus + lib.number_minus)
    for sigma in SIGMAS:
        total = total + cfg.gamma * (dagger(lib.lowering[sigma]) @ lib.lowering[sigma])
    return total.tocsr()


def restrict_operator(op: OperatorMatrix, manifold: np.ndarray) -> OperatorMatrix:
    return op[manifold][:, manifold].tocsr()


def dynamical_manifold(cfg: SimulationConfig, basis: SystemBasis, collapse: CollapseSet) -> np.ndarray:
    """Estados alcançáveis a partir do estado inicial via H_int e saltos."""
    parts = hamiltonian_parts(cfg, basis)
    psi0 = initial_vector(cfg, basis)
    sources = np.flatnonzero(np.abs(psi0) > 0)
    operators = [parts.detuning, parts.coupling, parts.pump] + collapse.operators
    return reachable_states(operators, sources, basis.dimension)
