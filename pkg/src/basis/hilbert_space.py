"""
Espaço de Hilbert e Operadores
==============================

Base |x_m, n+, n-⟩ = |x_m⟩ ⊗ |n+⟩ ⊗ |n-⟩ com corte n_max por modo.

Ordenação (determinística, comparável entre execuções):
- nível: fundamental antes do excitado
- m crescente
- n+ crescente, depois n- crescente

Índice = atom_idx * (n_max+1)² + n+ * (n_max+1) + n-, onde atom_idx
percorre primeiro os subníveis fundamentais e depois os excitados.

Operadores são matrizes esparsas scipy.sparse (CSR, complex128) com
zeros explícitos eliminados, de modo que o padrão de esparsidade
reflete os acoplamentos reais.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Tuple

import numpy as np
from scipy import sparse

from ..exceptions import DomainError
from .angular import LevelScheme, Number, SIGMAS, cg_coefficient

logger = logging.getLogger(__name__)

GROUND = "g"
EXCITED = "e"
POLARIZATIONS = ("plus", "minus")

BasisState = Tuple[str, Number, int, int]
OperatorMatrix = sparse.csr_matrix


def format_state(state: BasisState) -> str:
    """Rótulo compacto, ex. 'g-3_0_0' para |g_-3, 0, 0⟩."""
    level, m, n_plus, n_minus = state
    return f"{level}{m:g}_{n_plus}_{n_minus}"


def dagger(op: OperatorMatrix) -> OperatorMatrix:
    return op.conj().transpose().tocsr()


def _build(rows: List[int], cols: List[int], values: List[complex], dim: int) -> OperatorMatrix:
    op = sparse.csr_matrix(
        (np.asarray(values, dtype=complex), (np.asarray(rows, dtype=int), np.asarray(cols, dtype=int))),
        shape=(dim, dim),
    )
    op.eliminate_zeros()
    return op


@dataclass(eq=False)
class SystemBasis:
    """
    Enumeração dos estados |x_m, n+, n-⟩.

    Attributes:
        scheme: Esquema de níveis
        n_max: Corte de fótons por modo
        states: Estados na ordem da base
        index: Mapa estado -> posição
    """
    scheme: LevelScheme
    n_max: int
    states: Tuple[BasisState, ...]
    index: Dict[BasisState, int] = field(repr=False)

    @property
    def dimension(self) -> int:
        return len(self.states)

    @property
    def photon_dim(self) -> int:
        return (self.n_max + 1) ** 2

    def index_of(self, state: BasisState) -> int:
        try:
            return self.index[tuple(state)]
        except KeyError:
            raise DomainError(f"Estado {state} não pertence à base", {"state": state}) from None

    def state_of(self, i: int) -> BasisState:
        if not 0 <= i < self.dimension:
            raise DomainError(f"Índice {i} fora da base (dimensão {self.dimension})", {"index": i})
        return self.states[i]

    def label(self, i: int) -> str:
        return format_state(self.state_of(i))

    @cached_property
    def labels(self) -> List[str]:
        return [format_state(s) for s in self.states]

    @cached_property
    def levels(self) -> np.ndarray:
        return np.array([s[0] for s in self.states])

    @cached_property
    def ms(self) -> np.ndarray:
        return np.array([float(s[1]) for s in self.states])

    @cached_property
    def n_plus(self) -> np.ndarray:
        return np.array([s[2] for s in self.states], dtype=int)

    @cached_property
    def n_minus(self) -> np.ndarray:
        return np.array([s[3] for s in self.states], dtype=int)

    @cached_property
    def excited_mask(self) -> np.ndarray:
        return self.levels == EXCITED

    @cached_property
    def cutoff_mask(self) -> np.ndarray:
        """Estados na camada de corte (n+ = n_max ou n- = n_max)."""
        return (self.n_plus == self.n_max) | (self.n_minus == self.n_max)

    @cached_property
    def atomic_levels(self) -> List[Tuple[str, Number]]:
        return [(GROUND, m) for m in self.scheme.ground_ms] + [(EXCITED, m) for m in self.scheme.excited_ms]

    def atomic_populations(self, probabilities: np.ndarray) -> np.ndarray:
        """Soma as probabilidades sobre os fótons: uma coluna por subnível atômico."""
        probs = np.asarray(probabilities)
        shape = probs.shape[:-1] + (self.scheme.n_levels, self.photon_dim)
        return probs.reshape(shape).sum(axis=-1)

    def photon_distribution(self, probabilities: np.ndarray, polarization: str) -> np.ndarray:
        """Distribuição P(n) do modo indicado, n = 0..n_max."""
        counts = self.n_plus if polarization == "plus" else self.n_minus
        probs = np.asarray(probabilities)
        out = np.zeros(probs.shape[:-1] + (self.n_max + 1,))
        for n in range(self.n_max + 1):
            out[..., n] = probs[..., counts == n].sum(axis=-1)
        return out

    def cutoff_population(self, probabilities: np.ndarray) -> np.ndarray:
        return np.asarray(probabilities)[..., self.cutoff_mask].sum(axis=-1)

    @cached_property
    def operators(self) -> "OperatorLibrary":
        return OperatorLibrary(self)


def enumerate_basis(scheme: LevelScheme, n_max: int) -> SystemBasis:
    """
    Constrói a base com dimensão (2F_g+1 + 2F_e+1) x (n_max+1)².

    Args:
        scheme: Esquema de níveis
        n_max: Corte de fótons por modo (>= 0)
    """
    if int(n_max) != n_max or n_max < 0:
        raise DomainError(f"n_max deve ser inteiro >= 0 (recebido {n_max})", {"n_max": n_max})
    n_max = int(n_max)

    states = []
    for level, ms in ((GROUND, scheme.ground_ms), (EXCITED, scheme.excited_ms)):
        for m in ms:
            for n_plus in range(n_max + 1):
                for n_minus in range(n_max + 1):
                    states.append((level, m, n_plus, n_minus))

    index = {state: i for i, state in enumerate(states)}
    logger.debug(f"Base {scheme.label()} com n_max={n_max}: dimensão {len(states)}")
    return SystemBasis(scheme=scheme, n_max=n_max, states=tuple(states), index=index)


def atomic_lowering(basis: SystemBasis, sigma: int) -> OperatorMatrix:
    """
    A_σ = Σ |g_{m_g}⟩ ⟨F_g m_g; 1 σ | F_e m_e⟩ ⟨e_{m_e}|, identidade nos fótons.
    """
    if sigma not in SIGMAS:
        raise DomainError(f"σ deve ser -1, 0 ou +1 (recebido {sigma})", {"sigma": sigma})
    scheme = basis.scheme
    ground = set(scheme.ground_ms)
    rows, cols, values = [], [], []
    for col, (level, m_e, n_plus, n_minus) in enumerate(basis.states):
        if level != EXCITED:
            continue
        m_g = m_e - sigma
        if m_g not in ground:
            continue
        value = cg_coefficient(scheme.f_g, m_g, sigma, scheme.f_e, m_e)
        if value == 0.0:
            continue
        rows.append(basis.index[(GROUND, m_g, n_plus, n_minus)])
        cols.append(col)
        values.append(value)
    return _build(rows, cols, values, basis.dimension)


def mode_annihilation(basis: SystemBasis, polarization: str) -> OperatorMatrix:
    """a|n⟩ = √n |n-1⟩ no modo indicado ("plus" ou "minus")."""
    if polarization not in POLARIZATIONS:
        raise DomainError(
            f"Polarização deve ser 'plus' ou 'minus' (recebido {polarization!r})",
            {"polarization": polarization},
        )
    rows, cols, values = [], [], []
    for col, (level, m, n_plus, n_minus) in enumerate(basis.states):
        if polarization == "plus" and n_plus > 0:
            target = (level, m, n_plus - 1, n_minus)
            n = n_plus
        elif polarization == "minus" and n_minus > 0:
            target = (level, m, n_plus, n_minus - 1)
            n = n_minus
        else:
            continue
        rows.append(basis.index[target])
        cols.append(col)
        values.append(np.sqrt(n))
    return _build(rows, cols, values, basis.dimension)


class OperatorLibrary:
    """
    Operadores constituintes, construídos uma vez por base.

    Imutáveis após a construção; seguros para leitura concorrente.
    """

    def __init__(self, basis: SystemBasis):
        self.basis = basis

    @cached_property
    def a_plus(self) -> OperatorMatrix:
        return mode_annihilation(self.basis, "plus")

    @cached_property
    def a_minus(self) -> OperatorMatrix:
        return mode_annihilation(self.basis, "minus")

    def mode(self, polarization: str) -> OperatorMatrix:
        return self.a_plus if polarization == "plus" else self.a_minus

    @cached_property
    def lowering(self) -> Dict[int, OperatorMatrix]:
        return {sigma: atomic_lowering(self.basis, sigma) for sigma in SIGMAS}

    @cached_property
    def number_plus(self) -> OperatorMatrix:
        return sparse.diags(self.basis.n_plus.astype(complex), format="csr")

    @cached_property
    def number_minus(self) -> OperatorMatrix:
        return sparse.diags(self.basis.n_minus.astype(complex), format="csr")

    @cached_property
    def excited_projector(self) -> OperatorMatrix:
        return sparse.diags(self.basis.excited_mask.astype(complex), format="csr")

    @cached_property
    def identity(self) -> OperatorMatrix:
        return sparse.identity(self.basis.dimension, dtype=complex, format="csr")
