"""
Observáveis de Correlação GHZ
=============================

Operadores de spin dos modos de polarização (representação de
Schwinger), modos lineares rotacionados, analisadores de fótons e o
analisador atômico de paridade.

Convenção do ângulo dos analisadores:
- rotated_mode_operators(basis, φ) segue a forma literal
  a_x = (e^{-iφ/4} a+ + e^{iφ/4} a-)/√2, de modo que
  a_x†a_x - a_y†a_y = e^{iφ/2} L+ + e^{-iφ/2} L-
- O ângulo φ_k de um analisador é a fase GHZ: os canais de detecção do
  analisador k usam rotated_mode_operators(basis, 2 φ_k), e a
  correlação tripla segue cos(φ_1 + φ_2 + φ_3)
"""

from functools import reduce
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, sparse

from ..basis import GROUND, OperatorMatrix, SystemBasis, dagger, magnetic_numbers
from ..exceptions import DomainError

POLARIZATION_SIGN = {"x": 1, "y": -1}

STANDARD_CAVITY_LABELS = {"plus": "cavity_plus", "minus": "cavity_minus"}


def detector_label(analyzer: int, polarization: str) -> str:
    """Rótulo do canal de detecção, ex. 'cav_1_x'."""
    return f"cav_{analyzer}_{polarization}"


def parse_detector_label(label: str) -> Optional[Tuple[int, str]]:
    """(analisador, polarização) de um rótulo 'cav_k_x|y'; None para outros canais."""
    parts = label.split("_")
    if len(parts) != 3 or parts[0] != "cav" or parts[2] not in POLARIZATION_SIGN:
        return None
    try:
        return int(parts[1]), parts[2]
    except ValueError:
        return None


def is_cavity_channel(label: str) -> bool:
    return label.startswith("cav")


def rotated_mode_operators(basis: SystemBasis, phi: float) -> Tuple[OperatorMatrix, OperatorMatrix]:
    """
    Modos lineares (a_x(φ), a_y(φ)).

        a_x = (e^{-iφ/4} a+ + e^{iφ/4} a-)/√2
        a_y = i (e^{-iφ/4} a+ - e^{iφ/4} a-)/√2
    """
    lib = basis.operators
    rotated_plus = np.exp(-0.25j * phi) * lib.a_plus
    rotated_minus = np.exp(0.25j * phi) * lib.a_minus
    a_x = ((rotated_plus + rotated_minus) / np.sqrt(2.0)).tocsr()
    a_y = (1j * (rotated_plus - rotated_minus) / np.sqrt(2.0)).tocsr()
    return a_x, a_y


def spin_operators(basis: SystemBasis) -> Tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """L+ = a+†a-, L- = a-†a+, L_z = (a+†a+ - a-†a-)/2."""
    lib = basis.operators
    l_plus = (dagger(lib.a_plus) @ lib.a_minus).tocsr()
    l_minus = (dagger(lib.a_minus) @ lib.a_plus).tocsr()
    l_z = (0.5 * (lib.number_plus - lib.number_minus)).tocsr()
    return l_plus, l_minus, l_z


def analyzer_operator(basis: SystemBasis, phi: float) -> OperatorMatrix:
    """L(φ) = e^{iφ/2} L+ + e^{-iφ/2} L-."""
    l_plus, l_minus, _ = spin_operators(basis)
    return (np.exp(0.5j * phi) * l_plus + np.exp(-0.5j * phi) * l_minus).tocsr()


# =============================================================================
# ANALISADOR ATÔMICO
# =============================================================================

def angular_momentum_ladder(f: float) -> Tuple[np.ndarray, np.ndarray]:
    """J+ e J- na base |f, m⟩ com m crescente (elementos positivos)."""
    ms = magnetic_numbers(f)
    dim = len(ms)
    j_plus = np.zeros((dim, dim))
    for i, m in enumerate(ms[:-1]):
        j_plus[i + 1, i] = np.sqrt(f * (f + 1) - m * (m + 1))
    return j_plus, j_plus.T.copy()


def atomic_analyzer_operator(f: float, theta: float) -> np.ndarray:
    """J(θ) = (e^{-iθ/4} J+ + e^{iθ/4} J-)/2."""
    j_plus, j_minus = angular_momentum_ladder(f)
    return 0.5 * (np.exp(-0.25j * theta) * j_plus + np.exp(0.25j * theta) * j_minus)


def parity_projectors(f: float, theta: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Projetores sobre autoestados pares (m_J = 0, ±2, ...) e ímpares de J(θ).
    """
    if abs(f - round(f)) > 1e-12:
        raise DomainError(f"Paridade de m_J indefinida para F semi-inteiro ({f})", {"f": f})
    eigenvalues, vectors = linalg.eigh(atomic_analyzer_operator(f, theta))
    labels = np.rint(eigenvalues).astype(int)
    if np.max(np.abs(eigenvalues - labels)) > 1e-8:
        raise DomainError("Autovalores de J(θ) não inteiros", {"eigenvalues": eigenvalues})
    even = vectors[:, labels % 2 == 0]
    odd = vectors[:, labels % 2 != 0]
    return even @ even.conj().T, odd @ odd.conj().T


def parity_operator(f: float, theta: float) -> np.ndarray:
    """M(θ) = P_even(θ) - P_odd(θ) no nível fundamental."""
    p_even, p_odd = parity_projectors(f, theta)
    return p_even - p_odd


# =============================================================================
# EXPECTATIVA GHZ IDEAL
# =============================================================================

def _single_photon_analyzer(phi: float) -> np.ndarray:
    # base (|+⟩, |-⟩) de um fóton; autovalores ±1
    return np.array([[0.0, np.exp(1j * phi)], [np.exp(-1j * phi), 0.0]])


def ghz_expectation(n: int, amplitudes: Tuple[complex, complex], angles: Sequence[float]) -> float:
    """
    ⟨ψ| L_1(φ_1) ... L_n(φ_n) |ψ⟩ para ψ = α|n,0⟩ + β|0,n⟩, um fóton por analisador.

    Cada fóton é um sistema de dois níveis (σ+, σ-); o produto tensorial
    dos analisadores de um fóton atua sobre α|+...+⟩ + β|-...-⟩.
    Para α = β = 1/√2 reduz-se a cos(Σ φ_k).
    """
    if n < 1 or n != len(angles):
        raise DomainError(
            f"Número de fótons ({n}) difere do número de ângulos ({len(angles)})",
            {"n": n, "angles": list(angles)},
        )
    alpha, beta = (complex(a) for a in amplitudes)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-10:
        raise DomainError("Amplitudes não normalizadas", {"alpha": alpha, "beta": beta})

    state = np.zeros(2**n, dtype=complex)
    state[0] = alpha          # |+ + ... +⟩
    state[-1] = beta          # |- - ... -⟩
    operator = reduce(np.kron, [_single_photon_analyzer(phi) for phi in angles])
    return float(np.real(np.vdot(state, operator @ state)))


def ghz_state_vector(
    basis: SystemBasis,
    n: int,
    amplitudes: Tuple[complex, complex] = (2**-0.5, 2**-0.5),
    atom_m: float = 0,
) -> np.ndarray:
    """α|g_m, n, 0⟩ + β|g_m, 0, n⟩ na base completa."""
    psi = np.zeros(basis.dimension, dtype=complex)
    psi[basis.index_of((GROUND, atom_m, n, 0))] += amplitudes[0]
    psi[basis.index_of((GROUND, atom_m, 0, n))] += amplitudes[1]
    return psi


def atom_photon_ghz_vector(basis: SystemBasis, n: int = 2, m: float = 2) -> np.ndarray:
    """(|g_-m, n, 0⟩ + |g_m, 0, n⟩)/√2."""
    psi = np.zeros(basis.dimension, dtype=complex)
    psi[basis.index_of((GROUND, -m, n, 0))] = 2**-0.5
    psi[basis.index_of((GROUND, m, 0, n))] = 2**-0.5
    return psi


def embed_ground_operator(basis: SystemBasis, operator: np.ndarray) -> OperatorMatrix:
    """Estende um operador do nível fundamental (m crescente) para a base completa."""
    n_g = basis.scheme.n_ground
    n_e = basis.scheme.n_excited
    atomic = np.zeros((n_g + n_e, n_g + n_e), dtype=complex)
    atomic[:n_g, :n_g] = operator
    photons = sparse.identity(basis.photon_dim, dtype=complex, format="csr")
    return sparse.kron(sparse.csr_matrix(atomic), photons, format="csr")
