"""
Estados Escuros Analíticos
==========================

Autoestados de H_int sem amplitude nos níveis excitados, para δ = 0.
Cada componente é coef * g^a * Ω^b sobre um estado |g_m, n+, n-⟩.

Esquemas suportados:
- F_g = 3 -> F_e = 3: variedades k = 0, 1, 2 (k pares de fótons extras)
- J_g = 2 -> J_e = 1: apenas k = 0

Os sinais seguem a convenção de Condon-Shortley usada em
cg_coefficient; com outra convenção os coeficientes mudariam de sinal.

A avaliação usa (g, Ω) normalizados por hypot(g, Ω): os vetores são
homogêneos em (g, Ω), então o resultado normalizado não muda e não
há underflow nas bordas dos pulsos.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..basis import BasisState, GROUND, LevelScheme, SystemBasis, format_state
from ..exceptions import DomainError

# (m, n+, n-, coeficiente, potência de g, potência de Ω)
_F3_TERMS = {
    0: [
        (-3, 0, 0, -math.sqrt(15), 3, 0),
        (-2, 0, 1, math.sqrt(45), 2, 1),
        (-1, 0, 2, -math.sqrt(18), 1, 2),
        (0, 0, 3, 1.0, 0, 3),
    ],
    1: [
        (-3, 1, 1, math.sqrt(60), 3, 0),
        (-2, 1, 2, -math.sqrt(90), 2, 1),
        (-1, 1, 3, math.sqrt(24), 1, 2),
        (0, 1, 4, -1.0, 0, 3),
        (-1, 0, 2, math.sqrt(18), 3, 0),
        (0, 0, 3, -math.sqrt(36), 2, 1),
        (1, 0, 4, math.sqrt(6), 1, 2),
    ],
    2: [
        (-3, 2, 2, -math.sqrt(150), 3, 0),
        (-2, 2, 3, math.sqrt(150), 2, 1),
        (-1, 2, 4, -math.sqrt(30), 1, 2),
        (0, 2, 5, 1.0, 0, 3),
        (-1, 1, 3, -math.sqrt(60), 3, 0),
        (0, 1, 4, math.sqrt(90), 2, 1),
        (1, 1, 5, -math.sqrt(12), 1, 2),
        (1, 0, 4, -math.sqrt(15), 3, 0),
        (2, 0, 5, math.sqrt(15), 2, 1),
    ],
}

_J2_TERMS = {
    0: [
        (0, 0, 0, -math.sqrt(12), 2, 0),
        (-1, 1, 0, 2.0, 1, 1),
        (1, 0, 1, 2.0, 1, 1),
        (-2, 2, 0, -1.0, 0, 2),
        (2, 0, 2, -1.0, 0, 2),
    ],
}

_TABLES = {
    LevelScheme(3, 3): _F3_TERMS,
    LevelScheme(2, 1): _J2_TERMS,
}


def supported_manifolds(scheme: LevelScheme) -> Tuple[int, ...]:
    return tuple(sorted(_TABLES.get(scheme, {})))


def _terms(k: int, scheme: LevelScheme) -> list:
    table = _TABLES.get(scheme)
    if table is None or k not in table:
        raise DomainError(
            f"Estado escuro analítico indisponível para k={k} no esquema {scheme.label()}",
            {"k": k, "scheme": scheme.label()},
        )
    return table[k]


def dark_state_components(k: int, scheme: LevelScheme) -> List[BasisState]:
    return [(GROUND, m, n_plus, n_minus) for m, n_plus, n_minus, *_ in _terms(k, scheme)]


def dark_state_series(
    k: int,
    scheme: LevelScheme,
    g: np.ndarray,
    omega: np.ndarray,
    g_dot: np.ndarray = None,
    omega_dot: np.ndarray = None,
) -> Tuple[List[BasisState], np.ndarray, np.ndarray]:
    """
    Vetores normalizados |E_k⟩ (e suas derivadas temporais) ao longo de uma série.

    Args:
        g, omega: Valores de g(t), Ω(t) (arrays de mesmo tamanho)
        g_dot, omega_dot: Derivadas temporais (opcionais)

    Returns:
        (componentes, U[n_t, n_comp], dU[n_t, n_comp]); dU é zero sem derivadas
    """
    terms = _terms(k, scheme)
    g = np.atleast_1d(np.asarray(g, dtype=float))
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    scale = np.hypot(g, omega)
    if np.any(scale <= 0) or np.any(g < 0) or np.any(omega < 0):
        raise DomainError("Estado escuro indefinido: g e Ω devem ser >= 0 e não ambos nulos")
    x = g / scale
    y = omega / scale
    g_rate = np.zeros_like(x) if g_dot is None else np.atleast_1d(g_dot) / scale
    omega_rate = np.zeros_like(y) if omega_dot is None else np.atleast_1d(omega_dot) / scale

    coeffs = np.array([t[3] for t in terms])
    a = np.array([t[4] for t in terms])
    b = np.array([t[5] for t in terms])

    xa = x[:, None] ** a
    yb = y[:, None] ** b
    v = coeffs * xa * yb
    # potências negativas multiplicam por zero, mas evitam 0 ** -1
    xa1 = np.where(a > 0, x[:, None] ** np.maximum(a - 1, 0), 0.0)
    yb1 = np.where(b > 0, y[:, None] ** np.maximum(b - 1, 0), 0.0)
    v_dot = coeffs * (a * xa1 * yb * g_rate[:, None] + b * xa * yb1 * omega_rate[:, None])

    norm = np.linalg.norm(v, axis=1)
    u = v / norm[:, None]
    projection = np.sum(v * v_dot, axis=1) / norm**3
    u_dot = v_dot / norm[:, None] - v * projection[:, None]
    return dark_state_components(k, scheme), u, u_dot


@dataclass
class DarkState:
    """
    Estado escuro |E_k⟩ normalizado.

    Attributes:
        k: Índice da variedade
        scheme: Esquema de níveis
        g, omega: Acoplamentos em que foi avaliado
        components: Estados da base com amplitude
        amplitudes: Amplitudes normalizadas (reais)
        normalization: Constante N_k (1 / norma do vetor não normalizado)
    """
    k: int
    scheme: LevelScheme
    g: float
    omega: float
    components: List[BasisState]
    amplitudes: np.ndarray
    normalization: float

    def amplitude(self, state: BasisState) -> float:
        for component, value in zip(self.components, self.amplitudes):
            if component == tuple(state):
                return float(value)
        return 0.0

    def vector(self, basis: SystemBasis) -> np.ndarray:
        """Vetor na base completa (componentes fora do corte geram DomainError)."""
        if basis.scheme != self.scheme:
            raise DomainError("Base com esquema diferente do estado escuro")
        psi = np.zeros(basis.dimension, dtype=complex)
        for component, value in zip(self.components, self.amplitudes):
            psi[basis.index_of(component)] = value
        return psi


def analytic_dark_state(k: int, g: float, omega: float, scheme: LevelScheme) -> DarkState:
    """|E_k(g, Ω)⟩ normalizado, com a constante de normalização N_k."""
    components, u, _ = dark_state_series(k, scheme, [g], [omega])
    terms = _terms(k, scheme)
    raw = np.array([c * g**pa * omega**pb for *_, c, pa, pb in terms])
    raw_norm = float(np.linalg.norm(raw))
    return DarkState(
        k=k,
        scheme=scheme,
        g=float(g),
        omega=float(omega),
        components=components,
        amplitudes=u[0],
        normalization=1.0 / raw_norm if raw_norm > 0 else math.inf,
    )


def dark_state_weights(k: int, scheme: LevelScheme, g: Sequence[float], omega: Sequence[float]) -> Dict[str, np.ndarray]:
    """Pesos |⟨x|E_k(t)⟩|² por componente, ao longo de uma série temporal."""
    components, u, _ = dark_state_series(k, scheme, g, omega)
    return {format_state(c): u[:, i] ** 2 for i, c in enumerate(components)}
