"""
Modelo de Landau-Zener entre Estados Escuros
============================================

Modelo de dois estados sobre |E_0(t)⟩ e |E_1(t)⟩, com |ψ⟩ = c_0|E_0⟩ + c_1|E_1⟩.
Projetando a equação de Schrödinger em ⟨E_i|:

    S ċ = -i H_m c - D c

com S_ij = ⟨E_i|E_j⟩ (os estados não são ortogonais),
D_ij = ⟨E_i|∂_t E_j⟩ e H_m,ij = ⟨E_i|(δ+ N+ + δ- N-)|E_j⟩; os termos de
acoplamento anulam os estados escuros.

Integração: RK4 de passo fixo (<= lz_max_step). Os vetores e as
derivadas são analíticos e reais, o que fixa o gauge.
"""

import logging
import math
from typing import Tuple

import numpy as np

from ..config import NUMERICS_CONFIG
from ..exceptions import NumericalError
from ..hamiltonian import SimulationConfig, pulse_derivative, pulse_value
from .dark_states import dark_state_series

logger = logging.getLogger(__name__)


def _two_state_generator(cfg: SimulationConfig, times: np.ndarray, pair: Tuple[int, int]) -> np.ndarray:
    """Matrizes A(t) = S⁻¹(-i H_m - D), shape [n_t, 2, 2]."""
    g = pulse_value(cfg.cavity_pulse, times)
    omega = pulse_value(cfg.pump_pulse, times)
    g_dot = pulse_derivative(cfg.cavity_pulse, times)
    omega_dot = pulse_derivative(cfg.pump_pulse, times)

    series = [dark_state_series(k, cfg.scheme, g, omega, g_dot, omega_dot) for k in pair]
    union = sorted({c for components, _, _ in series for c in components}, key=lambda s: (s[2] + s[3], s[1], s[2]))
    position = {c: i for i, c in enumerate(union)}

    n_t = len(times)
    u = np.zeros((2, n_t, len(union)))
    du = np.zeros((2, n_t, len(union)))
    for slot, (components, vectors, derivatives) in enumerate(series):
        cols = [position[c] for c in components]
        u[slot][:, cols] = vectors
        du[slot][:, cols] = derivatives

    detuning = np.array([cfg.delta_plus * c[2] + cfg.delta_minus * c[3] for c in union])

    overlap = np.einsum("itc,jtc->tij", u, u)
    coupling = np.einsum("itc,jtc->tij", u, du)
    energy = np.einsum("itc,c,jtc->tij", u, detuning, u)
    return np.linalg.solve(overlap, -1j * energy - coupling)


def landau_zener_evolution(cfg: SimulationConfig, config: dict = None, pair: Tuple[int, int] = (0, 1)):
    """
    Integra as amplitudes (c_0, c_1) ao longo da janela da configuração.

    Returns:
        (tempos, amplitudes [n_t, 2])
    """
    config = config or NUMERICS_CONFIG
    max_step = config.get("lz_max_step", 1e-3)
    span = cfg.t_end - cfg.t_start
    n_steps = max(1, math.ceil(span / max_step - 1e-9))
    h = span / n_steps

    half_grid = cfg.t_start + 0.5 * h * np.arange(2 * n_steps + 1)
    generator = _two_state_generator(cfg, half_grid, pair)
    a00, a01 = generator[:, 0, 0].tolist(), generator[:, 0, 1].tolist()
    a10, a11 = generator[:, 1, 0].tolist(), generator[:, 1, 1].tolist()

    c0, c1 = 1.0 + 0j, 0.0 + 0j
    history = np.empty((n_steps + 1, 2), dtype=complex)
    history[0] = (c0, c1)
    for n in range(n_steps):
        i, j, k = 2 * n, 2 * n + 1, 2 * n + 2
        k1_0 = a00[i] * c0 + a01[i] * c1
        k1_1 = a10[i] * c0 + a11[i] * c1
        y0, y1 = c0 + 0.5 * h * k1_0, c1 + 0.5 * h * k1_1
        k2_0 = a00[j] * y0 + a01[j] * y1
        k2_1 = a10[j] * y0 + a11[j] * y1
        y0, y1 = c0 + 0.5 * h * k2_0, c1 + 0.5 * h * k2_1
        k3_0 = a00[j] * y0 + a01[j] * y1
        k3_1 = a10[j] * y0 + a11[j] * y1
        y0, y1 = c0 + h * k3_0, c1 + h * k3_1
        k4_0 = a00[k] * y0 + a01[k] * y1
        k4_1 = a10[k] * y0 + a11[k] * y1
        c0 += h / 6.0 * (k1_0 + 2 * k2_0 + 2 * k3_0 + k4_0)
        c1 += h / 6.0 * (k1_1 + 2 * k2_1 + 2 * k3_1 + k4_1)
        history[n + 1] = (c0, c1)

    if not np.all(np.isfinite(history)):
        raise NumericalError(
            "Integração de Landau-Zener divergiu",
            {"step": h, "delta_plus": cfg.delta_plus, "delta_minus": cfg.delta_minus},
        )
    return half_grid[::2], history


def landau_zener_probability(cfg: SimulationConfig, config: dict = None) -> float:
    """Probabilidade |c_1|² de transição diabática |E_0⟩ -> |E_1⟩ ao fim da passagem."""
    times, amplitudes = landau_zener_evolution(cfg, config)
    probability = float(abs(amplitudes[-1, 1]) ** 2)
    logger.info(
        f"Landau-Zener: |c1|² = {probability:.4f} "
        f"(δ+={cfg.delta_plus}, δ-={cfg.delta_minus}, {len(times) - 1} passos)"
    )
    return probability
