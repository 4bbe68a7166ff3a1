"""
Fixtures compartilhadas dos testes.

Cortes de fótons pequenos e janelas curtas para que a suíte padrão rode
em poucos segundos; os cenários completos ficam em test_acceptance.py.
"""

import numpy as np
import pytest

from src.basis import GROUND, LevelScheme, enumerate_basis
from src.hamiltonian import PulseProfile, SimulationConfig, default_simulation_config


@pytest.fixture(scope="session")
def f3_scheme():
    return LevelScheme(3, 3)


@pytest.fixture(scope="session")
def j2_scheme():
    return LevelScheme(2, 1)


@pytest.fixture(scope="session")
def f3_basis(f3_scheme):
    return enumerate_basis(f3_scheme, 4)


@pytest.fixture(scope="session")
def wide_f3_basis(f3_scheme):
    # E_2 tem componentes com até 5 fótons em um modo
    return enumerate_basis(f3_scheme, 6)


@pytest.fixture
def fock_config(f3_scheme):
    """Parâmetros da síntese do estado de Fock de três fótons (δ = 0.6)."""
    return default_simulation_config(scheme=f3_scheme, n_max=4, delta_plus=0.6, delta_minus=0.6)


def free_decay_config(scheme: LevelScheme, n_max: int, initial_state, kappa: float, t_end: float) -> SimulationConfig:
    """Pulsos desligados: só o decaimento da cavidade atua."""
    off = PulseProfile(amplitude=0.0, shape="constant")
    return SimulationConfig(
        scheme=scheme,
        n_max=n_max,
        cavity_pulse=off,
        pump_pulse=off,
        kappa=kappa,
        gamma=1.0,
        t_start=0.0,
        t_end=t_end,
        initial_state=initial_state,
    )


@pytest.fixture
def ghz_decay_config():
    """(|g0, 3, 0⟩ + |g0, 0, 3⟩)/√2 decaindo livremente pela cavidade."""
    amplitude = 1.0 / np.sqrt(2.0)
    return free_decay_config(
        LevelScheme(1, 1),
        3,
        (((GROUND, 0, 3, 0), amplitude), ((GROUND, 0, 0, 3), amplitude)),
        kappa=1.0,
        t_end=15.0,
    )


@pytest.fixture
def make_decay_config():
    return free_decay_config
