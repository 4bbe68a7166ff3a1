"""
Perfis Temporais dos Pulsos
===========================

O movimento do átomo através da cavidade e do feixe de bombeio é
representado apenas pelos perfis g(t) e Ω(t).

Formas suportadas:
- gaussian: amplitude * exp(-4 ln2 (t - center)² / fwhm²)
- constant: amplitude (átomo estacionário)
"""

from dataclasses import asdict, dataclass
from typing import Union

import numpy as np

from ..config import GAUSSIAN_FWHM_FACTOR
from ..exceptions import ConfigurationError

PULSE_SHAPES = ("gaussian", "constant")

TimeLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class PulseProfile:
    """
    Perfil de um pulso.

    Attributes:
        amplitude: Valor de pico (Γ)
        center: Centro do pulso (Γ⁻¹)
        fwhm: Largura total a meia altura (Γ⁻¹)
        shape: "gaussian" ou "constant"
    """
    amplitude: float
    center: float = 0.0
    fwhm: float = 1.0
    shape: str = "gaussian"

    def __post_init__(self):
        if not np.isfinite(self.amplitude) or self.amplitude < 0:
            raise ConfigurationError(
                f"Amplitude do pulso deve ser >= 0 (recebido {self.amplitude})",
                {"amplitude": self.amplitude},
            )
        if not np.isfinite(self.fwhm) or self.fwhm <= 0:
            raise ConfigurationError(
                f"FWHM deve ser > 0 (recebido {self.fwhm})", {"fwhm": self.fwhm}
            )
        if not np.isfinite(self.center):
            raise ConfigurationError("Centro do pulso deve ser finito", {"center": self.center})
        if self.shape not in PULSE_SHAPES:
            raise ConfigurationError(
                f"Forma de pulso desconhecida: {self.shape!r}. Use {PULSE_SHAPES}",
                {"shape": self.shape},
            )

    def to_dict(self) -> dict:
        return asdict(self)


def pulse_value(profile: PulseProfile, t: TimeLike) -> TimeLike:
    """Valor do pulso em t (aceita escalar ou array)."""
    if profile.shape == "constant":
        return profile.amplitude * np.ones_like(t, dtype=float) if np.ndim(t) else float(profile.amplitude)
    x = (np.asarray(t, dtype=float) - profile.center) / profile.fwhm
    value = profile.amplitude * np.exp(-GAUSSIAN_FWHM_FACTOR * x * x)
    return value if np.ndim(t) else float(value)


def pulse_derivative(profile: PulseProfile, t: TimeLike) -> TimeLike:
    """Derivada temporal analítica do pulso."""
    if profile.shape == "constant":
        return np.zeros_like(t, dtype=float) if np.ndim(t) else 0.0
    dt = np.asarray(t, dtype=float) - profile.center
    derivative = -2.0 * GAUSSIAN_FWHM_FACTOR * dt / profile.fwhm**2 * pulse_value(profile, t)
    return derivative if np.ndim(t) else float(derivative)
