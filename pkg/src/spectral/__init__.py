from .dark_states import (
    DarkState,
    analytic_dark_state,
    dark_state_components,
    dark_state_series,
    dark_state_weights,
    supported_manifolds,
)
from .spectrum import (
    AvoidedCrossing,
    Discontinuity,
    InstantaneousSpectrum,
    SpectrumTrack,
    crossings_frame,
    instantaneous_spectrum,
    scan_avoided_crossings,
    spectrum_series,
    track_levels,
)
from .landau_zener import landau_zener_evolution, landau_zener_probability

__all__ = [
    "DarkState",
    "analytic_dark_state",
    "dark_state_components",
    "dark_state_series",
    "dark_state_weights",
    "supported_manifolds",
    "AvoidedCrossing",
    "Discontinuity",
    "InstantaneousSpectrum",
    "SpectrumTrack",
    "crossings_frame",
    "instantaneous_spectrum",
    "scan_avoided_crossings",
    "spectrum_series",
    "track_levels",
    "landau_zener_evolution",
    "landau_zener_probability",
]
