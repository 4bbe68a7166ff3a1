"""
Correlações GHZ: observáveis, referências analíticas e estimadores.
"""

from .estimators import (
    AnalyzerConfig,
    AtomOutcome,
    CorrelationEstimate,
    PostSelectionRule,
    atom_measurement,
    cavity_events,
    estimate_atom_photon_correlation,
    estimate_triple_correlation,
    photon_count_histogram,
    routing_acceptance_fraction,
)
from .observables import (
    POLARIZATION_SIGN,
    STANDARD_CAVITY_LABELS,
    analyzer_operator,
    angular_momentum_ladder,
    atom_photon_ghz_vector,
    atomic_analyzer_operator,
    detector_label,
    embed_ground_operator,
    ghz_expectation,
    ghz_state_vector,
    is_cavity_channel,
    parity_operator,
    parity_projectors,
    parse_detector_label,
    rotated_mode_operators,
    spin_operators,
)

__all__ = [
    "AnalyzerConfig",
    "AtomOutcome",
    "CorrelationEstimate",
    "PostSelectionRule",
    "atom_measurement",
    "cavity_events",
    "estimate_atom_photon_correlation",
    "estimate_triple_correlation",
    "photon_count_histogram",
    "routing_acceptance_fraction",
    "POLARIZATION_SIGN",
    "STANDARD_CAVITY_LABELS",
    "analyzer_operator",
    "angular_momentum_ladder",
    "atom_photon_ghz_vector",
    "atomic_analyzer_operator",
    "detector_label",
    "embed_ground_operator",
    "ghz_expectation",
    "ghz_state_vector",
    "is_cavity_channel",
    "parity_operator",
    "parity_projectors",
    "parse_detector_label",
    "rotated_mode_operators",
    "spin_operators",
]
