"""
Testes do espectro instantâneo, estados escuros e Landau-Zener
===============================================================

Uso:
    pytest test_spectral.py
"""

import numpy as np
import pytest

from src.basis import GROUND
from src.exceptions import ConfigurationError, DomainError
from src.hamiltonian import PulseProfile, default_simulation_config, hamiltonian_parts
from src.spectral import (
    SpectrumTrack,
    analytic_dark_state,
    crossings_frame,
    dark_state_series,
    dark_state_weights,
    instantaneous_spectrum,
    landau_zener_probability,
    scan_avoided_crossings,
    spectrum_series,
    supported_manifolds,
    track_levels,
)

_SAMPLES = [(25.0, 50.0), (1.0, 1e-3), (1e-3, 1.0), (7.5, 7.5), (30.0, 2.0), (0.2, 40.0)]


def _interaction(cfg, basis, g, omega):
    parts = hamiltonian_parts(cfg, basis)
    return parts.detuning + g * parts.coupling + omega * parts.pump


@pytest.mark.parametrize("k", [0, 1, 2])
def test_f3_dark_states_are_annihilated(k, f3_scheme, wide_f3_basis):
    cfg = default_simulation_config(scheme=f3_scheme, n_max=wide_f3_basis.n_max)
    for g, omega in _SAMPLES:
        dark = analytic_dark_state(k, g, omega, f3_scheme)
        psi = dark.vector(wide_f3_basis)
        assert np.linalg.norm(psi) == pytest.approx(1.0)
        residual = _interaction(cfg, wide_f3_basis, g, omega) @ psi
        assert np.linalg.norm(residual) < 1e-10


def test_j2_dark_state_is_annihilated(j2_scheme):
    cfg = default_simulation_config(scheme=j2_scheme, n_max=3)
    basis = cfg.build_basis()
    for g, omega in _SAMPLES:
        psi = analytic_dark_state(0, g, omega, j2_scheme).vector(basis)
        assert np.linalg.norm(_interaction(cfg, basis, g, omega) @ psi) < 1e-10


@pytest.mark.parametrize("k", [0, 1, 2])
def test_dark_states_with_detuning(k, f3_scheme, wide_f3_basis):
    """Com δ ≠ 0, H|E_k⟩ não tem componente excitada e é igual a (δ+N+ + δ-N-)|E_k⟩."""
    cfg = default_simulation_config(scheme=f3_scheme, n_max=wide_f3_basis.n_max, delta_plus=0.5, delta_minus=0.3)
    lib = wide_f3_basis.operators
    psi = analytic_dark_state(k, 20.0, 35.0, f3_scheme).vector(wide_f3_basis)
    out = _interaction(cfg, wide_f3_basis, 20.0, 35.0) @ psi
    assert np.linalg.norm(out[wide_f3_basis.excited_mask]) < 1e-10
    expected = (0.5 * lib.number_plus + 0.3 * lib.number_minus) @ psi
    assert np.allclose(out, expected, atol=1e-10)


def test_dark_state_limits(f3_scheme):
    # Ω -> 0: E_0 concentra-se em |g-3, 0, 0⟩; g -> 0: em |g0, 0, 3⟩
    early = analytic_dark_state(0, 1.0, 1e-6, f3_scheme)
    late = analytic_dark_state(0, 1e-6, 1.0, f3_scheme)
    assert abs(early.amplitude((GROUND, -3, 0, 0))) == pytest.approx(1.0, abs=1e-9)
    assert abs(late.amplitude((GROUND, 0, 0, 3))) == pytest.approx(1.0, abs=1e-9)


def test_dark_state_weights_are_normalized(f3_scheme):
    g = np.linspace(1.0, 25.0, 11)
    omega = np.linspace(50.0, 0.5, 11)
    for k in supported_manifolds(f3_scheme):
        weights = dark_state_weights(k, f3_scheme, g, omega)
        total = sum(weights.values())
        assert np.allclose(total, 1.0)


def test_dark_state_derivative_matches_finite_difference(f3_scheme):
    g = np.array([10.0])
    omega = np.array([20.0])
    g_dot, omega_dot = np.array([1.5]), np.array([-2.0])
    h = 1e-6
    _, u, du = dark_state_series(1, f3_scheme, g, omega, g_dot, omega_dot)
    _, u_next, _ = dark_state_series(1, f3_scheme, g + h * g_dot, omega + h * omega_dot)
    _, u_prev, _ = dark_state_series(1, f3_scheme, g - h * g_dot, omega - h * omega_dot)
    assert np.allclose(du, (u_next - u_prev) / (2 * h), atol=1e-6)


def test_unsupported_dark_manifold(j2_scheme):
    assert supported_manifolds(j2_scheme) == (0,)
    with pytest.raises(DomainError):
        analytic_dark_state(1, 1.0, 1.0, j2_scheme)
    with pytest.raises(DomainError):
        dark_state_series(0, j2_scheme, [0.0], [0.0])


def test_single_polarization_spectrum(f3_scheme):
    cfg = default_simulation_config(scheme=f3_scheme, n_max=4, cavity_modes="minus")
    spectrum = instantaneous_spectrum(cfg, cfg.build_basis(), 20.0)
    assert len(spectrum.energies) == 7
    assert np.all(np.diff(spectrum.energies) > 1e-6)
    assert np.min(np.abs(spectrum.energies)) < 1e-9


def test_two_polarization_dark_degeneracy(f3_scheme):
    cfg = default_simulation_config(scheme=f3_scheme, n_max=4)
    spectrum = instantaneous_spectrum(cfg, cfg.build_basis(), 20.0)
    # E_0 e E_1 cabem no corte n_max = 4
    assert np.sum(np.abs(spectrum.energies) < 1e-8) >= 2
    assert np.allclose(spectrum.vectors.conj().T @ spectrum.vectors, np.eye(len(spectrum.energies)), atol=1e-10)


def test_track_levels_keeps_continuity(f3_scheme):
    cfg = default_simulation_config(scheme=f3_scheme, n_max=4, cavity_modes="minus")
    basis = cfg.build_basis()
    times = np.linspace(10.0, 30.0, 81)
    track = track_levels(spectrum_series(cfg, basis, times))
    assert track.energies.shape == (81, 7)

    start = np.zeros(basis.dimension)
    start[basis.index_of((GROUND, -3, 0, 0))] = 1.0
    reference = track.track_of_state(start)
    # o estado escuro segue em E = 0 durante toda a passagem
    assert np.max(np.abs(track.energies[:, reference])) < 1e-8

    frame = track.to_frame()
    assert list(frame.columns) == ["t", "track_id", "energy"]
    assert len(frame) == 81 * 7


def test_reference_track_skips_degenerate_instants():
    # em t0 o estado 0 está dividido entre as trilhas ((0 ± 1)/√2); depois fica inteiro na trilha 1
    mixed = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    swapped = np.array([[0.0, 1.0], [1.0, 0.0]])
    track = SpectrumTrack(
        times=np.array([0.0, 1.0, 2.0]),
        energies=np.zeros((3, 2)),
        vectors=[mixed, swapped, swapped],
        manifold=np.arange(2),
    )
    state = np.array([1.0, 0.0])
    assert track.track_of_state(state) == 1
    assert track.track_of_state(state, index=2) == 1
    # instante fixo e sem trilha dominante: a de maior peso (empate -> primeira)
    assert track.track_of_state(state, index=0) == 0

    ambiguous = SpectrumTrack(
        times=np.array([0.0]), energies=np.zeros((1, 2)), vectors=[mixed], manifold=np.arange(2),
    )
    assert ambiguous.track_of_state(np.array([0.0, 1.0])) == 0
    with pytest.raises(ConfigurationError):
        ambiguous.track_of_state(np.zeros(2))


def test_avoided_crossing_scan_on_synthetic_track():
    times = np.linspace(-1.0, 1.0, 21)
    gap = 0.1
    upper = np.sqrt(times**2 + gap**2 / 4)
    track = SpectrumTrack(
        times=times,
        energies=np.column_stack([-upper, upper]),
        vectors=[np.eye(2)] * len(times),
        manifold=np.arange(2),
    )
    crossings = scan_avoided_crossings(track, 0)
    assert len(crossings) == 1
    assert crossings[0].t == pytest.approx(0.0)
    assert crossings[0].gap == pytest.approx(gap)
    assert crossings[0].neighbor_track == 1
    assert list(crossings_frame(crossings).columns) == ["t", "gap", "neighbor_track"]


def test_landau_zener_static_couplings_do_not_mix(f3_scheme):
    constant = PulseProfile(amplitude=10.0, shape="constant")
    cfg = default_simulation_config(
        scheme=f3_scheme, cavity_pulse=constant, pump_pulse=constant, t_start=0.0, t_end=1.0,
    )
    assert landau_zener_probability(cfg) == pytest.approx(0.0, abs=1e-12)


def test_landau_zener_suppressed_by_detuning(f3_scheme):
    probabilities = [
        landau_zener_probability(default_simulation_config(scheme=f3_scheme, delta_plus=d, delta_minus=d))
        for d in (0.6, 0.8, 1.0, 1.2)
    ]
    assert np.all(np.diff(probabilities) < 0)
    assert probabilities[-1] < 0.05
