"""
Cenários completos de aceitação
===============================

Uso:
    pytest -m acceptance test_acceptance.py

Execuções longas (minutos a dezenas de minutos) com os presets de
presets/. Ficam fora da suíte padrão (ver pytest.ini).
"""

import math

import numpy as np
import pandas as pd
import pytest

from src.basis import GROUND
from src.config import NUMERICS_CONFIG
from src.correlations import routing_acceptance_fraction
from src.dynamics import (
    JumpEvent,
    TrajectoryRecord,
    run_ensemble,
    solve_master_equation,
    standard_collapse_set,
)
from src.experiments import parse_experiment, run_experiment, sweep_detuning
from src.experiments.runner import RunOptions
from src.hamiltonian import pulse_value
from src.spectral import landau_zener_probability

pytestmark = pytest.mark.acceptance

OPTIONS = RunOptions(jobs=None, show_progress=False)
EPSILON = NUMERICS_CONFIG["trace_tolerance"]


def _final_state(preset: str):
    spec = parse_experiment(f'preset = "{preset}"')
    cfg = spec.simulation_config()
    basis = cfg.build_basis()
    result = solve_master_equation(cfg, basis, standard_collapse_set(cfg, basis), times=[cfg.t_start, cfg.t_end])
    return result


def _final_population(preset: str, label: str = "g0_0_3") -> float:
    return _final_state(preset).final_probability(label)


def _ensemble(preset: str, grid_points: int = 41):
    spec = parse_experiment(f'preset = "{preset}"')
    cfg = spec.simulation_config()
    basis = cfg.build_basis()
    collapse = standard_collapse_set(cfg, basis)
    result = run_ensemble(
        cfg, basis, collapse,
        n_traj=spec.ensemble.n_traj, base_seed=spec.ensemble.base_seed,
        config={"grid_points": grid_points}, show_progress=False,
    )
    return cfg, basis, collapse, result


def _sampling_error(mean: np.ndarray, stderr: np.ndarray, n_traj: int) -> np.ndarray:
    # sem variação observada, usa o erro binomial da média
    floor = np.sqrt(np.clip(mean * (1.0 - mean), 0.0, None) / n_traj)
    return np.where(stderr > 0, stderr, floor)


# =============================================================================
# ESPECTRO
# =============================================================================

def test_landau_zener_probability():
    cfg = parse_experiment('preset = "landau-zener"').simulation_config()
    assert landau_zener_probability(cfg) == pytest.approx(0.22, abs=0.02)


def test_detuned_dark_manifold_energetics(tmp_path):
    spec = parse_experiment('preset = "spectrum-detuned"', overrides={"spectrum": {"refine": False}})
    delta = spec.physics.delta_plus
    manifest = run_experiment(spec, tmp_path / "spectrum", OPTIONS)
    frame = pd.read_csv(tmp_path / "spectrum.csv")
    energies = frame.pivot(index="t", columns="track_id", values="energy").to_numpy()
    reference = manifest.results["reference_track"]

    middle = energies[len(energies) // 2]
    spacing = np.min(np.abs(np.delete(middle, reference) - middle[reference]))
    assert spacing == pytest.approx(2 * delta, rel=0.10)

    rise = energies[-1, reference] - energies[0, reference]
    assert rise == pytest.approx(3 * delta, rel=0.05)


def test_detuned_avoided_crossings(tmp_path):
    spec = parse_experiment('preset = "spectrum-detuned"')
    cfg = spec.simulation_config()
    run_experiment(spec, tmp_path / "spectrum", OPTIONS)
    crossings = pd.read_csv(tmp_path / "spectrum.crossings.csv").sort_values("t")
    assert len(crossings) > 0
    assert 3.5e-4 / 2 <= crossings["gap"].iloc[0] <= 3.5e-4 * 2

    # instante de entrada em que Ω(t) = 4|δ|
    pump = cfg.pump_pulse
    half_width = pump.fwhm * math.sqrt(math.log(pump.amplitude / (4 * abs(cfg.delta_plus))) / (4 * math.log(2)))
    t_star = pump.center - half_width
    assert pulse_value(pump, t_star) == pytest.approx(4 * abs(cfg.delta_plus))
    assert np.any(np.abs(crossings["t"] - t_star) <= 0.02 * t_star)


# =============================================================================
# ESTADOS DE FOCK
# =============================================================================

def test_fock_state_with_detuning():
    assert _final_population("fock-detuned") >= 0.98


def test_fock_state_strong_coupling():
    assert _final_population("fock-strong") >= 0.99


def test_resonant_fock_state_leaks_to_higher_photon_numbers():
    result = _final_state("fock-resonant")
    assert result.max_cutoff_population < 5e-3
    assert 0.6 < result.final_probability("g0_0_3") < 0.9
    assert result.final_probability("g0_1_4") > 1e-3
    assert result.final_probability("g0_2_5") > 1e-3
    assert result.final_probability("g0_1_4") > result.final_probability("g0_2_5")


def test_detuning_sweep_shape():
    values = [0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.2]
    spec = parse_experiment('preset = "detuning-sweep"', overrides={"sweep": {"values": values}})
    frame = sweep_detuning(spec, OPTIONS)
    probability = dict(zip(frame["delta"], frame["probability"]))

    assert probability[0.4] < probability[0.5] < probability[0.6]
    peak = float(frame.loc[frame["probability"].idxmax(), "delta"])
    assert 0.5 <= peak <= 0.7
    tail = frame[frame["delta"] >= 0.8]["probability"].to_numpy()
    assert np.all(np.diff(tail) < 0)


# =============================================================================
# GHZ E TRAJETÓRIAS
# =============================================================================

def test_ghz_preparation():
    _, basis, _, result = _ensemble("ghz-lossless")
    plus = basis.index_of((GROUND, 0, 3, 0))
    minus = basis.index_of((GROUND, 0, 0, 3))
    # projeção sobre (|3,0⟩ + |0,3⟩)/√2
    fidelities = [
        abs((r.final_state[plus] + r.final_state[minus]) / math.sqrt(2)) ** 2 for r in result.records
    ]
    assert np.mean(fidelities) == pytest.approx(0.99, abs=0.01)


def test_lossy_cavity_keeps_atomic_dynamics():
    _, _, _, lossy = _ensemble("ghz-lossy")
    _, _, _, lossless = _ensemble("ghz-lossless")

    single_photon = np.maximum(lossy.photon_plus[:, 1], lossy.photon_minus[:, 1])
    assert single_photon.max() <= 0.27

    assert lossy.atomic_labels == lossless.atomic_labels
    combined = np.sqrt(
        _sampling_error(lossy.atomic_populations, lossy.atomic_stderr, lossy.n_traj) ** 2
        + _sampling_error(lossless.atomic_populations, lossless.atomic_stderr, lossless.n_traj) ** 2
    )
    difference = np.abs(lossy.atomic_populations - lossless.atomic_populations)
    assert np.all(difference <= 3 * combined + EPSILON)


def test_ensemble_agrees_with_master_equation():
    cfg, basis, collapse, ensemble = _ensemble("ghz-lossy")
    master = solve_master_equation(cfg, basis, collapse, times=ensemble.times)
    error = _sampling_error(master.occupations, ensemble.occupations_stderr, ensemble.n_traj)
    difference = np.abs(ensemble.occupations - master.occupations)
    assert np.all(difference <= 3 * error + EPSILON)

    # estado inicial simétrico: P(g_m, a, b) = P(g_-m, b, a)
    mirror = [basis.index[(level, -m, n_minus, n_plus)] for level, m, n_plus, n_minus in basis.states]
    assert np.allclose(master.occupations, master.occupations[:, mirror], atol=EPSILON)


def test_triple_correlations(tmp_path):
    spec = parse_experiment('preset = "ghz-correlations"')
    run_experiment(spec, tmp_path / "ghz", OPTIONS)
    frame = pd.read_csv(tmp_path / "ghz.csv")
    assert len(frame) == 13
    for _, row in frame.iterrows():
        expected = math.cos(3 * row["phi_1"])
        assert row["expected"] == pytest.approx(expected, abs=1e-12)
        assert abs(row["mean"] - expected) <= max(3 * row["stderr"], 0.05)
    # Σφ = 0 e Σφ = π: cada trajetória aceita tem o sinal do cosseno
    assert frame["mean"].iloc[0] == 1.0
    assert frame["phi_sum"].iloc[6] == pytest.approx(math.pi)
    assert frame["mean"].iloc[6] == -1.0


def test_photon_statistics(tmp_path):
    spec = parse_experiment('preset = "photon-statistics"')
    run_experiment(spec, tmp_path / "counts", OPTIONS)
    summary = pd.read_csv(tmp_path / "counts.summary.csv")
    assert list(summary["mode"]) == [3, 3, 3, 3]
    excess = summary["p_more_than_required"].to_numpy()
    assert np.all(np.diff(excess) > 0)


def test_atom_photon_correlation(tmp_path):
    spec = parse_experiment('preset = "atom-photon"')
    run_experiment(spec, tmp_path / "atom", OPTIONS)
    frame = pd.read_csv(tmp_path / "atom.csv")
    assert len(frame) == 13
    for _, row in frame.iterrows():
        assert abs(row["mean"] - row["cos_theta"]) <= max(3 * row["stderr"], 0.05)


def test_routing_fraction_ideal_records():
    records = [
        TrajectoryRecord(i, i, [JumpEvent(float(k), "cavity_minus") for k in (1, 2, 3)])
        for i in range(100)
    ]
    assert routing_acceptance_fraction(records, (2 / 3, 1 / 3)) == pytest.approx(0.444, abs=0.01)
