"""
Testes das trajetórias quânticas, do ensemble e da equação mestra
==================================================================

Uso:
    pytest test_dynamics.py

Cenários de decaimento livre (pulsos desligados) têm respostas exatas:
- um fóton decai como e^{-2κt}
- o GHZ de três fótons detectado nos analisadores rotacionados dá
  produto de sinais determinístico em cada trajetória aceita
"""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from src.basis import GROUND, LevelScheme
from src.correlations import PostSelectionRule, estimate_triple_correlation, photon_count_histogram
from src.dynamics import (
    JumpEvent,
    TrajectoryRecord,
    TrajectorySolver,
    detector_collapse_set,
    dissipator_sum,
    evolve_trajectory,
    make_generator,
    output_grid,
    run_ensemble,
    solve_master_equation,
    standard_collapse_set,
    trajectory_seed,
)
from src.exceptions import ConfigurationError
from src.hamiltonian import default_simulation_config, hamiltonian_parts, initial_vector

QUICK = {"grid_points": 31, "chunk_size": 25}


def _single_photon(make_decay_config, kappa=0.5, t_end=4.0):
    return make_decay_config(LevelScheme(1, 1), 2, (((GROUND, 0, 1, 0), 1.0),), kappa=kappa, t_end=t_end)


# =============================================================================
# CANAIS DE COLAPSO
# =============================================================================

def test_rate_operator_is_channel_independent(fock_config, f3_basis):
    cfg = fock_config.with_updates(kappa=0.3)
    expected = dissipator_sum(cfg, f3_basis)
    for collapse in (
        standard_collapse_set(cfg, f3_basis),
        detector_collapse_set(cfg, f3_basis, [0.0, 0.4, 1.3]),
    ):
        assert abs(collapse.rate_operator - expected).max() < 1e-12


def test_collapse_labels(fock_config, f3_basis):
    standard = standard_collapse_set(fock_config, f3_basis)
    assert standard.labels == ["cavity_plus", "cavity_minus", "spont_-1", "spont_0", "spont_+1"]
    detector = detector_collapse_set(fock_config, f3_basis, [0.0, 0.0])
    assert detector.labels[:4] == ["cav_1_x", "cav_1_y", "cav_2_x", "cav_2_y"]
    assert len(detector.cavity_channels) == 4
    with pytest.raises(ConfigurationError):
        detector_collapse_set(fock_config, f3_basis, [])


# =============================================================================
# SEMENTES
# =============================================================================

def test_trajectory_seed_is_deterministic():
    assert trajectory_seed(7, 3) == trajectory_seed(7, 3)
    assert trajectory_seed(7, 3) != trajectory_seed(7, 4)
    assert trajectory_seed(7, 3) != trajectory_seed(8, 3)
    first = make_generator(trajectory_seed(7, 3)).random(4)
    second = make_generator(trajectory_seed(7, 3)).random(4)
    assert np.array_equal(first, second)


def test_unknown_generator():
    with pytest.raises(ConfigurationError):
        make_generator(1, "NotAGenerator")
    with pytest.raises(ConfigurationError):
        make_generator(1, "Generator")


def test_output_grid_validation(fock_config):
    assert len(output_grid(fock_config, 11)) == 11
    with pytest.raises(ConfigurationError):
        output_grid(fock_config, 1)


# =============================================================================
# TRAJETÓRIAS
# =============================================================================

def test_single_photon_trajectory(make_decay_config):
    cfg = _single_photon(make_decay_config, t_end=40.0)
    basis = cfg.build_basis()
    collapse = standard_collapse_set(cfg, basis)
    record = evolve_trajectory(cfg, basis, collapse, seed=trajectory_seed(11, 0))
    # 80 tempos de vida: o fóton certamente saiu pelo modo σ+
    assert [e.channel for e in record.events] == ["cavity_plus"]
    assert 0 < record.events[0].t < 40.0
    assert abs(record.final_state[basis.index_of((GROUND, 0, 0, 0))]) == pytest.approx(1.0)


def test_trajectory_samples_are_normalized(fock_config):
    cfg = fock_config.with_updates(kappa=0.3)
    basis = cfg.build_basis()
    solver = TrajectorySolver(cfg, basis, standard_collapse_set(cfg, basis), grid=output_grid(cfg, 41))
    record, samples = solver.run(trajectory_seed(5, 1), index=1)
    assert samples.shape == (41, basis.dimension)
    assert np.allclose(samples.sum(axis=1), 1.0)
    times = record.jump_times()
    assert np.all(np.diff(times) > 0)
    assert np.linalg.norm(record.final_state) == pytest.approx(1.0)


def _sigma_minus_config(f3_scheme, **changes):
    values = dict(scheme=f3_scheme, n_max=2, cavity_modes="minus", delta_plus=0.6, delta_minus=0.6)
    values.update(changes)
    return default_simulation_config(**values)


def test_trajectory_evolves_on_reachable_subspace(f3_scheme):
    cfg = _sigma_minus_config(f3_scheme, kappa=0.2)
    basis = cfg.build_basis()
    solver = TrajectorySolver(cfg, basis, standard_collapse_set(cfg, basis), grid=output_grid(cfg, 21))
    # só σ- recebe fótons: nenhum estado com n+ > 0 é alcançável
    assert len(solver.manifold) < basis.dimension
    assert np.all(basis.n_plus[solver.manifold] == 0)
    assert solver.parts.coupling.shape == (len(solver.manifold),) * 2

    record, samples = solver.run(trajectory_seed(8, 0))
    outside = np.setdiff1d(np.arange(basis.dimension), solver.manifold)
    assert samples.shape == (21, basis.dimension)
    assert np.all(samples[:, outside] == 0.0)
    assert np.allclose(samples.sum(axis=1), 1.0)
    assert np.all(record.final_state[outside] == 0.0)
    assert np.linalg.norm(record.final_state) == pytest.approx(1.0)


def test_restricted_evolution_matches_full_basis(f3_scheme):
    # sem perdas H_eff é hermitiano: a trajetória é determinística e sem saltos
    cfg = _sigma_minus_config(f3_scheme, kappa=0.0, gamma=0.0)
    basis = cfg.build_basis()
    grid = output_grid(cfg, 9)
    record, samples = TrajectorySolver(cfg, basis, standard_collapse_set(cfg, basis), grid=grid).run(1)
    assert record.n_jumps == 0

    parts = hamiltonian_parts(cfg, basis)
    full = solve_ivp(
        lambda t, psi: -1j * parts.apply_h_eff(t, psi), (cfg.t_start, cfg.t_end),
        initial_vector(cfg, basis), t_eval=grid, rtol=1e-10, atol=1e-12,
    )
    assert np.allclose(samples, np.abs(full.y.T) ** 2, atol=1e-5)


def test_trajectory_reports_cutoff_population(make_decay_config):
    state = (((GROUND, 0, 1, 1), 1.0),)
    # n_max = 1: |g0, 1, 1⟩ está na camada de corte desde t = 0
    shell = make_decay_config(LevelScheme(1, 1), 1, state, kappa=0.5, t_end=4.0)
    record = evolve_trajectory(shell, shell.build_basis(), standard_collapse_set(shell, shell.build_basis()), seed=4)
    assert record.max_cutoff_population == pytest.approx(1.0)

    interior = make_decay_config(LevelScheme(1, 1), 2, state, kappa=0.5, t_end=4.0)
    basis = interior.build_basis()
    record = evolve_trajectory(interior, basis, standard_collapse_set(interior, basis), seed=4)
    assert record.max_cutoff_population < 1e-12


def test_record_to_dict(f3_basis):
    record = TrajectoryRecord(index=2, seed=99, events=[JumpEvent(1.5, "cavity_minus")])
    record.final_state = np.zeros(f3_basis.dimension, dtype=complex)
    record.final_state[f3_basis.index_of((GROUND, 0, 0, 3))] = 1.0
    record.flags["accepted"] = False
    data = record.to_dict(f3_basis)
    assert data["index"] == 2
    assert data["seed"] == 99
    assert data["events"] == [{"t": 1.5, "channel": "cavity_minus"}]
    assert data["final_probs"] == {"g0_0_3": 1.0}
    assert data["flags"] == {"accepted": False}
    assert "atom_outcomes" not in data


# =============================================================================
# ENSEMBLE
# =============================================================================

def test_ensemble_is_independent_of_jobs(make_decay_config):
    cfg = _single_photon(make_decay_config)
    basis = cfg.build_basis()
    collapse = standard_collapse_set(cfg, basis)
    kwargs = dict(n_traj=60, base_seed=3, config=QUICK, show_progress=False)
    serial = run_ensemble(cfg, basis, collapse, jobs=1, **kwargs)
    parallel = run_ensemble(cfg, basis, collapse, jobs=2, **kwargs)
    assert np.array_equal(serial.occupations, parallel.occupations)
    assert np.array_equal(serial.occupations_stderr, parallel.occupations_stderr)
    assert [r.jump_times().tolist() for r in serial.records] == [r.jump_times().tolist() for r in parallel.records]
    assert [r.index for r in serial.records] == list(range(60))


def test_ensemble_occupations_sum_to_one(fock_config):
    cfg = fock_config.with_updates(kappa=0.2)
    basis = cfg.build_basis()
    result = run_ensemble(
        cfg, basis, standard_collapse_set(cfg, basis), n_traj=10, base_seed=1, jobs=1,
        config=QUICK, show_progress=False,
    )
    assert np.allclose(result.occupations.sum(axis=1), 1.0)
    assert np.allclose(result.atomic_populations.sum(axis=1), 1.0)
    assert np.allclose(result.photon_minus.sum(axis=1), 1.0)
    frame = result.occupation_frame()
    assert frame.columns[0] == "t"
    assert len(frame) == QUICK["grid_points"]
    assert list(result.jump_count_frame().columns) == ["channel", "mean", "std", "total"]


def test_ensemble_validation(make_decay_config):
    cfg = _single_photon(make_decay_config)
    basis = cfg.build_basis()
    collapse = standard_collapse_set(cfg, basis)
    with pytest.raises(ConfigurationError):
        run_ensemble(cfg, basis, collapse, n_traj=0, jobs=1, show_progress=False)
    with pytest.raises(ConfigurationError):
        run_ensemble(cfg, basis, collapse, n_traj=2, jobs=0, show_progress=False)


def test_single_photon_decay_matches_exponential(make_decay_config):
    cfg = _single_photon(make_decay_config, kappa=0.5, t_end=4.0)
    basis = cfg.build_basis()
    collapse = standard_collapse_set(cfg, basis)
    result = run_ensemble(cfg, basis, collapse, n_traj=400, base_seed=17, jobs=1, config=QUICK, show_progress=False)
    i = basis.index_of((GROUND, 0, 1, 0))
    expected = np.exp(-2 * 0.5 * result.times)
    stderr = np.maximum(result.occupations_stderr[:, i], 1e-3)
    assert np.all(np.abs(result.occupations[:, i] - expected) < 5 * stderr)


# =============================================================================
# EQUAÇÃO MESTRA
# =============================================================================

def test_master_equation_single_photon_decay(make_decay_config):
    cfg = _single_photon(make_decay_config, kappa=0.5, t_end=4.0)
    basis = cfg.build_basis()
    times = np.linspace(0.0, 4.0, 9)
    result = solve_master_equation(cfg, basis, standard_collapse_set(cfg, basis), times=times)
    assert np.allclose(result.occupations[:, basis.index_of((GROUND, 0, 1, 0))], np.exp(-times), atol=1e-6)
    assert np.allclose(result.occupations[:, basis.index_of((GROUND, 0, 0, 0))], 1 - np.exp(-times), atol=1e-6)
    assert result.max_trace_drift < 1e-6


def test_master_equation_agrees_for_both_channel_sets(j2_scheme):
    """Os canais rotacionados são uma mistura unitária dos modos: mesma equação mestra."""
    cfg = default_simulation_config(scheme=j2_scheme, n_max=2, kappa=0.2, delta_plus=0.3, delta_minus=0.3)
    basis = cfg.build_basis()
    times = np.linspace(cfg.t_start, cfg.t_end, 5)
    standard = solve_master_equation(cfg, basis, standard_collapse_set(cfg, basis), times=times)
    detector = solve_master_equation(cfg, basis, detector_collapse_set(cfg, basis, [0.0, 0.7]), times=times)
    assert np.allclose(standard.occupations, detector.occupations, atol=1e-6)
    assert np.allclose(standard.occupations.sum(axis=1), 1.0, atol=1e-6)


def test_master_equation_mirror_symmetry(j2_scheme):
    """Com δ+ = δ-, partir de |g_m⟩ ou de |g_-m⟩ dá ocupações espelhadas P(x_m, a, b) = P(x_-m, b, a)."""
    base = dict(scheme=j2_scheme, n_max=2, kappa=0.2, delta_plus=0.3, delta_minus=0.3)
    left = default_simulation_config(initial_state=(((GROUND, -1, 0, 0), 1.0),), **base)
    right = default_simulation_config(initial_state=(((GROUND, 1, 0, 0), 1.0),), **base)
    basis = left.build_basis()
    times = np.linspace(left.t_start, left.t_end, 5)
    occupations = [
        solve_master_equation(cfg, basis, standard_collapse_set(cfg, basis), times=times).occupations
        for cfg in (left, right)
    ]
    mirror = [basis.index_of((level, -m, b, a)) for level, m, a, b in basis.states]
    assert np.allclose(occupations[1], occupations[0][:, mirror], atol=1e-7)
    # o espelhamento não é trivial: há população fora de |g∓1, 0, 0⟩
    assert occupations[0][-1, basis.index_of((GROUND, -1, 0, 0))] < 0.99


def test_master_equation_rejects_bad_grid(make_decay_config):
    cfg = _single_photon(make_decay_config)
    basis = cfg.build_basis()
    collapse = standard_collapse_set(cfg, basis)
    with pytest.raises(ConfigurationError):
        solve_master_equation(cfg, basis, collapse, times=[2.0, 1.0])
    with pytest.raises(ConfigurationError):
        solve_master_equation(cfg, basis, collapse, config={"max_dense_dimension": 1})


# =============================================================================
# GHZ EM DECAIMENTO LIVRE
# =============================================================================

def _ghz_records(cfg, angles):
    basis = cfg.build_basis()
    collapse = detector_collapse_set(cfg, basis, angles)
    result = run_ensemble(cfg, basis, collapse, n_traj=60, base_seed=2024, jobs=1, config=QUICK, show_progress=False)
    return result.records


def test_free_ghz_decay_is_perfectly_correlated(ghz_decay_config):
    records = _ghz_records(ghz_decay_config, [0.0, 0.0, 0.0])
    assert photon_count_histogram(records) == {3: 1.0}
    estimate = estimate_triple_correlation(records, PostSelectionRule(required_count=3))
    assert estimate.n_accepted > 0
    assert estimate.mean == 1.0
    assert estimate.stderr == 0.0


def test_free_ghz_decay_anticorrelated_at_pi(ghz_decay_config):
    third = math.pi / 3
    records = _ghz_records(ghz_decay_config, [third, third, third])
    estimate = estimate_triple_correlation(records, PostSelectionRule(required_count=3))
    assert estimate.n_accepted > 0
    assert estimate.mean == -1.0
