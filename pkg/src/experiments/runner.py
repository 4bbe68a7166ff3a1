"""
Orquestração de Experimentos
============================

run_experiment despacha a especificação para o módulo correspondente,
escreve as tabelas CSV, os registros JSONL e, por último, o manifesto.

Arquivos gerados (prefixo P):
- P.csv               tabela principal do experimento
- P.<papel>.csv       tabelas auxiliares (erros padrão, marginais, cruzamentos)
- P.jsonl             registros de saltos (experimentos com trajetórias)
- P.manifest.json     manifesto da execução (sempre escrito, mesmo em falha)
"""

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from .. import __version__
from ..basis import SystemBasis, format_state
from ..config import ENSEMBLE_CONFIG, NUMERICS_CONFIG, OUTPUT_CONFIG
from ..correlations import (
    estimate_atom_photon_correlation,
    estimate_triple_correlation,
    ghz_expectation,
    photon_count_histogram,
    routing_acceptance_fraction,
)
from ..dynamics import (
    CollapseSet,
    EnsembleResult,
    TrajectoryRecord,
    TrajectorySolver,
    detector_collapse_set,
    output_grid,
    run_ensemble,
    solve_master_equation,
    standard_collapse_set,
    trajectory_seed,
)
from ..exceptions import ConfigurationError, SimulationError
from ..hamiltonian import SimulationConfig, pulse_value
from ..spectral import (
    crossings_frame,
    dark_state_weights,
    landau_zener_evolution,
    scan_avoided_crossings,
    spectrum_series,
    track_levels,
)
from .spec import ExperimentSpec, apply_sweep_value
from .writers import write_json, write_jsonl, write_table

logger = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_FAILED = "failed"
# execução concluída, mas com população na camada n = n_max acima do limiar
STATUS_CUTOFF_LEAKAGE = "cutoff_leakage"

# limiar para listar estados nos resultados resumidos
_SUMMARY_POPULATION = 1e-3


@dataclass
class OutputFile:
    path: str
    role: str
    sha256: str


@dataclass
class RunManifest:
    """
    Manifesto de uma execução.

    Attributes:
        artifact_version: Versão do formato dos artefatos
        software_version: Versão do pacote
        kind: Tipo do experimento
        rng_algorithm: Gerador de bits usado pelas trajetórias
        config: Eco da especificação resolvida (reprocessável)
        duration_seconds: Tempo de parede da execução
        outputs: Arquivos escritos com seus digests sha256
        status: "ok", "cutoff_leakage" ou "failed"
        error: Erro serializado quando status = "failed"
        results: Escalares e resumos do experimento
        warnings: Avisos numéricos (vazamento pelo corte de fótons)
    """
    artifact_version: str
    software_version: str
    kind: str
    rng_algorithm: str
    config: dict
    duration_seconds: float = 0.0
    outputs: List[OutputFile] = field(default_factory=list)
    status: str = STATUS_OK
    error: Optional[dict] = None
    results: dict = field(default_factory=dict)
    warnings: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


class _Artifacts:
    """Escreve os arquivos de uma execução sob um prefixo comum."""

    def __init__(self, prefix: Path):
        self.prefix = Path(prefix)
        self.outputs: List[OutputFile] = []
        self.warnings: List[dict] = []

    def path(self, role: Optional[str], suffix: str) -> Path:
        name = self.prefix.name + (f".{role}" if role else "") + suffix
        return self.prefix.with_name(name)

    def table(self, frame: pd.DataFrame, role: Optional[str] = None) -> None:
        path = self.path(role, OUTPUT_CONFIG["table_suffix"])
        self.outputs.append(OutputFile(str(path), role or "table", write_table(path, frame)))
        logger.info(f"Tabela escrita: {path} ({len(frame)} linhas)")

    def records(self, rows: Sequence[dict]) -> None:
        path = self.path(None, OUTPUT_CONFIG["records_suffix"])
        self.outputs.append(OutputFile(str(path), "records", write_jsonl(path, rows)))
        logger.info(f"Registros escritos: {path} ({len(rows)} trajetórias)")

    def check_cutoff(self, population: float, **context) -> float:
        """Registra um aviso quando a camada n = n_max passa do limiar."""
        threshold = NUMERICS_CONFIG["leakage_threshold"]
        if population > threshold:
            self.warnings.append({
                "type": "cutoff_leakage",
                "max_cutoff_population": float(population),
                "threshold": threshold,
                **context,
            })
            logger.warning(f"Vazamento pelo corte: {population:.3e} > {threshold:.0e} {context or ''}")
        return float(population)

    @property
    def manifest_path(self) -> Path:
        return self.path(None, OUTPUT_CONFIG["manifest_suffix"])


@dataclass
class RunOptions:
    """Opções de execução que não fazem parte da física (não entram no eco)."""
    jobs: Optional[int] = None
    show_progress: bool = True


# =============================================================================
# AUXILIARES
# =============================================================================

def _state_index(basis: SystemBasis, label: str) -> int:
    try:
        return basis.labels.index(label)
    except ValueError:
        raise ConfigurationError(
            f"Estado {label!r} não pertence à base (n_max={basis.n_max}, {basis.scheme.label()})",
            {"state": label},
        ) from None


def _collapse_for(spec: ExperimentSpec, cfg: SimulationConfig, basis: SystemBasis, angles=None) -> CollapseSet:
    if angles is not None or spec.ensemble.collapse == "detector":
        return detector_collapse_set(cfg, basis, spec.analyzer.angles if angles is None else angles)
    return standard_collapse_set(cfg, basis)


def _ensemble(spec: ExperimentSpec, cfg: SimulationConfig, basis: SystemBasis, collapse: CollapseSet, options: RunOptions) -> EnsembleResult:
    return run_ensemble(
        cfg,
        basis,
        collapse,
        n_traj=spec.ensemble.n_traj,
        base_seed=spec.ensemble.base_seed,
        jobs=options.jobs,
        config={"grid_points": spec.ensemble.grid_points, "show_progress": options.show_progress},
    )


def _final_states(labels: Sequence[str], final: np.ndarray, stderr: Optional[np.ndarray] = None) -> Dict[str, dict]:
    summary = {}
    for i in np.argsort(-final):
        if final[i] < _SUMMARY_POPULATION:
            break
        entry = {"probability": float(final[i])}
        if stderr is not None:
            entry["stderr"] = float(stderr[i])
        summary[labels[i]] = entry
    return summary


def _record_rows(records: Sequence[TrajectoryRecord], basis: SystemBasis, **extra) -> List[dict]:
    return [{**extra, **record.to_dict(basis)} for record in records]


def _attach_sweep_value(error: SimulationError, parameter: str, value: float) -> SimulationError:
    error.context[parameter] = value
    error.args = (f"{parameter}={value!r}: {error}",) + error.args[1:]
    return error


# =============================================================================
# EXPERIMENTOS
# =============================================================================

def _run_spectrum(spec: ExperimentSpec, artifacts: _Artifacts, options: RunOptions) -> dict:
    cfg = spec.simulation_config()
    basis = cfg.build_basis()
    section = spec.spectrum
    start = cfg.t_start if section.start is None else section.start
    stop = cfg.t_end if section.stop is None else section.stop
    times = np.linspace(start, stop, section.points)

    track = track_levels(spectrum_series(cfg, basis, times))
    artifacts.table(track.to_frame())

    reference_label = section.reference_state or format_state(cfg.initial_state[0][0])
    reference_vector = np.zeros(basis.dimension)
    reference_vector[_state_index(basis, reference_label)] = 1.0
    reference = track.track_of_state(reference_vector)
    crossings = scan_avoided_crossings(
        track,
        reference,
        cfg if section.refine else None,
        basis if section.refine else None,
    )
    artifacts.table(crossings_frame(crossings), "crossings")

    middle = track.energies[len(times) // 2]
    return {
        "n_levels": track.n_tracks,
        "manifold_dimension": len(track.manifold),
        "reference_state": reference_label,
        "reference_track": reference,
        "zero_energy_multiplicity_mid": int(np.sum(np.abs(middle) < 1e-8)),
        "n_crossings": len(crossings),
        "min_gap": min((c.gap for c in crossings), default=None),
        "discontinuities": [asdict(d) for d in track.discontinuities],
    }


def _run_dark_states(spec: ExperimentSpec, artifacts: _Artifacts, options: RunOptions) -> dict:
    cfg = spec.simulation_config()
    times = np.linspace(cfg.t_start, cfg.t_end, spec.dark_states.points)
    g = pulse_value(cfg.cavity_pulse, times)
    omega = pulse_value(cfg.pump_pulse, times)

    data = {"t": times, "g": g, "omega": omega}
    for k in spec.dark_states.manifolds:
        for label, weights in dark_state_weights(k, cfg.scheme, g, omega).items():
            data[f"E{k}:{label}"] = weights
    artifacts.table(pd.DataFrame(data))
    return {"manifolds": list(spec.dark_states.manifolds), "points": len(times)}


def _run_landau_zener(spec: ExperimentSpec, artifacts: _Artifacts, options: RunOptions) -> dict:
    cfg = spec.simulation_config()
    times, amplitudes = landau_zener_evolution(cfg)
    # a malha do RK4 é fina; a tabela usa a grade de saída
    keep = np.unique(np.linspace(0, len(times) - 1, spec.ensemble.grid_points).round().astype(int))
    populations = np.abs(amplitudes[keep]) ** 2
    artifacts.table(pd.DataFrame({"t": times[keep], "p_E0": populations[:, 0], "p_E1": populations[:, 1]}))
    probability = float(abs(amplitudes[-1, 1]) ** 2)
    return {"transition_probability": probability, "steps": len(times) - 1}


def _run_trajectory(spec: ExperimentSpec, artifacts: _Artifacts, options: RunOptions) -> dict:
    cfg = spec.simulation_config()
    basis = cfg.build_basis()
    collapse = _collapse_for(spec, cfg, basis)
    grid = output_grid(cfg, spec.ensemble.grid_points)
    seed = trajectory_seed(spec.ensemble.base_seed, 0)
    record, samples = TrajectorySolver(cfg, basis, collapse, grid=grid).run(seed, 0)

    keep = np.flatnonzero(samples.max(axis=0) > OUTPUT_CONFIG["min_output_population"])
    frame = pd.DataFrame(samples[:, keep], columns=[basis.labels[i] for i in keep])
    frame.insert(0, "t", grid)
    artifacts.table(frame)
    artifacts.records([record.to_dict(basis)])
    return {
        "seed": seed,
        "n_jumps": record.n_jumps,
        "channel_counts": dict(record.channel_counts()),
        "final_states": _final_states(basis.labels, np.abs(record.final_state) ** 2),
        "max_cutoff_population": artifacts.check_cutoff(record.max_cutoff_population),
    }


def _run_ensemble(spec: ExperimentSpec, artifacts: _Artifacts, options: RunOptions) -> dict:
    cfg = spec.simulation_config()
    basis = cfg.build_basis()
    result = _ensemble(spec, cfg, basis, _collapse_for(spec, cfg, basis), options)

    artifacts.table(result.occupation_frame())
    artifacts.table(result.stderr_frame(), "stderr")
    artifacts.table(result.atomic_frame(), "atomic")
    artifacts.table(result.photon_frame(), "photons")
    artifacts.table(result.jump_count_frame(), "jumps")
    artifacts.records(_record_rows(result.records, basis))

    single_photon = max(result.photon_plus[:, 1].max(), result.photon_minus[:, 1].max()) if basis.n_max >= 1 else 0.0
    return {
        "n_traj": result.n_traj,
        "base_seed": result.base_seed,
        "final_states": _final_states(result.labels, result.occupations[-1], result.occupations_stderr[-1]),
        "jump_counts": result.jump_counts,
        "max_single_photon_occupation": float(single_photon),
        "max_cutoff_population": artifacts.check_cutoff(result.max_cutoff_population),
    }


def _run_master(spec: ExperimentSpec, artifacts: _Artifacts, options: RunOptions) -> dict:
    cfg = spec.simulation_config()
    basis = cfg.build_basis()
    collapse = _collapse_for(spec, cfg, basis)
    result = solve_master_equation(cfg, basis, collapse, times=output_grid(cfg, spec.ensemble.grid_points))
    artifacts.table(result.occupation_frame())
    return {
        "manifold_dimension": len(result.manifold),
        "final_states": _final_states(result.labels, result.occupations[-1]),
        "max_trace_drift": result.max_trace_drift,
        "max_cutoff_population": artifacts.check_cutoff(result.max_cutoff_population),
    }


def sweep_detuning(spec: ExperimentSpec, options: RunOptions = None) -> pd.DataFrame:
    """
    Probabilidade final do estado alvo ao longo do eixo de varredura.

    Erros dos solvers são propagados com o valor do eixo anexado.
    """
    if spec.sweep is None:
        raise ConfigurationError("Varredura requer a seção [sweep]")
    options = options or RunOptions()
    sweep = spec.sweep
    base = spec.simulation_config()
    basis = base.build_basis()
    target = _state_index(basis, sweep.target_state)
    grid = output_grid(base, spec.ensemble.grid_points)

    rows = []
    values = sweep.resolved_values()
    for value in tqdm(values, desc=f"Varredura {sweep.parameter}", disable=not options.show_progress):
        cfg = apply_sweep_value(base, sweep.parameter, value)
        collapse = _collapse_for(spec, cfg, basis)
        try:
            if sweep.method == "master":
                result = solve_master_equation(cfg, basis, collapse, times=grid[[0, -1]])
                probability, stderr = float(result.occupations[-1, target]), 0.0
                cutoff = result.max_cutoff_population
            else:
                result = _ensemble(spec, cfg, basis, collapse, RunOptions(options.jobs, False))
                probability, stderr = result.final_probability(sweep.target_state)
                cutoff = result.max_cutoff_population
        except SimulationError as e:
            raise _attach_sweep_value(e, sweep.parameter, value)
        logger.info(f"{sweep.parameter}={value:.6g}: P({sweep.target_state}) = {probability:.6f}")
        rows.append({sweep.parameter: value, "probability": probability, "stderr": stderr, "max_cutoff_population": cutoff})
    return pd.DataFrame(rows, columns=[sweep.parameter, "probability", "stderr", "max_cutoff_population"])


def _run_sweep(spec: ExperimentSpec, artifacts: _Artifacts, options: RunOptions) -> dict:
    frame = sweep_detuning(spec, options)
    artifacts.table(frame)
    for value, cutoff in zip(frame[spec.sweep.parameter], frame["max_cutoff_population"]):
        artifacts.check_cutoff(cutoff, **{spec.sweep.parameter: float(value)})
    best = int(frame["probability"].idxmax())
    return {
        "parameter": spec.sweep.parameter,
        "target_state": spec.sweep.target_state,
        "method": spec.sweep.method,
        "peak_value": float(frame.iloc[best][spec.sweep.parameter]),
        "peak_probability": float(frame.iloc[best]["probability"]),
    }


def _analyzer_points(spec: ExperimentSpec) -> List[Tuple[Tuple[float, ...], Optional[float]]]:
    """(ângulos, θ) de cada ponto; um sweep de φ usa o mesmo ângulo em todos os analisadores."""
    angles = tuple(spec.analyzer.angles)
    theta = spec.analyzer.theta
    if spec.sweep is None:
        return [(angles, theta)]
    if spec.sweep.parameter == "phi":
        return [(tuple([v] * len(angles)), theta) for v in spec.sweep.resolved_values()]
    if spec.sweep.parameter == "theta":
        return [(angles, v) for v in spec.sweep.resolved_values()]
    raise ConfigurationError(
        f"Eixo {spec.sweep.parameter!r} não é suportado em experimentos de correlação",
        {"parameter": spec.sweep.parameter},
    )


def _run_correlate_ghz(spec: ExperimentSpec, artifacts: _Artifacts, options: RunOptions) -> dict:
    cfg = spec.simulation_config()
    basis = cfg.build_basis()
    rule = spec.post_selection_rule()
    routing = spec.analyzer.routing_probabilities
    n = len(spec.analyzer.angles)

    rows, record_rows = [], []
    points = _analyzer_points(spec)
    for point, (angles, _) in enumerate(tqdm(points, desc="Ângulos", disable=not options.show_progress or len(points) == 1)):
        collapse = _collapse_for(spec, cfg, basis, angles)
        result = _ensemble(spec, cfg, basis, collapse, RunOptions(options.jobs, options.show_progress and len(points) == 1))
        artifacts.check_cutoff(result.max_cutoff_population, point=point)
        estimate = estimate_triple_correlation(result.records, rule)
        row = {f"phi_{k}": phi for k, phi in enumerate(angles, start=1)}
        row.update({
            "phi_sum": float(sum(angles)),
            "mean": estimate.mean,
            "stderr": estimate.stderr,
            "n_accepted": estimate.n_accepted,
            "n_total": estimate.n_total,
            "acceptance_fraction": estimate.acceptance_fraction,
            "expected": ghz_expectation(n, (2**-0.5, 2**-0.5), angles),
        })
        if routing is not None:
            row["routing_fraction"] = routing_acceptance_fraction(result.records, routing, rule)
        rows.append(row)
        record_rows.extend(_record_rows(result.records, basis, point=point, angles=list(angles)))
        logger.info(
            f"Ângulos {tuple(round(a, 6) for a in angles)}: correlação {estimate.mean} ± {estimate.stderr} "
            f"({estimate.n_accepted}/{estimate.n_total} aceitas)"
        )

    artifacts.table(pd.DataFrame(rows))
    artifacts.records(record_rows)
    return {"points": len(rows), "rule": rule.to_dict(), "estimates": rows}


def _run_correlate_atom_photon(spec: ExperimentSpec, artifacts: _Artifacts, options: RunOptions) -> dict:
    cfg = spec.simulation_config()
    basis = cfg.build_basis()
    rule = spec.post_selection_rule()

    rows, record_rows = [], []
    cached: Dict[Tuple[float, ...], EnsembleResult] = {}
    points = _analyzer_points(spec)
    for point, (angles, theta) in enumerate(points):
        # o ensemble só depende dos ângulos dos fótons; θ entra na medição atômica
        if angles not in cached:
            cached[angles] = _ensemble(spec, cfg, basis, _collapse_for(spec, cfg, basis, angles), options)
            artifacts.check_cutoff(cached[angles].max_cutoff_population, angles=list(angles))
        records = cached[angles].records
        estimate = estimate_atom_photon_correlation(records, basis, theta, rule)
        row = {f"phi_{k}": phi for k, phi in enumerate(angles, start=1)}
        row.update({
            "theta": theta,
            "mean": estimate.mean,
            "stderr": estimate.stderr,
            "n_accepted": estimate.n_accepted,
            "n_total": estimate.n_total,
            "cos_theta": math.cos(theta),
        })
        rows.append(row)
        logger.info(f"θ={theta:.6g}: correlação {estimate.mean} ± {estimate.stderr}")

    for angles, result in cached.items():
        record_rows.extend(_record_rows(result.records, basis, angles=list(angles)))
    artifacts.table(pd.DataFrame(rows))
    artifacts.records(record_rows)
    return {"points": len(rows), "rule": rule.to_dict(), "estimates": rows}


def _run_photon_histogram(spec: ExperimentSpec, artifacts: _Artifacts, options: RunOptions) -> dict:
    base = spec.simulation_config()
    basis = base.build_basis()
    required = spec.post_selection.required_count

    values = spec.sweep.resolved_values() if spec.sweep is not None else [base.kappa]
    parameter = spec.sweep.parameter if spec.sweep is not None else "kappa"
    rows, summary, record_rows = [], [], []
    for value in values:
        cfg = apply_sweep_value(base, parameter, value) if spec.sweep is not None else base
        result = _ensemble(spec, cfg, basis, _collapse_for(spec, cfg, basis), options)
        artifacts.check_cutoff(result.max_cutoff_population, **{parameter: float(value)})
        histogram = photon_count_histogram(result.records)
        for count, probability in histogram.items():
            rows.append({parameter: value, "photons": count, "probability": probability})
        mode = max(histogram, key=histogram.get) if histogram else None
        summary.append({
            parameter: value,
            "mode": mode,
            "p_more_than_required": float(sum(p for c, p in histogram.items() if c > required)),
            "routing_fraction": routing_acceptance_fraction(
                result.records, spec.analyzer.routing_probabilities, spec.post_selection_rule()
            ) if spec.analyzer.routing_probabilities is not None else None,
        })
        record_rows.extend(_record_rows(result.records, basis, **{parameter: value}))

    artifacts.table(pd.DataFrame(rows, columns=[parameter, "photons", "probability"]))
    artifacts.table(pd.DataFrame(summary), "summary")
    artifacts.records(record_rows)
    return {"required_count": required, "summary": summary}


_DISPATCH: Dict[str, Callable[[ExperimentSpec, _Artifacts, RunOptions], dict]] = {
    "spectrum": _run_spectrum,
    "dark-states": _run_dark_states,
    "landau-zener": _run_landau_zener,
    "trajectory": _run_trajectory,
    "ensemble": _run_ensemble,
    "master": _run_master,
    "sweep-detuning": _run_sweep,
    "correlate-ghz": _run_correlate_ghz,
    "correlate-atom-photon": _run_correlate_atom_photon,
    "photon-histogram": _run_photon_histogram,
}


def run_experiment(spec: ExperimentSpec, prefix: Optional[Path] = None, options: RunOptions = None) -> RunManifest:
    """
    Executa o experimento e escreve os artefatos.

    O manifesto é escrito por último; em caso de erro ele registra a falha
    (status "failed") e a exceção é relançada. População acima do limiar
    na camada n = n_max marca a execução com status "cutoff_leakage".
    """
    options = options or RunOptions()
    artifacts = _Artifacts(Path(prefix or spec.output.prefix))
    manifest = RunManifest(
        artifact_version=OUTPUT_CONFIG["artifact_version"],
        software_version=__version__,
        kind=spec.kind,
        rng_algorithm=ENSEMBLE_CONFIG["rng_algorithm"],
        config=spec.echo(),
    )
    logger.info(f"Experimento '{spec.kind}' iniciado (preset={spec.preset}, saída={artifacts.prefix})")
    started = time.perf_counter()
    try:
        manifest.results = _DISPATCH[spec.kind](spec, artifacts, options)
        if artifacts.warnings:
            manifest.status = STATUS_CUTOFF_LEAKAGE
    except Exception as e:
        manifest.status = STATUS_FAILED
        if isinstance(e, SimulationError):
            manifest.error = e.to_dict()
        else:
            manifest.error = {"type": type(e).__name__, "message": str(e), "context": {}}
        logger.error(f"Experimento '{spec.kind}' falhou: {e}")
        raise
    finally:
        manifest.duration_seconds = time.perf_counter() - started
        manifest.outputs = list(artifacts.outputs)
        manifest.warnings = list(artifacts.warnings)
        write_json(artifacts.manifest_path, manifest.to_dict())
        logger.info(f"Manifesto escrito: {artifacts.manifest_path} ({manifest.duration_seconds:.1f} s)")
    return manifest
