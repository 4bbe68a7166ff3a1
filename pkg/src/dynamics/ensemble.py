"""
Ensemble de Trajetórias
=======================

- Semente da trajetória i: SeedSequence(semente base, spawn_key=(i,))
- Trajetórias agrupadas em blocos de tamanho fixo (chunk_size); cada bloco
  produz somas e somas de quadrados na grade de saída
- Os blocos são combinados na ordem dos índices, de modo que o resultado
  não depende do número de processos
"""

import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..basis import LevelScheme, SystemBasis, enumerate_basis
from ..config import ENSEMBLE_CONFIG, NUMERICS_CONFIG, OUTPUT_CONFIG
from ..exceptions import ConfigurationError, NumericalError, TrajectoryError
from ..hamiltonian import SimulationConfig, check_basis
from .collapse import CollapseSet
from .mcwf import TrajectorySolver, output_grid
from .records import TrajectoryRecord

logger = logging.getLogger(__name__)


def trajectory_seed(base_seed: int, index: int) -> int:
    """Semente de 64 bits derivada deterministicamente de (semente base, índice)."""
    sequence = np.random.SeedSequence(int(base_seed), spawn_key=(int(index),))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


@dataclass
class _Moments:
    """Soma e soma dos quadrados de uma grandeza amostrada na grade."""
    total: np.ndarray
    squares: np.ndarray

    @classmethod
    def zeros(cls, shape) -> "_Moments":
        return cls(np.zeros(shape), np.zeros(shape))

    def add(self, values: np.ndarray) -> None:
        self.total += values
        self.squares += values * values

    def merge(self, other: "_Moments") -> None:
        self.total += other.total
        self.squares += other.squares

    def mean_and_stderr(self, n: int) -> Tuple[np.ndarray, np.ndarray]:
        mean = self.total / n
        if n < 2:
            return mean, np.zeros_like(mean)
        variance = np.maximum(self.squares / n - mean * mean, 0.0) * n / (n - 1)
        return mean, np.sqrt(variance / n)


@dataclass
class _ChunkResult:
    occupations: _Moments
    atomic: _Moments
    photons_plus: _Moments
    photons_minus: _Moments
    records: List[TrajectoryRecord]
    failures: List[dict]


@lru_cache(maxsize=8)
def _worker_basis(scheme: LevelScheme, n_max: int) -> SystemBasis:
    return enumerate_basis(scheme, n_max)


def _run_chunk(task) -> _ChunkResult:
    cfg, collapse, indices, base_seed, grid, config, rng_algorithm = task
    basis = _worker_basis(cfg.scheme, cfg.n_max)
    solver = TrajectorySolver(cfg, basis, collapse, config, grid, rng_algorithm)
    n_t = len(grid)

    chunk = _ChunkResult(
        occupations=_Moments.zeros((n_t, basis.dimension)),
        atomic=_Moments.zeros((n_t, basis.scheme.n_levels)),
        photons_plus=_Moments.zeros((n_t, basis.n_max + 1)),
        photons_minus=_Moments.zeros((n_t, basis.n_max + 1)),
        records=[],
        failures=[],
    )
    for index in indices:
        seed = trajectory_seed(base_seed, index)
        try:
            record, probabilities = solver.run(seed, index)
        except TrajectoryError as e:
            chunk.failures.append({"index": index, "seed": seed, "message": str(e)})
            continue
        chunk.occupations.add(probabilities)
        chunk.atomic.add(basis.atomic_populations(probabilities))
        chunk.photons_plus.add(basis.photon_distribution(probabilities, "plus"))
        chunk.photons_minus.add(basis.photon_distribution(probabilities, "minus"))
        chunk.records.append(record)
    return chunk


@dataclass
class EnsembleResult:
    """
    Médias do ensemble na grade de saída.

    Attributes:
        times: Grade temporal
        labels: Rótulos dos estados da base
        occupations, occupations_stderr: [n_t, dim]
        atomic_populations, atomic_stderr: [n_t, n_subníveis]
        photon_plus, photon_minus (+ stderr): P(n) por modo, [n_t, n_max+1]
        jump_counts: Por canal, média/desvio/total de saltos por trajetória
        records: Registros em ordem de índice
    """
    times: np.ndarray
    labels: List[str]
    atomic_labels: List[str]
    occupations: np.ndarray
    occupations_stderr: np.ndarray
    atomic_populations: np.ndarray
    atomic_stderr: np.ndarray
    photon_plus: np.ndarray
    photon_plus_stderr: np.ndarray
    photon_minus: np.ndarray
    photon_minus_stderr: np.ndarray
    jump_counts: Dict[str, Dict[str, float]]
    records: List[TrajectoryRecord]
    n_traj: int
    base_seed: int
    rng_algorithm: str
    max_cutoff_population: float = 0.0

    def final_probability(self, label: str) -> Tuple[float, float]:
        i = self.labels.index(label)
        return float(self.occupations[-1, i]), float(self.occupations_stderr[-1, i])

    def occupation_frame(self, min_population: float = None) -> pd.DataFrame:
        """Colunas t + estados cuja ocupação média excede o limiar em algum instante."""
        if min_population is None:
            min_population = OUTPUT_CONFIG["min_output_population"]
        keep = np.flatnonzero(self.occupations.max(axis=0) > min_population)
        frame = pd.DataFrame(self.occupations[:, keep], columns=[self.labels[i] for i in keep])
        frame.insert(0, "t", self.times)
        return frame

    def stderr_frame(self, min_population: float = None) -> pd.DataFrame:
        if min_population is None:
            min_population = OUTPUT_CONFIG["min_output_population"]
        keep = np.flatnonzero(self.occupations.max(axis=0) > min_population)
        frame = pd.DataFrame(self.occupations_stderr[:, keep], columns=[self.labels[i] for i in keep])
        frame.insert(0, "t", self.times)
        return frame

    def atomic_frame(self) -> pd.DataFrame:
        data = {"t": self.times}
        for j, label in enumerate(self.atomic_labels):
            data[label] = self.atomic_populations[:, j]
            data[f"{label}_stderr"] = self.atomic_stderr[:, j]
        return pd.DataFrame(data)

    def photon_frame(self) -> pd.DataFrame:
        data = {"t": self.times}
        for name, mean, err in (
            ("plus", self.photon_plus, self.photon_plus_stderr),
            ("minus", self.photon_minus, self.photon_minus_stderr),
        ):
            for n in range(mean.shape[1]):
                data[f"{name}_{n}"] = mean[:, n]
                data[f"{name}_{n}_stderr"] = err[:, n]
        return pd.DataFrame(data)

    def jump_count_frame(self) -> pd.DataFrame:
        rows = [{"channel": channel, **stats} for channel, stats in self.jump_counts.items()]
        return pd.DataFrame(rows, columns=["channel", "mean", "std", "total"])


def _resolve_jobs(jobs: Optional[int]) -> int:
    if jobs is None:
        return os.cpu_count() or 1
    if jobs < 1:
        raise ConfigurationError(f"jobs deve ser >= 1 (recebido {jobs})", {"jobs": jobs})
    return int(jobs)


def _jump_statistics(records: Sequence[TrajectoryRecord], labels: Sequence[str]) -> Dict[str, Dict[str, float]]:
    counts = np.array([[record.channel_counts()[label] for label in labels] for record in records], dtype=float)
    if counts.size == 0:
        return {label: {"mean": 0.0, "std": 0.0, "total": 0} for label in labels}
    return {
        label: {
            "mean": float(counts[:, j].mean()),
            "std": float(counts[:, j].std(ddof=1)) if len(records) > 1 else 0.0,
            "total": int(counts[:, j].sum()),
        }
        for j, label in enumerate(labels)
    }


def run_ensemble(
    cfg: SimulationConfig,
    basis: SystemBasis,
    collapse: CollapseSet,
    n_traj: int = None,
    base_seed: int = None,
    jobs: int = None,
    config: dict = None,
    numerics: dict = None,
    show_progress: bool = None,
) -> EnsembleResult:
    """
    Executa n_traj trajetórias e calcula as médias na grade de saída.

    Args:
        jobs: Processos paralelos (None = ENSEMBLE_CONFIG["jobs"] ou núcleos disponíveis)
        config: Sobrescreve ENSEMBLE_CONFIG
        numerics: Sobrescreve NUMERICS_CONFIG (tolerâncias do integrador)

    Raises:
        NumericalError: se qualquer trajetória falhar (lista todos os índices)
    """
    config = {**ENSEMBLE_CONFIG, **(config or {})}
    numerics = {**NUMERICS_CONFIG, **(numerics or {})}
    n_traj = config["n_traj"] if n_traj is None else int(n_traj)
    base_seed = config["base_seed"] if base_seed is None else int(base_seed)
    if n_traj < 1:
        raise ConfigurationError(f"n_traj deve ser >= 1 (recebido {n_traj})", {"n_traj": n_traj})
    check_basis(cfg, basis)
    jobs = _resolve_jobs(jobs if jobs is not None else config.get("jobs"))
    show_progress = config.get("show_progress", True) if show_progress is None else show_progress

    grid = output_grid(cfg, config["grid_points"])
    chunk_size = max(1, int(config["chunk_size"]))
    tasks = [
        (
            cfg, collapse, range(start, min(start + chunk_size, n_traj)),
            base_seed, grid, numerics, config["rng_algorithm"],
        )
        for start in range(0, n_traj, chunk_size)
    ]
    logger.info(
        f"Ensemble: {n_traj} trajetórias, {len(tasks)} blocos, {jobs} processo(s), "
        f"semente base {base_seed}, dimensão {basis.dimension}"
    )

    progress = dict(total=len(tasks), desc="Trajetórias", unit="bloco", disable=not show_progress)
    if jobs == 1:
        chunks = [_run_chunk(task) for task in tqdm(tasks, **progress)]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as executor:
            chunks = list(tqdm(executor.map(_run_chunk, tasks), **progress))

    first = chunks[0]
    for chunk in chunks[1:]:
        first.occupations.merge(chunk.occupations)
        first.atomic.merge(chunk.atomic)
        first.photons_plus.merge(chunk.photons_plus)
        first.photons_minus.merge(chunk.photons_minus)
        first.records.extend(chunk.records)
        first.failures.extend(chunk.failures)

    if first.failures:
        indices = [f["index"] for f in first.failures]
        raise NumericalError(
            f"{len(indices)} de {n_traj} trajetórias falharam: índices {indices}",
            {"failures": first.failures},
        )

    records = first.records
    occupations, occupations_stderr = first.occupations.mean_and_stderr(n_traj)
    atomic, atomic_stderr = first.atomic.mean_and_stderr(n_traj)
    plus, plus_stderr = first.photons_plus.mean_and_stderr(n_traj)
    minus, minus_stderr = first.photons_minus.mean_and_stderr(n_traj)
    max_cutoff = max(r.max_cutoff_population for r in records)
    zero_rate = sum(r.zero_rate_draws for r in records)

    total_jumps = Counter()
    for record in records:
        total_jumps.update(record.channel_counts())
    logger.info(
        f"Ensemble concluído: saltos por canal {dict(total_jumps)}; "
        f"população máxima no corte {max_cutoff:.2e}"
    )
    if zero_rate:
        logger.warning(f"{zero_rate} sorteios com taxa de salto nula no ensemble")

    return EnsembleResult(
        times=grid,
        labels=list(basis.labels),
        atomic_labels=[f"{level}{m:g}" for level, m in basis.atomic_levels],
        occupations=occupations,
        occupations_stderr=occupations_stderr,
        atomic_populations=atomic,
        atomic_stderr=atomic_stderr,
        photon_plus=plus,
        photon_plus_stderr=plus_stderr,
        photon_minus=minus,
        photon_minus_stderr=minus_stderr,
        jump_counts=_jump_statistics(records, collapse.labels),
        records=records,
        n_traj=n_traj,
        base_seed=base_seed,
        rng_algorithm=config["rng_algorithm"],
        max_cutoff_population=max_cutoff,
    )
