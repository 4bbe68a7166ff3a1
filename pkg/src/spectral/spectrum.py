"""
Espectro Instantâneo e Rastreamento de Níveis
=============================================

- Diagonalização de H_int restrita ao subespaço acoplado ao estado
  inicial (alcançabilidade no grafo de esparsidade de H_int)
- Rastreamento por sobreposição máxima entre autovetores consecutivos
- Varredura de cruzamentos evitados com refinamento local
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.optimize import minimize_scalar

from ..basis import SystemBasis
from ..config import NUMERICS_CONFIG
from ..exceptions import ConfigurationError, NumericalError
from ..hamiltonian import SimulationConfig, coupled_manifold, hamiltonian_parts

logger = logging.getLogger(__name__)


@dataclass
class InstantaneousSpectrum:
    """Autovalores (crescentes) e autovetores de H_int no subespaço `manifold`."""
    t: float
    energies: np.ndarray
    vectors: np.ndarray
    manifold: np.ndarray


@dataclass
class Discontinuity:
    index: int
    t: float
    track_id: int
    overlap: float


@dataclass
class SpectrumTrack:
    """
    Níveis rastreados ao longo da grade temporal.

    Attributes:
        times: Grade temporal
        energies: Energias [n_t, n_tracks], coluna = trilha
        vectors: Autovetores por instante, colunas na ordem das trilhas
        manifold: Índices da base do subespaço diagonalizado
        discontinuities: Casamentos ambíguos (sobreposição < limiar)
    """
    times: np.ndarray
    energies: np.ndarray
    vectors: List[np.ndarray]
    manifold: np.ndarray
    discontinuities: List[Discontinuity] = field(default_factory=list)

    @property
    def n_tracks(self) -> int:
        return self.energies.shape[1]

    def track_of_state(self, vector: np.ndarray, index: Optional[int] = None, min_weight: float = 0.9) -> int:
        """
        Trilha que contém `vector` (base completa).

        Sem `index`, percorre a grade e usa o primeiro instante em que uma
        única trilha tem peso |⟨v|ψ⟩|² >= min_weight; em t = t_start o
        estado inicial costuma estar misturado a níveis degenerados. Se
        nenhum instante resolve a ambiguidade, usa o de maior peso.
        """
        local = np.asarray(vector)[self.manifold]
        norm = np.linalg.norm(local)
        if norm == 0:
            raise ConfigurationError("Estado de referência fora do subespaço diagonalizado")
        local = local / norm

        candidates = range(len(self.times)) if index is None else [index]
        best_track, best_weight, best_index = 0, -1.0, 0
        for i in candidates:
            weights = np.abs(self.vectors[i].conj().T @ local) ** 2
            track = int(np.argmax(weights))
            if weights[track] >= min_weight:
                return track
            if weights[track] > best_weight:
                best_track, best_weight, best_index = track, float(weights[track]), i
        logger.warning(
            f"Estado de referência sem trilha dominante (peso máximo {best_weight:.3f} "
            f"em t={self.times[best_index]:.4g}); usando a trilha {best_track}"
        )
        return best_track

    def to_frame(self) -> pd.DataFrame:
        n_t, n_tracks = self.energies.shape
        return pd.DataFrame({
            "t": np.repeat(self.times, n_tracks),
            "track_id": np.tile(np.arange(n_tracks), n_t),
            "energy": self.energies.ravel(),
        })


@dataclass
class AvoidedCrossing:
    t: float
    gap: float
    neighbor_track: int

    def to_dict(self) -> dict:
        return {"t": self.t, "gap": self.gap, "neighbor_track": self.neighbor_track}


def instantaneous_spectrum(
    cfg: SimulationConfig,
    basis: SystemBasis,
    t: float,
    manifold: Optional[np.ndarray] = None,
) -> InstantaneousSpectrum:
    """
    Autodecomposição completa de H_int(t) restrita ao subespaço acoplado.

    Args:
        manifold: Índices da base; None = alcançáveis a partir do estado inicial
    """
    if manifold is None:
        manifold = coupled_manifold(cfg, basis)
    h = hamiltonian_parts(cfg, basis).h_int(t)
    block = h[manifold][:, manifold].toarray()
    try:
        energies, vectors = linalg.eigh(block)
    except (linalg.LinAlgError, ValueError) as e:
        raise NumericalError(
            f"Diagonalização falhou em t={t}: {e}",
            {"t": t, "dimension": len(manifold), "max_abs": float(np.abs(block).max())},
        ) from e
    return InstantaneousSpectrum(t=float(t), energies=energies, vectors=vectors, manifold=np.asarray(manifold))


def spectrum_series(
    cfg: SimulationConfig,
    basis: SystemBasis,
    times: Sequence[float],
    manifold: Optional[np.ndarray] = None,
) -> List[InstantaneousSpectrum]:
    if manifold is None:
        manifold = coupled_manifold(cfg, basis)
    return [instantaneous_spectrum(cfg, basis, t, manifold) for t in times]


def _match(prev_vectors, prev_energies, next_vectors, next_energies):
    """Casamento guloso por sobreposição decrescente; empate pela proximidade de energia."""
    overlaps = np.abs(prev_vectors.conj().T @ next_vectors)
    n = overlaps.shape[0]
    rows, cols = np.indices((n, n))
    distance = np.abs(prev_energies[:, None] - next_energies[None, :])
    order = np.lexsort((distance.ravel(), -np.round(overlaps.ravel(), 12)))

    assignment = -np.ones(n, dtype=int)
    taken = np.zeros(n, dtype=bool)
    for flat in order:
        i, j = rows.ravel()[flat], cols.ravel()[flat]
        if assignment[i] < 0 and not taken[j]:
            assignment[i] = j
            taken[j] = True
    return assignment, overlaps[np.arange(n), assignment]


def track_levels(spectra: Sequence[InstantaneousSpectrum], config: dict = None) -> SpectrumTrack:
    """
    Conecta os espectros consecutivos em trilhas contínuas.

    Casamentos com sobreposição abaixo de `track_min_overlap` são
    registrados como descontinuidades.
    """
    config = config or NUMERICS_CONFIG
    min_overlap = config.get("track_min_overlap", 0.5)
    if not spectra:
        raise ConfigurationError("Lista de espectros vazia")

    first = spectra[0]
    energies = [first.energies.copy()]
    vectors = [first.vectors.copy()]
    discontinuities = []

    for step, spectrum in enumerate(spectra[1:], start=1):
        assignment, overlaps = _match(vectors[-1], energies[-1], spectrum.vectors, spectrum.energies)
        energies.append(spectrum.energies[assignment])
        vectors.append(spectrum.vectors[:, assignment])
        for track_id in np.flatnonzero(overlaps < min_overlap):
            discontinuities.append(Discontinuity(step, spectrum.t, int(track_id), float(overlaps[track_id])))

    if discontinuities:
        logger.warning(
            f"{len(discontinuities)} casamentos ambíguos (sobreposição < {min_overlap}) "
            f"no rastreamento de {first.vectors.shape[1]} níveis"
        )
    return SpectrumTrack(
        times=np.array([s.t for s in spectra]),
        energies=np.array(energies),
        vectors=vectors,
        manifold=first.manifold,
        discontinuities=discontinuities,
    )


def _nearest_gap(energies: np.ndarray, reference: float) -> float:
    k = int(np.argmin(np.abs(energies - reference)))
    gaps = []
    if k > 0:
        gaps.append(energies[k] - energies[k - 1])
    if k < len(energies) - 1:
        gaps.append(energies[k + 1] - energies[k])
    return min(gaps) if gaps else np.inf


def scan_avoided_crossings(
    track: SpectrumTrack,
    reference: int,
    cfg: Optional[SimulationConfig] = None,
    basis: Optional[SystemBasis] = None,
    config: dict = None,
) -> List[AvoidedCrossing]:
    """
    Mínimos locais do gap entre a trilha de referência e a vizinha mais próxima.

    Com `cfg` e `basis`, cada mínimo é refinado por minimização limitada
    entre os pontos vizinhos da grade, até a resolução `gap_resolution`.
    """
    config = config or NUMERICS_CONFIG
    resolution = config.get("gap_resolution", 1e-4)

    ref = track.energies[:, reference]
    others = np.delete(track.energies, reference, axis=1)
    other_ids = np.delete(np.arange(track.n_tracks), reference)
    if others.shape[1] == 0:
        return []
    distance = np.abs(others - ref[:, None])
    gap = distance.min(axis=1)
    neighbor = other_ids[distance.argmin(axis=1)]

    crossings = []
    for i in range(1, len(gap) - 1):
        if not (gap[i] < gap[i - 1] and gap[i] <= gap[i + 1]):
            continue
        t_best, gap_best = float(track.times[i]), float(gap[i])
        if cfg is not None and basis is not None:
            t_lo, t_hi = track.times[i - 1], track.times[i + 1]
            times, refs = track.times, ref

            def objective(t):
                spectrum = instantaneous_spectrum(cfg, basis, t, track.manifold)
                return _nearest_gap(spectrum.energies, np.interp(t, times, refs))

            result = minimize_scalar(objective, bounds=(t_lo, t_hi), method="bounded", options={"xatol": resolution})
            if result.success and result.fun < gap_best:
                t_best, gap_best = float(result.x), float(result.fun)
            logger.debug(f"Refinamento em t≈{track.times[i]:.4f}: gap {gap[i]:.3e} -> {gap_best:.3e}")
        crossings.append(AvoidedCrossing(t_best, gap_best, int(neighbor[i])))
    return crossings


def crossings_frame(crossings: Sequence[AvoidedCrossing]) -> pd.DataFrame:
    return pd.DataFrame([c.to_dict() for c in crossings], columns=["t", "gap", "neighbor_track"])
