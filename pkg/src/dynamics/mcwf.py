"""
Trajetórias Quânticas (Função de Onda Monte Carlo)
==================================================

Protocolo de saltos:
1. Sorteia r uniforme em [0, 1)
2. Integra i ∂_t|ψ⟩ = H_eff|ψ⟩ (RK45 complexo) até ‖ψ‖² = r; o instante é
   localizado pelo evento terminal do integrador (raiz sobre a saída densa)
3. Escolhe o canal c com probabilidade ∝ ‖C_c ψ‖², aplica C_c e renormaliza
4. Sorteia novo r e repete até t_end

O estado não normalizado é amostrado (e normalizado) na grade de saída
a partir da saída densa de cada segmento.
"""

import logging
from functools import partial
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from ..basis import SystemBasis
from ..config import ENSEMBLE_CONFIG, NUMERICS_CONFIG
from ..exceptions import ConfigurationError, TrajectoryError
from ..hamiltonian import SimulationConfig, hamiltonian_parts, initial_vector
from .collapse import CollapseSet, dynamical_manifold
from .records import JumpEvent, TrajectoryRecord

logger = logging.getLogger(__name__)


def make_generator(seed: int, algorithm: str = None) -> np.random.Generator:
    """Gerador baseado em contador para uma semente de trajetória."""
    algorithm = algorithm or ENSEMBLE_CONFIG["rng_algorithm"]
    bit_generator = getattr(np.random, algorithm, None)
    if not (isinstance(bit_generator, type) and issubclass(bit_generator, np.random.BitGenerator)):
        raise ConfigurationError(f"Gerador desconhecido: {algorithm!r}", {"rng_algorithm": algorithm})
    return np.random.Generator(bit_generator(int(seed)))


def output_grid(cfg: SimulationConfig, points: int = None) -> np.ndarray:
    points = points or ENSEMBLE_CONFIG["grid_points"]
    if points < 2:
        raise ConfigurationError(f"A grade de saída precisa de >= 2 pontos (recebido {points})")
    return np.linspace(cfg.t_start, cfg.t_end, points)


def _norm_crossing(t, y, threshold):
    return np.vdot(y, y).real - threshold


class TrajectorySolver:
    """
    Evolui trajetórias individuais para uma configuração e um conjunto de
    canais fixos. Operadores e H_eff são montados uma vez por solver,
    restritos ao subespaço alcançável a partir do estado inicial; as
    amostras e o estado final voltam para a base completa.
    """

    def __init__(
        self,
        cfg: SimulationConfig,
        basis: SystemBasis,
        collapse: CollapseSet,
        config: dict = None,
        grid: Optional[np.ndarray] = None,
        rng_algorithm: str = None,
    ):
        self.cfg = cfg
        self.basis = basis
        self.collapse = collapse
        self.config = config or self._default_config()
        self.grid = output_grid(cfg) if grid is None else np.asarray(grid, dtype=float)
        self.manifold = dynamical_manifold(cfg, basis, collapse)
        self.parts = hamiltonian_parts(cfg, basis).restrict(self.manifold)
        self.psi0 = initial_vector(cfg, basis)[self.manifold]
        self.channels = collapse.restrict(self.manifold)
        self.operators = self.channels.operators
        self.labels = collapse.labels
        self.rng_algorithm = rng_algorithm or ENSEMBLE_CONFIG["rng_algorithm"]

    @staticmethod
    def _default_config() -> dict:
        return dict(NUMERICS_CONFIG)

    def _rhs(self, t, psi):
        return -1j * self.parts.apply_h_eff(t, psi)

    def _select_channel(self, psi: np.ndarray, rng: np.random.Generator) -> Tuple[Optional[int], float]:
        rates = self.channels.rates(psi)
        total = float(rates.sum())
        if total <= self.config["zero_rate_threshold"]:
            return None, total
        cumulative = np.cumsum(rates)
        channel = int(np.searchsorted(cumulative, rng.random() * total, side="right"))
        return min(channel, len(rates) - 1), total

    def run(self, seed: int, index: int = 0) -> Tuple[TrajectoryRecord, np.ndarray]:
        """
        Executa uma trajetória.

        Returns:
            (registro, probabilidades [n_grid, dim] na grade de saída)
        """
        rng = make_generator(seed, self.rng_algorithm)
        record = TrajectoryRecord(index=index, seed=int(seed))
        grid = self.grid
        local = np.zeros((len(grid), len(self.manifold)))

        rtol, atol = self.config["rtol"], self.config["atol"]
        t, t_end = self.cfg.t_start, self.cfg.t_end
        psi = self.psi0.copy()
        threshold = rng.random()
        position = 0

        while t < t_end:
            event = partial(_norm_crossing, threshold=threshold)
            event.terminal = True
            event.direction = -1
            solution = solve_ivp(
                self._rhs, (t, t_end), psi,
                method="RK45", rtol=rtol, atol=atol, events=event, dense_output=True,
            )
            if solution.status == -1:
                raise TrajectoryError(
                    f"Integrador falhou em t={t:.6g}: {solution.message}", index, seed, {"t": t}
                )

            t_stop = float(solution.t[-1])
            while position < len(grid) and grid[position] <= t_stop:
                y = solution.sol(grid[position])
                local[position] = np.abs(y) ** 2 / np.vdot(y, y).real
                position += 1

            if solution.status != 1:
                psi = solution.y[:, -1]
                break

            t_jump = float(solution.t_events[0][0])
            psi = solution.y_events[0][0]
            norm2 = np.vdot(psi, psi).real
            if abs(norm2 - threshold) > self.config["jump_tolerance"]:
                raise TrajectoryError(
                    f"Instante do salto não convergiu: |‖ψ‖² - r| = {abs(norm2 - threshold):.3e}",
                    index, seed, {"t": t_jump, "threshold": threshold},
                )
            channel, total = self._select_channel(psi, rng)
            if channel is None:
                record.zero_rate_draws += 1
                logger.warning(
                    f"Trajetória {index}: taxa total de saltos nula ({total:.3e}) em t={t_jump:.4f}; "
                    f"avançando sem salto"
                )
                psi = psi / np.sqrt(norm2)
            else:
                psi = self.operators[channel] @ psi
                psi = psi / np.linalg.norm(psi)
                record.events.append(JumpEvent(t_jump, self.labels[channel]))
            threshold = rng.random()
            t = t_jump

        # pontos restantes da grade
        while position < len(grid):
            local[position] = np.abs(psi) ** 2 / np.vdot(psi, psi).real
            position += 1

        samples = np.zeros((len(grid), self.basis.dimension))
        samples[:, self.manifold] = local
        record.final_state = np.zeros(self.basis.dimension, dtype=complex)
        record.final_state[self.manifold] = psi / np.linalg.norm(psi)
        record.max_cutoff_population = float(self.basis.cutoff_population(samples).max())
        if record.max_cutoff_population > self.config["leakage_threshold"]:
            logger.warning(
                f"Trajetória {index}: população na camada de corte "
                f"{record.max_cutoff_population:.3e} (n_max={self.basis.n_max})"
            )
        logger.debug(f"Trajetória {index} (semente {seed}): {record.n_jumps} saltos")
        return record, samples


def evolve_trajectory(
    cfg: SimulationConfig,
    basis: SystemBasis,
    collapse: CollapseSet,
    seed: int,
    config: dict = None,
) -> TrajectoryRecord:
    """Uma trajetória de saltos quânticos com a semente dada."""
    record, _ = TrajectorySolver(cfg, basis, collapse, config).run(seed)
    return record
