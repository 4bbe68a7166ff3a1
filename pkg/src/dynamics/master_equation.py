"""
Equação Mestra (Oráculo Denso)
==============================

    ρ̇ = -i (H_eff ρ - ρ H_eff†) + Σ_c C_c ρ C_c†

Com A = H_eff ρ e ρ hermitiano, ρ H_eff† = A†, então
ρ̇ = -i (A - A†) + Σ_c C_c ρ C_c†.

ρ é representado densamente apenas no subespaço alcançável a partir do
estado inicial pelas partes de H e pelos operadores de colapso; o
subespaço é fechado sob a dinâmica, então a restrição é exata.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from ..basis import SystemBasis
from ..config import ENSEMBLE_CONFIG, NUMERICS_CONFIG, OUTPUT_CONFIG
from ..exceptions import ConfigurationError, NumericalError
from ..hamiltonian import SimulationConfig, hamiltonian_parts, initial_vector
from .collapse import CollapseSet, dynamical_manifold, restrict_operator

logger = logging.getLogger(__name__)


@dataclass
class MasterEquationResult:
    """
    Attributes:
        times: Grade de saída
        occupations: Diagonal de ρ na base completa, [n_t, dim]
        labels: Rótulos dos estados da base
        manifold: Índices do subespaço integrado
        max_trace_drift: max |tr ρ - 1| na grade
        max_cutoff_population: Máxima população na camada n = n_max
        snapshots: ρ restrito ao subespaço em cada instante (opcional)
    """
    times: np.ndarray
    occupations: np.ndarray
    labels: List[str]
    manifold: np.ndarray
    max_trace_drift: float
    max_cutoff_population: float
    snapshots: Optional[List[np.ndarray]] = None

    def final_probability(self, label: str) -> float:
        return float(self.occupations[-1, self.labels.index(label)])

    def occupation_frame(self, min_population: float = None) -> pd.DataFrame:
        if min_population is None:
            min_population = OUTPUT_CONFIG["min_output_population"]
        keep = np.flatnonzero(self.occupations.max(axis=0) > min_population)
        frame = pd.DataFrame(self.occupations[:, keep], columns=[self.labels[i] for i in keep])
        frame.insert(0, "t", self.times)
        return frame


def solve_master_equation(
    cfg: SimulationConfig,
    basis: SystemBasis,
    collapse: CollapseSet,
    config: dict = None,
    times: Optional[Sequence[float]] = None,
    snapshots: bool = False,
) -> MasterEquationResult:
    """
    Integra a equação mestra com os mesmos pulsos das trajetórias.

    Args:
        times: Grade de saída (padrão: grid_points uniformes na janela)
        snapshots: Guarda ρ em cada instante da grade

    Raises:
        ConfigurationError: subespaço maior que max_dense_dimension
        NumericalError: falha do integrador ou desvio do traço acima da tolerância
    """
    config = {**NUMERICS_CONFIG, **(config or {})}
    manifold = dynamical_manifold(cfg, basis, collapse)
    d = len(manifold)
    if d > config["max_dense_dimension"]:
        raise ConfigurationError(
            f"Subespaço de dimensão {d} excede o limite denso {config['max_dense_dimension']}",
            {"dimension": d, "n_max": cfg.n_max},
        )
    if times is None:
        times = np.linspace(cfg.t_start, cfg.t_end, ENSEMBLE_CONFIG["grid_points"])
    times = np.asarray(times, dtype=float)
    if times.size == 0 or times[0] < cfg.t_start or np.any(np.diff(times) < 0):
        raise ConfigurationError("Grade de saída deve ser crescente e começar em t >= t_start")

    parts = hamiltonian_parts(cfg, basis)
    static = restrict_operator(parts.static_eff, manifold)
    coupling = restrict_operator(parts.coupling, manifold)
    pump = restrict_operator(parts.pump, manifold)
    jumps = [restrict_operator(op, manifold) for op in collapse.operators]
    jumps = [op for op in jumps if op.nnz]

    psi0 = initial_vector(cfg, basis)[manifold]
    rho0 = np.outer(psi0, psi0.conj())

    def rhs(t, y):
        rho = y.reshape(d, d)
        g, omega = parts.coefficients(t)
        a = static @ rho + g * (coupling @ rho) + omega * (pump @ rho)
        drho = -1j * (a - a.conj().T)
        for op in jumps:
            drho += op @ (op @ rho).conj().T
        return drho.ravel()

    logger.info(f"Equação mestra: subespaço {d} de {basis.dimension} estados, {len(jumps)} canais ativos")
    # integração intervalo a intervalo: só as diagonais (e snapshots pedidos) ficam em memória
    y = rho0.ravel()
    t_prev = cfg.t_start
    diagonals = np.empty((len(times), d))
    kept = []
    for i, t in enumerate(times):
        if t > t_prev:
            solution = solve_ivp(
                rhs, (t_prev, t), y, method="RK45", rtol=config["me_rtol"], atol=config["me_atol"],
            )
            if solution.status != 0:
                raise NumericalError(
                    f"Equação mestra falhou em t={t_prev:.6g}: {solution.message}", {"dimension": d, "t": t_prev}
                )
            y = solution.y[:, -1]
            t_prev = t
        rho = y.reshape(d, d)
        diagonals[i] = np.real(np.diagonal(rho))
        if snapshots:
            kept.append(rho.copy())

    drift = float(np.max(np.abs(diagonals.sum(axis=1) - 1.0)))
    if drift > config["trace_tolerance"]:
        raise NumericalError(
            f"Desvio do traço {drift:.3e} acima da tolerância {config['trace_tolerance']}",
            {"drift": drift, "dimension": d},
        )

    occupations = np.zeros((len(times), basis.dimension))
    occupations[:, manifold] = np.clip(diagonals, 0.0, None)
    cutoff = float(basis.cutoff_population(occupations).max())
    if cutoff > config["leakage_threshold"]:
        logger.warning(f"População na camada de corte {cutoff:.3e} (n_max={basis.n_max})")
    logger.info(f"Equação mestra concluída: desvio máximo do traço {drift:.2e}")

    return MasterEquationResult(
        times=times,
        occupations=occupations,
        labels=list(basis.labels),
        manifold=manifold,
        max_trace_drift=drift,
        max_cutoff_population=cutoff,
        snapshots=kept if snapshots else None,
    )

