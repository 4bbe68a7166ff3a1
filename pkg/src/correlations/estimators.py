"""
Estimadores de Correlação a partir dos Registros de Saltos
==========================================================

Cada trajetória aceita pela pós-seleção contribui com o produto dos
sinais dos fótons detectados (+1 para polarização x, -1 para y) e,
no esquema átomo-fóton, com o resultado ±1 da medição atômica.

Estimadores são reduções puras sobre coleções de registros; apenas as
marcações de aceitação e os resultados atômicos são escritos de volta
nos registros.
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..basis import SystemBasis
from ..config import CORRELATION_CONFIG
from ..exceptions import ConfigurationError, DomainError
from .observables import (
    POLARIZATION_SIGN,
    STANDARD_CAVITY_LABELS,
    is_cavity_channel,
    parity_projectors,
    parse_detector_label,
)

if TYPE_CHECKING:
    from ..dynamics.records import JumpEvent, TrajectoryRecord

logger = logging.getLogger(__name__)

ATTRIBUTIONS = ("channel", "order")

# chave fixa do fluxo aleatório da medição atômica
_ATOM_STREAM = 0x41544F4D


@dataclass
class AnalyzerConfig:
    """
    Ângulos dos analisadores e modelo de roteamento.

    Attributes:
        angles: Fases φ_k dos analisadores de fótons (rad)
        theta: Ângulo θ do analisador atômico (rad), opcional
        routing_probabilities: Probabilidades por fóton (lado A, lado B);
            None = roteamento ideal, um fóton por analisador
    """
    angles: Tuple[float, ...]
    theta: Optional[float] = None
    routing_probabilities: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        self.angles = tuple(float(a) for a in self.angles)
        if not self.angles:
            raise ConfigurationError("Pelo menos um ângulo de analisador é necessário")
        if not all(math.isfinite(a) for a in self.angles):
            raise ConfigurationError("Ângulos dos analisadores devem ser finitos", {"angles": self.angles})
        if self.theta is not None and not math.isfinite(self.theta):
            raise ConfigurationError("θ deve ser finito", {"theta": self.theta})
        if self.routing_probabilities is not None:
            probs = tuple(float(p) for p in self.routing_probabilities)
            if any(p < 0 or p > 1 for p in probs) or abs(sum(probs) - 1.0) > 1e-9:
                raise ConfigurationError(
                    f"Probabilidades de roteamento inválidas: {probs} (devem somar 1)",
                    {"routing_probabilities": probs},
                )
            self.routing_probabilities = probs

    @property
    def n_analyzers(self) -> int:
        return len(self.angles)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PostSelectionRule:
    """
    Regra de pós-seleção sobre os saltos de cavidade de uma trajetória.

    Attributes:
        required_count: Número exato de fótons detectados
        max_hits_per_detector: Máximo de cliques por detector (None = ilimitado)
        distinct_analyzers: Exige um fóton por analisador
        attribution: "channel" (analisador pelo rótulo do canal) ou
            "order" (k-ésimo salto -> analisador k)
    """
    required_count: int = 3
    max_hits_per_detector: Optional[int] = 1
    distinct_analyzers: bool = True
    attribution: str = "channel"

    def __post_init__(self):
        if self.required_count < 1:
            raise ConfigurationError(
                f"required_count deve ser >= 1 (recebido {self.required_count})",
                {"required_count": self.required_count},
            )
        if self.max_hits_per_detector is not None and self.max_hits_per_detector < 1:
            raise ConfigurationError(
                f"max_hits_per_detector deve ser >= 1 ou None (recebido {self.max_hits_per_detector})",
                {"max_hits_per_detector": self.max_hits_per_detector},
            )
        if self.attribution not in ATTRIBUTIONS:
            raise ConfigurationError(
                f"attribution deve ser um de {ATTRIBUTIONS} (recebido {self.attribution!r})",
                {"attribution": self.attribution},
            )

    @classmethod
    def from_config(cls, config: dict = None, **overrides) -> "PostSelectionRule":
        config = config or CORRELATION_CONFIG
        values = {
            "required_count": config.get("required_count", 3),
            "max_hits_per_detector": config.get("max_hits_per_detector", 1),
            "distinct_analyzers": config.get("distinct_analyzers", True),
            "attribution": config.get("attribution", "channel"),
        }
        values.update(overrides)
        return cls(**values)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class CorrelationEstimate:
    """
    Média do produto dos resultados sobre as trajetórias aceitas.

    `mean` e `stderr` são None quando nenhuma trajetória é aceita.
    """
    mean: Optional[float]
    stderr: Optional[float]
    n_accepted: int
    n_total: int
    rejections: Dict[str, int] = field(default_factory=dict)

    @property
    def acceptance_fraction(self) -> float:
        return self.n_accepted / self.n_total if self.n_total else 0.0

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "n_accepted": self.n_accepted,
            "n_total": self.n_total,
            "rejections": dict(self.rejections),
        }


@dataclass
class AtomOutcome:
    """Resultado da medição de paridade atômica ao fim de uma trajetória."""
    theta: float
    outcome: int
    p_even: float
    residual: float
    warning: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)


def cavity_events(record: "TrajectoryRecord") -> List["JumpEvent"]:
    return [event for event in record.events if is_cavity_channel(event.channel)]


def _event_polarization(channel: str) -> str:
    parsed = parse_detector_label(channel)
    if parsed is None:
        raise DomainError(
            f"Canal {channel!r} não é um canal de detector (esperado 'cav_k_x|y')",
            {"channel": channel},
        )
    return parsed[1]


def _classify(record: "TrajectoryRecord", rule: PostSelectionRule) -> Tuple[Optional[str], List[int]]:
    """(motivo da rejeição ou None, sinais dos fótons)."""
    events = cavity_events(record)
    if len(events) != rule.required_count:
        return ("too_many_photons" if len(events) > rule.required_count else "too_few_photons"), []

    detectors = []
    for position, event in enumerate(events, start=1):
        parsed = parse_detector_label(event.channel)
        if parsed is None:
            raise DomainError(
                f"Canal {event.channel!r} não é um canal de detector (esperado 'cav_k_x|y')",
                {"channel": event.channel, "seed": record.seed},
            )
        analyzer, polarization = parsed
        if rule.attribution == "order":
            analyzer = position
        detectors.append((analyzer, polarization))

    if rule.max_hits_per_detector is not None:
        hits = Counter(detectors)
        if max(hits.values()) > rule.max_hits_per_detector:
            return "detector_hits", []
    if rule.distinct_analyzers and len({a for a, _ in detectors}) != len(detectors):
        return "shared_analyzer", []
    return None, [POLARIZATION_SIGN[p] for _, p in detectors]


def _summarize(values: Sequence[float], n_total: int, rejections: Counter) -> CorrelationEstimate:
    n = len(values)
    if n == 0:
        return CorrelationEstimate(None, None, 0, n_total, dict(rejections))
    data = np.asarray(values, dtype=float)
    stderr = float(data.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return CorrelationEstimate(float(data.mean()), stderr, n, n_total, dict(rejections))


def estimate_triple_correlation(
    records: Sequence["TrajectoryRecord"],
    rule: Optional[PostSelectionRule] = None,
) -> CorrelationEstimate:
    """
    Média do produto dos sinais (+1 x, -1 y) sobre as trajetórias aceitas.

    Marca `flags["accepted"]` (e o motivo da rejeição) em cada registro.
    """
    rule = rule or PostSelectionRule.from_config()
    values, rejections = [], Counter()
    for record in records:
        reason, signs = _classify(record, rule)
        record.flags["accepted"] = reason is None
        if reason is not None:
            record.flags["rejection"] = reason
            rejections[reason] += 1
            continue
        values.append(math.prod(signs))

    estimate = _summarize(values, len(records), rejections)
    if estimate.n_accepted == 0:
        logger.warning(f"Nenhuma trajetória aceita de {len(records)} (rejeições: {dict(rejections)})")
    return estimate


def _measurement_rng(seed: int, theta: float) -> np.random.Generator:
    words = np.frombuffer(np.float64(theta).tobytes(), dtype=np.uint32)
    sequence = np.random.SeedSequence(int(seed), spawn_key=(_ATOM_STREAM, int(words[0]), int(words[1])))
    return np.random.Generator(np.random.Philox(sequence))


def atom_measurement(
    final_state: np.ndarray,
    theta: float,
    seed: int,
    basis: SystemBasis,
    config: dict = None,
) -> AtomOutcome:
    """
    Amostra o resultado ±1 de M(θ) = P_par(θ) - P_ímpar(θ) no estado final.

    A probabilidade vem da parte fundamental do estado; população residual
    nos níveis excitados acima do limiar gera um aviso.
    """
    config = config or CORRELATION_CONFIG
    threshold = config.get("residual_threshold", 1e-6)

    psi = np.asarray(final_state, dtype=complex)
    norm = float(np.vdot(psi, psi).real)
    if norm <= 0:
        raise DomainError("Estado final nulo", {"seed": seed})
    n_ground = basis.scheme.n_ground * basis.photon_dim
    ground = psi[:n_ground].reshape(basis.scheme.n_ground, basis.photon_dim)
    residual = float(np.vdot(psi[n_ground:], psi[n_ground:]).real) / norm

    p_even_op, p_odd_op = parity_projectors(basis.scheme.f_g, theta)
    weight_even = float(np.vdot(ground, p_even_op @ ground).real)
    weight_odd = float(np.vdot(ground, p_odd_op @ ground).real)
    p_even = min(max(weight_even / (weight_even + weight_odd), 0.0), 1.0)

    outcome = 1 if _measurement_rng(seed, theta).random() < p_even else -1
    warning = None
    if residual > threshold:
        warning = f"população excitada residual {residual:.3e} antes da medição atômica"
        logger.warning(f"Semente {seed}: {warning}")
    return AtomOutcome(float(theta), outcome, p_even, residual, warning)


def estimate_atom_photon_correlation(
    records: Sequence["TrajectoryRecord"],
    basis: SystemBasis,
    theta: float,
    rule: Optional[PostSelectionRule] = None,
) -> CorrelationEstimate:
    """
    Média de (sinal do fóton 1) x (sinal do fóton 2) x (resultado atômico).

    A medição atômica é feita em todas as trajetórias aceitas e anexada a
    `record.atom_outcomes`.
    """
    rule = rule or PostSelectionRule.from_config(required_count=2)
    values, rejections = [], Counter()
    for record in records:
        reason, signs = _classify(record, rule)
        record.flags["accepted"] = reason is None
        if reason is not None:
            record.flags["rejection"] = reason
            rejections[reason] += 1
            continue
        if record.final_state is None:
            raise DomainError("Registro sem estado final; medição atômica impossível", {"seed": record.seed})
        outcome = atom_measurement(record.final_state, theta, record.seed, basis)
        record.atom_outcomes.append(outcome.to_dict())
        if outcome.warning:
            record.flags["warning"] = outcome.warning
        values.append(math.prod(signs) * outcome.outcome)

    return _summarize(values, len(records), rejections)


def photon_count_histogram(records: Sequence["TrajectoryRecord"]) -> Dict[int, float]:
    """Distribuição normalizada do número de saltos de cavidade por trajetória."""
    if not records:
        return {}
    counts = Counter(len(cavity_events(record)) for record in records)
    total = len(records)
    return {n: counts[n] / total for n in sorted(counts)}


def _photon_polarizations(record: "TrajectoryRecord") -> List[str]:
    standard = {label: pol for pol, label in STANDARD_CAVITY_LABELS.items()}
    out = []
    for event in cavity_events(record):
        out.append(standard.get(event.channel) or _event_polarization(event.channel))
    return out


def routing_acceptance_fraction(
    records: Sequence["TrajectoryRecord"],
    routing: Tuple[float, float] = None,
    rule: Optional[PostSelectionRule] = None,
    distinct_counters: bool = False,
) -> float:
    """
    Fração de trânsitos que produzem o padrão de detecção exigido quando
    cada fóton é roteado independentemente ao lado A ou B.

    Padrão: required_count - 1 fótons no lado A e 1 no lado B. Com
    `distinct_counters`, os fótons do lado A também precisam cair em
    contadores (polarizações) distintos. A média sobre as atribuições é
    exata (enumeração das 2^n possibilidades).
    """
    routing = routing or CORRELATION_CONFIG["routing_probabilities"]
    if len(routing) != 2:
        raise DomainError(f"Roteamento com dois lados esperado (recebido {routing})", {"routing": routing})
    p_a, p_b = (float(p) for p in routing)
    if abs(p_a + p_b - 1.0) > 1e-9 or min(p_a, p_b) < 0:
        raise ConfigurationError(f"Probabilidades de roteamento inválidas: {routing}", {"routing": routing})
    rule = rule or PostSelectionRule.from_config()
    if not records:
        return 0.0

    total = 0.0
    for record in records:
        polarizations = _photon_polarizations(record)
        n = len(polarizations)
        if n != rule.required_count:
            continue
        for sides in itertools.product((0, 1), repeat=n):
            side_a = [p for p, s in zip(polarizations, sides) if s == 0]
            if len(side_a) != rule.required_count - 1:
                continue
            if distinct_counters and len(set(side_a)) != len(side_a):
                continue
            total += p_a ** len(side_a) * p_b ** (n - len(side_a))
    return total / len(records)
