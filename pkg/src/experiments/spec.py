"""
Especificação de Experimentos
=============================

Arquivos de experimento em TOML (ou JSON, quando o texto começa com
'{'), validados por modelos pydantic com chaves desconhecidas proibidas.

Estrutura:
    kind = "ensemble"              # tipo do experimento
    preset = "ghz-lossless"        # opcional: base em presets/<nome>.toml

    [system]        f_g, f_e, n_max, cavity_modes
    [pulses.cavity] amplitude, center, fwhm, shape
    [pulses.pump]   idem
    [physics]       delta_plus, delta_minus, kappa, gamma, t_start, t_end
    [[initial_state]] state = ["g", -3, 0, 0], amplitude = [re, im]
    [ensemble]      n_traj, base_seed, grid_points, collapse
    [analyzer]      angles, theta, routing_probabilities
    [post_selection] required_count, max_hits_per_detector, distinct_analyzers, attribution
    [spectrum]      start, stop, points, reference_state, refine
    [dark_states]   manifolds, points
    [sweep]         parameter, values | (start, stop, num), target_state, method
    [output]        prefix

Valores do arquivo de preset são sobrescritos (mescla profunda) pelos do
arquivo do experimento.
"""

import json
import logging
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..basis import GROUND, LevelScheme
from ..config import CORRELATION_CONFIG, ENSEMBLE_CONFIG, PHYSICS_CONFIG, PRESETS_DIR
from ..correlations import PostSelectionRule
from ..exceptions import ConfigurationError, SimulationError
from ..hamiltonian import PulseProfile, SimulationConfig, initial_vector

logger = logging.getLogger(__name__)

EXPERIMENT_KINDS = (
    "spectrum",
    "dark-states",
    "landau-zener",
    "trajectory",
    "ensemble",
    "master",
    "sweep-detuning",
    "correlate-ghz",
    "correlate-atom-photon",
    "photon-histogram",
)

ExperimentKind = Literal[
    "spectrum",
    "dark-states",
    "landau-zener",
    "trajectory",
    "ensemble",
    "master",
    "sweep-detuning",
    "correlate-ghz",
    "correlate-atom-photon",
    "photon-histogram",
]

SweepParameter = Literal[
    "delta", "delta_plus", "delta_minus", "kappa", "cavity_amplitude", "coupling", "phi", "theta",
]

UNLIMITED = "unlimited"


# =============================================================================
# SEÇÕES
# =============================================================================

class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SystemSection(_Section):
    f_g: float = Field(PHYSICS_CONFIG["level_scheme"]["f_g"], ge=0)
    f_e: float = Field(PHYSICS_CONFIG["level_scheme"]["f_e"], ge=0)
    n_max: int = Field(PHYSICS_CONFIG["n_max"], ge=0, le=40)
    cavity_modes: Literal["both", "minus"] = PHYSICS_CONFIG["cavity_modes"]


class PulseSection(_Section):
    amplitude: float = Field(ge=0)
    center: float = 0.0
    fwhm: float = Field(1.0, gt=0)
    shape: Literal["gaussian", "constant"] = "gaussian"


class PulsesSection(_Section):
    cavity: PulseSection = Field(default_factory=lambda: PulseSection(**PHYSICS_CONFIG["cavity_pulse"]))
    pump: PulseSection = Field(default_factory=lambda: PulseSection(**PHYSICS_CONFIG["pump_pulse"]))


class PhysicsSection(_Section):
    delta_plus: float = PHYSICS_CONFIG["delta_plus"]
    delta_minus: float = PHYSICS_CONFIG["delta_minus"]
    kappa: float = Field(PHYSICS_CONFIG["kappa"], ge=0)
    gamma: float = Field(PHYSICS_CONFIG["gamma"], ge=0)
    t_start: float = PHYSICS_CONFIG["t_start"]
    t_end: float = PHYSICS_CONFIG["t_end"]

    @model_validator(mode="after")
    def _window(self):
        if self.t_end <= self.t_start:
            raise ValueError(f"t_end ({self.t_end}) deve ser maior que t_start ({self.t_start})")
        return self


class AmplitudeEntry(_Section):
    state: Tuple[Literal["g", "e"], float, int, int]
    amplitude: Tuple[float, float] = (1.0, 0.0)


class EnsembleSection(_Section):
    n_traj: int = Field(ENSEMBLE_CONFIG["n_traj"], ge=1)
    base_seed: int = Field(ENSEMBLE_CONFIG["base_seed"], ge=0)
    grid_points: int = Field(ENSEMBLE_CONFIG["grid_points"], ge=2)
    collapse: Literal["standard", "detector"] = "standard"


class AnalyzerSection(_Section):
    angles: List[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0], min_length=1)
    theta: Optional[float] = None
    routing_probabilities: Optional[Tuple[float, float]] = CORRELATION_CONFIG["routing_probabilities"]

    @model_validator(mode="after")
    def _routing(self):
        if self.routing_probabilities is not None:
            p_a, p_b = self.routing_probabilities
            if min(p_a, p_b) < 0 or abs(p_a + p_b - 1.0) > 1e-9:
                raise ValueError(f"routing_probabilities devem ser >= 0 e somar 1 (recebido {self.routing_probabilities})")
        return self


class PostSelectionSection(_Section):
    required_count: int = Field(CORRELATION_CONFIG["required_count"], ge=1)
    max_hits_per_detector: Optional[Union[int, Literal["unlimited"]]] = CORRELATION_CONFIG["max_hits_per_detector"]
    distinct_analyzers: bool = CORRELATION_CONFIG["distinct_analyzers"]
    attribution: Literal["channel", "order"] = CORRELATION_CONFIG["attribution"]

    @field_validator("max_hits_per_detector")
    @classmethod
    def _hits(cls, value):
        if value == UNLIMITED:
            return None
        if value is not None and value < 1:
            raise ValueError("max_hits_per_detector deve ser >= 1 ou 'unlimited'")
        return value


class SpectrumSection(_Section):
    start: Optional[float] = None
    stop: Optional[float] = None
    points: int = Field(201, ge=2)
    reference_state: Optional[str] = None
    refine: bool = True


class DarkStatesSection(_Section):
    manifolds: List[int] = Field(default_factory=lambda: [0, 1, 2], min_length=1)
    points: int = Field(201, ge=2)


class SweepSection(_Section):
    parameter: SweepParameter
    values: Optional[List[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    num: Optional[int] = Field(None, ge=1)
    target_state: str = "g0_0_3"
    method: Literal["master", "ensemble"] = "master"

    @model_validator(mode="after")
    def _values(self):
        if self.values is None:
            if self.start is None or self.stop is None or self.num is None:
                raise ValueError("sweep requer 'values' ou ('start', 'stop', 'num')")
        elif not self.values:
            raise ValueError("sweep.values não pode ser vazio")
        for v in self.resolved_values():
            if not math.isfinite(v):
                raise ValueError(f"Valor de sweep não finito: {v}")
        return self

    def resolved_values(self) -> List[float]:
        if self.values is not None:
            return [float(v) for v in self.values]
        return [float(v) for v in np.linspace(self.start, self.stop, self.num)]


class OutputSection(_Section):
    prefix: str = "outputs/run"


# =============================================================================
# ESPECIFICAÇÃO COMPLETA
# =============================================================================

class ExperimentSpec(_Section):
    """Especificação validada de um experimento, com todos os padrões resolvidos."""
    kind: ExperimentKind
    preset: Optional[str] = None
    description: str = ""
    system: SystemSection = Field(default_factory=SystemSection)
    pulses: PulsesSection = Field(default_factory=PulsesSection)
    physics: PhysicsSection = Field(default_factory=PhysicsSection)
    initial_state: List[AmplitudeEntry] = Field(default_factory=list)
    ensemble: EnsembleSection = Field(default_factory=EnsembleSection)
    analyzer: AnalyzerSection = Field(default_factory=AnalyzerSection)
    post_selection: PostSelectionSection = Field(default_factory=PostSelectionSection)
    spectrum: SpectrumSection = Field(default_factory=SpectrumSection)
    dark_states: DarkStatesSection = Field(default_factory=DarkStatesSection)
    sweep: Optional[SweepSection] = None
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="after")
    def _kind_requirements(self):
        try:
            scheme = LevelScheme(self.system.f_g, self.system.f_e)
        except SimulationError as e:
            raise ValueError(str(e)) from e
        if not self.initial_state:
            self.initial_state = [AmplitudeEntry(state=(GROUND, scheme.ground_ms[0], 0, 0))]
        # sem required_count explícito: um fóton por analisador
        if "required_count" not in self.post_selection.model_fields_set:
            self.post_selection.required_count = len(self.analyzer.angles)

        if self.kind == "sweep-detuning" and self.sweep is None:
            raise ValueError("kind 'sweep-detuning' requer a seção [sweep]")
        if self.sweep is not None and self.sweep.parameter in ("phi", "theta"):
            if self.kind not in ("correlate-ghz", "correlate-atom-photon"):
                raise ValueError(f"Eixo '{self.sweep.parameter}' só se aplica a experimentos de correlação")
            if self.sweep.parameter == "theta" and self.kind != "correlate-atom-photon":
                raise ValueError("Eixo 'theta' só se aplica a 'correlate-atom-photon'")
        if self.kind == "correlate-atom-photon":
            sweeps_theta = self.sweep is not None and self.sweep.parameter == "theta"
            if self.analyzer.theta is None and not sweeps_theta:
                raise ValueError("'correlate-atom-photon' requer analyzer.theta ou sweep de 'theta'")
        # normalização e estados fora da base são erros de leitura
        try:
            cfg = self.simulation_config()
            initial_vector(cfg, cfg.build_basis())
        except SimulationError as e:
            raise ValueError(str(e)) from e
        return self

    def simulation_config(self, **updates) -> SimulationConfig:
        values = dict(
            scheme=LevelScheme(self.system.f_g, self.system.f_e),
            n_max=self.system.n_max,
            cavity_pulse=PulseProfile(**self.pulses.cavity.model_dump()),
            pump_pulse=PulseProfile(**self.pulses.pump.model_dump()),
            delta_plus=self.physics.delta_plus,
            delta_minus=self.physics.delta_minus,
            kappa=self.physics.kappa,
            gamma=self.physics.gamma,
            t_start=self.physics.t_start,
            t_end=self.physics.t_end,
            initial_state=tuple(
                ((level, m, n_plus, n_minus), complex(*entry.amplitude))
                for entry in self.initial_state
                for level, m, n_plus, n_minus in [entry.state]
            ),
            cavity_modes=self.system.cavity_modes,
        )
        values.update(updates)
        return SimulationConfig(**values)

    def post_selection_rule(self) -> PostSelectionRule:
        return PostSelectionRule(**self.post_selection.model_dump())

    def echo(self) -> dict:
        """Configuração resolvida; reprocessada por parse_experiment gera a mesma spec."""
        return self.model_dump(mode="json")


# =============================================================================
# LEITURA
# =============================================================================

def _deep_merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def available_presets(presets_dir: Path = None) -> List[str]:
    presets_dir = Path(presets_dir or PRESETS_DIR)
    return sorted(p.stem for p in presets_dir.glob("*.toml"))


def _load_text(text: str) -> dict:
    try:
        if text.lstrip().startswith("{"):
            return json.loads(text)
        return tomllib.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Arquivo de experimento inválido: {e}") from e


def _resolve_presets(data: dict, presets_dir: Path, chain: Tuple[str, ...] = ()) -> dict:
    name = data.get("preset")
    if not name:
        return data
    if name in chain:
        raise ConfigurationError(f"Presets em ciclo: {' -> '.join(chain + (name,))}")
    path = presets_dir / f"{name}.toml"
    if not path.exists():
        raise ConfigurationError(
            f"Preset desconhecido: {name!r}. Disponíveis: {available_presets(presets_dir)}",
            {"preset": name},
        )
    base = _resolve_presets(_load_text(path.read_text(encoding="utf-8")), presets_dir, chain + (name,))
    merged = _deep_merge(base, data)
    merged["preset"] = name
    return merged


def _format_validation_error(error: ValidationError) -> str:
    unknown, missing, invalid = [], [], []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"])
        if item["type"] == "extra_forbidden":
            unknown.append(location)
        elif item["type"] == "missing":
            missing.append(location)
        else:
            invalid.append(f"{location}: {item['msg']} (recebido {item.get('input')!r})")
    parts = []
    if unknown:
        parts.append(f"chaves desconhecidas: {', '.join(unknown)}")
    if missing:
        parts.append(f"chaves obrigatórias ausentes: {', '.join(missing)}")
    if invalid:
        parts.append("valores inválidos: " + "; ".join(invalid))
    return "; ".join(parts)


def parse_experiment(text: str, presets_dir: Path = None, overrides: dict = None) -> ExperimentSpec:
    """
    Lê e valida um experimento.

    Args:
        overrides: Valores aplicados por último (mescla profunda), ex.
            {"kind": "master", "ensemble": {"base_seed": 7}} vindos da linha de comando

    Raises:
        ConfigurationError: sintaxe inválida, chaves desconhecidas ou
            ausentes, valores fora dos limites
    """
    presets_dir = Path(presets_dir or PRESETS_DIR)
    data = _resolve_presets(_load_text(text), presets_dir)
    if overrides:
        data = _deep_merge(data, overrides)
    try:
        spec = ExperimentSpec.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"Experimento inválido: {_format_validation_error(e)}", {"errors": e.errors()}) from e
    logger.debug(f"Experimento '{spec.kind}' lido (preset={spec.preset})")
    return spec


def load_experiment(path: Union[str, Path], presets_dir: Path = None, overrides: dict = None) -> ExperimentSpec:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Arquivo de experimento não encontrado: {path}", {"path": str(path)})
    return parse_experiment(path.read_text(encoding="utf-8"), presets_dir, overrides)


def apply_sweep_value(cfg: SimulationConfig, parameter: str, value: float) -> SimulationConfig:
    """Aplica um valor do eixo de varredura aos parâmetros físicos."""
    if parameter == "delta":
        return cfg.with_updates(delta_plus=value, delta_minus=value)
    if parameter in ("delta_plus", "delta_minus", "kappa"):
        return cfg.with_updates(**{parameter: value})
    if parameter == "cavity_amplitude":
        return cfg.with_updates(cavity_pulse=PulseProfile(**{**cfg.cavity_pulse.to_dict(), "amplitude": value}))
    if parameter == "coupling":
        return cfg.with_updates(
            cavity_pulse=PulseProfile(**{**cfg.cavity_pulse.to_dict(), "amplitude": value}),
            pump_pulse=PulseProfile(**{**cfg.pump_pulse.to_dict(), "amplitude": 2.0 * value}),
        )
    raise ConfigurationError(f"Parâmetro {parameter!r} não altera a física", {"parameter": parameter})
