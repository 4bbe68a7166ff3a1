"""
Interface de Linha de Comando
=============================

Uso:
    simulate <kind> (--config ARQUIVO | --preset NOME) [--seed N] [--traj N]
             [--jobs N] [--out PREFIXO] [--log-level NÍVEL] [--quiet]

Precedência para semente, trajetórias e processos: linha de comando,
depois variáveis de ambiente (SIMULATE_SEED, SIMULATE_N_TRAJ,
SIMULATE_JOBS), depois o arquivo do experimento.

Códigos de saída: 0 sucesso, 1 falha da simulação, 2 configuração inválida.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from ..config import LOGGING_CONFIG
from ..exceptions import ConfigurationError, SimulationError
from .runner import STATUS_CUTOFF_LEAKAGE, RunOptions, run_experiment
from .spec import EXPERIMENT_KINDS, available_presets, load_experiment, parse_experiment

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIGURATION = 2

_ENV_OVERRIDES = {"base_seed": "SIMULATE_SEED", "n_traj": "SIMULATE_N_TRAJ"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Passagem adiabática em cavidade: estados de Fock, estados GHZ e correlações.",
    )
    parser.add_argument("kind", choices=EXPERIMENT_KINDS, help="Tipo do experimento")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", help="Arquivo do experimento (TOML ou JSON)")
    source.add_argument("--preset", help=f"Preset em presets/ ({', '.join(available_presets())})")
    parser.add_argument("--seed", type=int, help="Semente base do ensemble")
    parser.add_argument("--traj", type=int, help="Número de trajetórias")
    parser.add_argument("--jobs", type=int, help="Processos paralelos (padrão: núcleos disponíveis)")
    parser.add_argument("--out", help="Prefixo dos arquivos de saída")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING ou ERROR")
    parser.add_argument("--quiet", action="store_true", help="Sem barras de progresso")
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    """Sobrescritas da linha de comando e do ambiente, na ordem de precedência."""
    ensemble = {}
    for key, variable in _ENV_OVERRIDES.items():
        if os.getenv(variable):
            ensemble[key] = int(os.getenv(variable))
    if args.seed is not None:
        ensemble["base_seed"] = args.seed
    if args.traj is not None:
        ensemble["n_traj"] = args.traj

    overrides = {"kind": args.kind}
    if ensemble:
        overrides["ensemble"] = ensemble
    if args.out:
        overrides["output"] = {"prefix": args.out}
    return overrides


def _configure_logging(level: Optional[str]) -> None:
    level = (level or LOGGING_CONFIG["level"]).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOGGING_CONFIG["format"])


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.log_level)

    try:
        overrides = _overrides(args)
        if args.config:
            spec = load_experiment(args.config, overrides=overrides)
        else:
            spec = parse_experiment(f'preset = "{args.preset}"', overrides=overrides)
    except (ConfigurationError, ValueError) as e:
        logger.error(f"Configuração inválida: {e}")
        return EXIT_CONFIGURATION

    options = RunOptions(jobs=args.jobs, show_progress=not args.quiet and sys.stderr.isatty())
    try:
        manifest = run_experiment(spec, options=options)
    except ConfigurationError as e:
        logger.error(f"Configuração inválida: {e}")
        return EXIT_CONFIGURATION
    except SimulationError as e:
        logger.error(f"Simulação falhou: {e}")
        return EXIT_FAILURE

    for output in manifest.outputs:
        logger.info(f"  {output.path}  sha256={output.sha256[:12]}")
    if manifest.status == STATUS_CUTOFF_LEAKAGE:
        logger.warning(f"Corte de fótons insuficiente: {len(manifest.warnings)} aviso(s) no manifesto; aumente n_max")
    return EXIT_OK
