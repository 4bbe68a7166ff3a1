"""
Experimentos: especificação em TOML, execução e artefatos reprodutíveis.
"""

from .spec import (
    EXPERIMENT_KINDS,
    ExperimentSpec,
    apply_sweep_value,
    available_presets,
    load_experiment,
    parse_experiment,
)
from .writers import atomic_write_bytes, file_digest, to_jsonable, write_json, write_jsonl, write_table
from .runner import STATUS_CUTOFF_LEAKAGE, OutputFile, RunManifest, RunOptions, run_experiment, sweep_detuning
from .cli import build_parser, main

__all__ = [
    "EXPERIMENT_KINDS",
    "ExperimentSpec",
    "apply_sweep_value",
    "available_presets",
    "load_experiment",
    "parse_experiment",
    "atomic_write_bytes",
    "file_digest",
    "to_jsonable",
    "write_json",
    "write_jsonl",
    "write_table",
    "STATUS_CUTOFF_LEAKAGE",
    "OutputFile",
    "RunManifest",
    "RunOptions",
    "run_experiment",
    "sweep_detuning",
    "build_parser",
    "main",
]
