"""
Script para executar experimentos do simulador.

Uso:
    python simulate.py ensemble --preset ghz-lossless --traj 200 --out outputs/ghz
    python simulate.py spectrum --config presets/spectrum-single.toml --out outputs/spectrum

Os arquivos <prefixo>.csv, <prefixo>.jsonl e <prefixo>.manifest.json
são escritos ao final de cada execução.
"""

import sys

from src.experiments.cli import main

if __name__ == "__main__":
    print("=" * 60)
    print("Simulador de Passagem Adiabática em Cavidade")
    print("=" * 60)
    sys.exit(main())
