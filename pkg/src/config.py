"""
Configurações do Simulador de Passagem Adiabática
==================================================

Este arquivo contém todas as configurações padrão do simulador,
com justificativas físicas e numéricas para cada escolha.

Unidades: Γ = 1 (taxa de emissão espontânea) e ħ = 1. Tempos em Γ⁻¹,
taxas e energias em Γ.
"""

import math
import os
from pathlib import Path

# Carregar variáveis de ambiente (opcional)
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass  # python-dotenv não é obrigatório

# =============================================================================
# CAMINHOS DO PROJETO
# =============================================================================
PROJECT_ROOT = Path(__file__).parent.parent
PRESETS_DIR = PROJECT_ROOT / "presets"

# =============================================================================
# 1. MODELO FÍSICO
# =============================================================================
"""
JUSTIFICATIVA - PARÂMETROS FÍSICOS PADRÃO:

1. ESQUEMA DE NÍVEIS:
   - Transição F_g = 3 -> F_e = 3 (hiperfina do césio)
   - Bombeio π não acopla m_g = 0 (coeficiente de Clebsch-Gordan nulo),
     de modo que a passagem termina sempre em |g_0>

2. PULSOS:
   - Gaussianas com FWHM 10 Γ⁻¹
   - Cavidade centrada em 17 Γ⁻¹, bombeio em 23 Γ⁻¹
     (deslocamento de 0.6 w ao longo do feixe atômico)
   - Amplitudes g₀ = 25 Γ e Ω₀ = 50 Γ

3. CORTE DE FÓTONS:
   - n_max = 6 por modo é suficiente para os espectros
   - A população na camada n = n_max é monitorada durante as simulações

4. JANELA TEMPORAL:
   - [0, 40] Γ⁻¹ cobre os dois pulsos até abaixo de 10⁻⁴ do pico
"""

PHYSICS_CONFIG = {
    "level_scheme": {"f_g": 3, "f_e": 3},
    "n_max": 6,
    "cavity_pulse": {"amplitude": 25.0, "center": 17.0, "fwhm": 10.0, "shape": "gaussian"},
    "pump_pulse": {"amplitude": 50.0, "center": 23.0, "fwhm": 10.0, "shape": "gaussian"},
    "delta_plus": 0.0,
    "delta_minus": 0.0,
    "kappa": 0.0,
    "gamma": 1.0,
    "t_start": 0.0,
    "t_end": 40.0,
    "cavity_modes": "both",  # "both" ou "minus" (apenas σ-)
}

# =============================================================================
# 2. MÉTODOS NUMÉRICOS
# =============================================================================
"""
JUSTIFICATIVA - INTEGRADORES E TOLERÂNCIAS:

1. TRAJETÓRIAS (MCWF):
   - Runge-Kutta adaptativo 4(5) (scipy.integrate.solve_ivp, RK45)
   - Tolerância relativa 10⁻⁸
   - Instante do salto localizado pelo evento ||ψ||² = r do integrador

2. EQUAÇÃO MESTRA:
   - Matriz densidade densa, apenas no subespaço alcançável
   - Limite de dimensão 1200 (memória ~ dim²)
   - Desvio do traço acima de 10⁻⁶ é tratado como erro

3. MODELO DE LANDAU-ZENER:
   - RK4 de passo fixo, passo <= 10⁻³ Γ⁻¹

4. CRUZAMENTOS EVITADOS:
   - Refinamento até 10⁻⁴ Γ⁻¹ (o menor gap é da ordem de 3.5 x 10⁻⁴ Γ)

5. RASTREAMENTO DE NÍVEIS:
   - Sobreposição mínima 0.5 para continuidade (abaixo disso: descontinuidade)
"""

NUMERICS_CONFIG = {
    # Trajetórias
    "rtol": 1e-8,
    "atol": 1e-10,
    "jump_tolerance": 1e-9,
    "zero_rate_threshold": 1e-14,

    # Equação mestra
    "max_dense_dimension": 1200,
    "trace_tolerance": 1e-6,
    "me_rtol": 1e-8,
    "me_atol": 1e-10,

    # Espectro e Landau-Zener
    "lz_max_step": 1e-3,
    "gap_resolution": 1e-4,
    "track_min_overlap": 0.5,
    "hermiticity_tolerance": 1e-12,

    # Corte de fótons
    "leakage_threshold": 1e-6,
}

# =============================================================================
# 3. ENSEMBLE MONTE CARLO
# =============================================================================
"""
JUSTIFICATIVA - REPRODUTIBILIDADE:

1. GERADOR:
   - Philox (baseado em contador, 64 bits), via numpy.random
   - Semente por trajetória derivada de (semente base, índice) com SeedSequence

2. REDUÇÃO DETERMINÍSTICA:
   - Trajetórias agrupadas em blocos de tamanho fixo
   - Somas combinadas na ordem dos índices, independente do paralelismo

3. GRADE DE SAÍDA:
   - 400 pontos uniformes na janela de simulação
"""

ENSEMBLE_CONFIG = {
    "n_traj": 2000,
    "base_seed": 20240101,
    "grid_points": 400,
    "chunk_size": 25,
    "rng_algorithm": "Philox",
    "jobs": None,  # None = todos os núcleos disponíveis
    "show_progress": True,
}

# =============================================================================
# 4. CORRELAÇÕES GHZ
# =============================================================================
"""
JUSTIFICATIVA - PÓS-SELEÇÃO E ROTEAMENTO:

1. PÓS-SELEÇÃO:
   - Exatamente 3 fótons (2 no esquema átomo-fóton)
   - No máximo um clique por detector
   - Cada analisador recebe exatamente um fóton

2. ROTEAMENTO:
   - Espelho A com transmissão duas vezes a do espelho B
   - Probabilidades por fóton: A = 2/3, B = 1/3
"""

CORRELATION_CONFIG = {
    "required_count": 3,
    "max_hits_per_detector": 1,
    "distinct_analyzers": True,
    "attribution": "channel",  # "channel" ou "order"
    "routing_probabilities": (2.0 / 3.0, 1.0 / 3.0),
    "residual_threshold": 1e-6,
}

# =============================================================================
# 5. SAÍDAS
# =============================================================================
OUTPUT_CONFIG = {
    "artifact_version": "1.0.0",
    "float_format": "%.17g",
    "min_output_population": 1e-12,
    "table_suffix": ".csv",
    "records_suffix": ".jsonl",
    "manifest_suffix": ".manifest.json",
}

# =============================================================================
# 6. LOGGING
# =============================================================================
LOGGING_CONFIG = {
    "level": "INFO",
    "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
}

# =============================================================================
# SOBRESCRITAS POR VARIÁVEIS DE AMBIENTE
# =============================================================================
if os.getenv("SIMULATE_SEED"):
    ENSEMBLE_CONFIG["base_seed"] = int(os.getenv("SIMULATE_SEED"))
if os.getenv("SIMULATE_JOBS"):
    ENSEMBLE_CONFIG["jobs"] = int(os.getenv("SIMULATE_JOBS"))
if os.getenv("SIMULATE_N_TRAJ"):
    ENSEMBLE_CONFIG["n_traj"] = int(os.getenv("SIMULATE_N_TRAJ"))
if os.getenv("SIMULATE_LOG_LEVEL"):
    LOGGING_CONFIG["level"] = os.getenv("SIMULATE_LOG_LEVEL").upper()

# Constante da largura de pulso gaussiana (FWHM -> expoente)
GAUSSIAN_FWHM_FACTOR = 4.0 * math.log(2.0)
