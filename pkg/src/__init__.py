"""
Simulador de Passagem Adiabática em Cavidade
============================================

Síntese de estados de Fock e de estados GHZ de fótons por passagem
adiabática de um átomo multinível através de uma cavidade óptica
bimodal, com trajetórias quânticas e equação mestra.

Módulos:
- basis: Clebsch-Gordan, base |x_m, n+, n-⟩ e operadores esparsos
- hamiltonian: Pulsos, H_int e H_eff
- spectral: Espectro instantâneo, estados escuros e modelo de Landau-Zener
- dynamics: Trajetórias quânticas, ensemble e equação mestra
- correlations: Observáveis GHZ e estimadores de correlação
- experiments: Especificação, execução e escrita de artefatos
"""

__version__ = "1.0.0"
