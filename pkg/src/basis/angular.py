"""
Momento Angular e Coeficientes de Clebsch-Gordan
================================================

Coeficientes ⟨F_g m_g; 1 σ | F_e m_e⟩ do acoplamento de dipolo, na
convenção de Condon-Shortley.

Estratégia:
- Fórmula fechada de Racah avaliada em aritmética racional exata
  (fractions.Fraction) para o quadrado do coeficiente
- Uma única raiz quadrada em ponto flutuante no final (erro <= 1 ulp)
- Sinais exatos, essenciais para a interferência entre caminhos

Números quânticos semi-inteiros são tratados internamente pelo dobro
(2F, 2m), sempre inteiros.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Tuple, Union

from ..exceptions import DomainError

logger = logging.getLogger(__name__)

Number = Union[int, float]

SIGMAS = (-1, 0, 1)


def _doubled(value: Number, name: str) -> int:
    """Retorna 2*value como inteiro, ou DomainError se não for (semi-)inteiro."""
    twice = round(2 * value)
    if abs(2 * value - twice) > 1e-9:
        raise DomainError(
            f"{name} = {value} não é inteiro nem semi-inteiro",
            {name: value},
        )
    return int(twice)


def _from_doubled(twice: int) -> Number:
    return twice // 2 if twice % 2 == 0 else twice / 2


def magnetic_numbers(f: Number) -> Tuple[Number, ...]:
    """Valores de m para o momento angular f, em ordem crescente."""
    df = _doubled(f, "F")
    return tuple(_from_doubled(-df + 2 * k) for k in range(df + 1))


@dataclass(frozen=True)
class LevelScheme:
    """
    Par de níveis F_g -> F_e (ou J_g -> J_e).

    Attributes:
        f_g: Momento angular do nível fundamental
        f_e: Momento angular do nível excitado
    """
    f_g: Number
    f_e: Number

    def __post_init__(self):
        for name in ("f_g", "f_e"):
            value = getattr(self, name)
            _doubled(value, name)
            if value < 0:
                raise DomainError(f"{name} deve ser >= 0 (recebido {value})", {name: value})
        if abs(self.f_g - self.f_e) > 1:
            raise DomainError(
                f"Transição {self.f_g} -> {self.f_e} viola |F_g - F_e| <= 1",
                {"f_g": self.f_g, "f_e": self.f_e},
            )
        if self.f_g == 0 and self.f_e == 0:
            raise DomainError("Transição 0 -> 0 é proibida por dipolo")

    @property
    def ground_ms(self) -> Tuple[Number, ...]:
        return magnetic_numbers(self.f_g)

    @property
    def excited_ms(self) -> Tuple[Number, ...]:
        return magnetic_numbers(self.f_e)

    @property
    def n_ground(self) -> int:
        return _doubled(self.f_g, "f_g") + 1

    @property
    def n_excited(self) -> int:
        return _doubled(self.f_e, "f_e") + 1

    @property
    def n_levels(self) -> int:
        return self.n_ground + self.n_excited

    def label(self) -> str:
        return f"{self.f_g:g}->{self.f_e:g}"

    def to_dict(self) -> dict:
        return {"f_g": self.f_g, "f_e": self.f_e}


def _half_factorial(twice: int) -> int:
    return math.factorial(twice // 2)


@lru_cache(maxsize=4096)
def _racah(dj1: int, dm1: int, dj2: int, dm2: int, dj: int, dm: int) -> Tuple[int, Fraction]:
    """
    Fórmula de Racah para ⟨j1 m1; j2 m2 | J M⟩ com argumentos dobrados.

    Returns:
        (sinal, quadrado exato do coeficiente); (0, 0) quando nulo
    """
    if dm != dm1 + dm2:
        return 0, Fraction(0)
    if abs(dm1) > dj1 or abs(dm2) > dj2 or abs(dm) > dj:
        return 0, Fraction(0)
    if not abs(dj1 - dj2) <= dj <= dj1 + dj2 or (dj1 + dj2 + dj) % 2:
        return 0, Fraction(0)

    f = _half_factorial
    prefactor = Fraction(
        (dj + 1) * f(dj + dj1 - dj2) * f(dj - dj1 + dj2) * f(dj1 + dj2 - dj),
        f(dj1 + dj2 + dj + 2),
    )
    prefactor *= (
        f(dj + dm) * f(dj - dm) * f(dj1 - dm1) * f(dj1 + dm1) * f(dj2 - dm2) * f(dj2 + dm2)
    )

    # Limites de k em que todos os fatoriais têm argumento >= 0
    a1 = (dj1 + dj2 - dj) // 2
    a2 = (dj1 - dm1) // 2
    a3 = (dj2 + dm2) // 2
    b1 = (dj - dj2 + dm1) // 2
    b2 = (dj - dj1 - dm2) // 2
    total = Fraction(0)
    for k in range(max(0, -b1, -b2), min(a1, a2, a3) + 1):
        denominator = (
            math.factorial(k)
            * math.factorial(a1 - k)
            * math.factorial(a2 - k)
            * math.factorial(a3 - k)
            * math.factorial(b1 + k)
            * math.factorial(b2 + k)
        )
        total += Fraction((-1) ** k, denominator)

    if total == 0:
        return 0, Fraction(0)
    return (1 if total > 0 else -1), prefactor * total * total


def cg_coefficient(f_g: Number, m_g: Number, sigma: int, f_e: Number, m_e: Number) -> float:
    """
    Coeficiente ⟨F_g m_g; 1 σ | F_e m_e⟩.

    Retorna zero fora das regras de seleção (m_e != m_g + σ, |m| > F,
    triângulo violado). Paridades incompatíveis entre F e m levantam
    DomainError.
    """
    if sigma not in SIGMAS:
        raise DomainError(f"σ deve ser -1, 0 ou +1 (recebido {sigma})", {"sigma": sigma})
    dfg = _doubled(f_g, "f_g")
    dfe = _doubled(f_e, "f_e")
    dmg = _doubled(m_g, "m_g")
    dme = _doubled(m_e, "m_e")
    if dfg < 0 or dfe < 0:
        raise DomainError("Momentos angulares devem ser >= 0", {"f_g": f_g, "f_e": f_e})
    if (dfg - dmg) % 2 or (dfe - dme) % 2:
        raise DomainError(
            f"Paridades incompatíveis: F_g={f_g}, m_g={m_g}, F_e={f_e}, m_e={m_e}",
            {"f_g": f_g, "m_g": m_g, "f_e": f_e, "m_e": m_e},
        )

    sign, square = _racah(dfg, dmg, 2, 2 * sigma, dfe, dme)
    if sign == 0:
        return 0.0
    return sign * math.sqrt(square)
