"""
Fonctions performance-taux : entonnoir ρ(t), gain σ₁(t), fuite σ₂(t) et ε(t)
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

from django.db import models

from core.exceptions import InvalidParameters
from core.models import BaseRecord, require_nonnegative, require_positive
from perf_rate import rates

logger = logging.getLogger(__name__)


class Direction(models.TextChoices):
    DECREASING = 'decreasing', 'Décroissante (entonnoir ρ)'
    INCREASING = 'increasing', 'Croissante (gain σ)'


class EpsForm(models.TextChoices):
    EXPONENTIAL = 'exponential', 'Exponentielle exp(−a·t)'
    CUSTOM = 'custom', 'Personnalisée'


@dataclass(frozen=True)
class PerfRateParams(BaseRecord):
    """Paramètres (μ₀, μ_T, T, υ) d'une fonction performance-taux"""
    mu0: float
    muT: float
    T: float
    upsilon: float

    def __post_init__(self):
        for name in ('mu0', 'muT', 'T', 'upsilon'):
            require_positive(name, getattr(self, name))
        if self.mu0 == self.muT:
            logger.warning(f"μ₀ = μ_T = {self.mu0} : la fonction performance-taux est constante")


@dataclass(frozen=True)
class PerfRateFn(BaseRecord):
    """
    Fonction performance-taux C¹ : μ(0)=μ₀, μ(t)=μ_T pour t ≥ T, μ̇(0)=0,
    strictement monotone sur [0, T) dans la direction déclarée
    """
    params: PerfRateParams
    direction: str

    def __post_init__(self):
        p = self.params
        if self.direction == Direction.DECREASING and p.mu0 < p.muT:
            raise InvalidParameters(f"Entonnoir décroissant : μ₀={p.mu0} doit dépasser μ_T={p.muT}")
        if self.direction == Direction.INCREASING and p.mu0 > p.muT:
            raise InvalidParameters(f"Gain croissant : μ₀={p.mu0} doit être inférieur à μ_T={p.muT}")

    @classmethod
    def funnel(cls, rho0, rhoT, T, upsilon):
        """Entonnoir ρ(t) de ρ₀ vers ρ_T"""
        return cls(PerfRateParams(rho0, rhoT, T, upsilon), Direction.DECREASING)

    @classmethod
    def rate(cls, sigma_bar, T, upsilon):
        """Gain σ₁(t) de 1 vers σ̄"""
        return cls(PerfRateParams(1.0, sigma_bar, T, upsilon), Direction.INCREASING)

    def value(self, t):
        return rates.eval_mu(self, t)

    def derivative(self, t):
        return rates.eval_mu_dot(self, t)

    def values(self, t):
        return rates.mu_values(self, t)

    def derivatives(self, t):
        return rates.mu_dot_values(self, t)


@dataclass(frozen=True)
class EpsSchedule(BaseRecord):
    """
    Fonction ε(t) > 0 intégrable, bornée en dessous par `floor`

    `smoothing_floor` ne borne que l'ε des lissages √(·²+ε²) de la loi de
    commande ; la fuite σ₂ garde la décroissance complète.
    """
    form: str = EpsForm.EXPONENTIAL
    decay: float = 0.1
    floor: float = 1e-12
    custom: Optional[Callable[[float], float]] = None
    smoothing_floor: float = 0.0

    def __post_init__(self):
        require_positive('floor', self.floor)
        require_nonnegative('smoothing_floor', self.smoothing_floor)
        if self.smoothing_floor > 1.0:
            raise InvalidParameters(f"smoothing_floor doit rester ≤ ε(0) = 1 (reçu {self.smoothing_floor})")
        if self.form == EpsForm.EXPONENTIAL:
            require_positive('decay', self.decay)
        elif self.form == EpsForm.CUSTOM:
            if self.custom is None:
                raise InvalidParameters("Une forme ε personnalisée exige une fonction `custom`")
            start = self.custom(0.0)
            if start != 1.0:
                logger.warning(f"ε(0) = {start} ≠ 1 : σ₂ sera discontinue en T")
        else:
            raise InvalidParameters(f"Forme ε inconnue : {self.form}")

    @classmethod
    def exponential(cls, decay, floor=1e-12, smoothing_floor=0.0):
        return cls(EpsForm.EXPONENTIAL, decay, floor, smoothing_floor=smoothing_floor)

    def raw(self, t):
        """ε(t) sans plancher"""
        if self.form == EpsForm.EXPONENTIAL:
            return math.exp(-self.decay * t)
        return self.custom(t)

    def value(self, t):
        return max(self.raw(t), self.floor)

    def smoothing(self, t):
        """ε des lissages de la loi : max(ε(t), smoothing_floor)"""
        return max(self.raw(t), self.floor, self.smoothing_floor)

    def integral(self, horizon):
        """∫₀^H ε, forme fermée pour la forme exponentielle"""
        if self.form != EpsForm.EXPONENTIAL:
            raise InvalidParameters("Intégrale fermée disponible pour la forme exponentielle uniquement")
        return (1.0 - math.exp(-self.decay * horizon)) / self.decay


@dataclass(frozen=True)
class GainSchedule(BaseRecord):
    """
    σ₁ (gain de taux) et σ₂ (fuite) : σ₂ = σ₁ avant T, σ̄·ε(t−T) ensuite
    """
    sigma1: PerfRateFn
    eps: EpsSchedule
    T: float

    def __post_init__(self):
        if self.sigma1.direction != Direction.INCREASING:
            raise InvalidParameters("σ₁ doit être une fonction croissante")
        if self.sigma1.params.T != self.T:
            raise InvalidParameters(f"σ₁ figée en {self.sigma1.params.T} au lieu de T={self.T}")

    @property
    def sigma_bar(self):
        return self.sigma1.params.muT

    def sigma1_value(self, t):
        return self.sigma1.value(t)

    def sigma2(self, t):
        return rates.eval_sigma2(self, t)
