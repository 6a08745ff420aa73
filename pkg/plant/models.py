"""
Procédés en forme strict-feedback avec dynamiques non modélisées
"""
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from django.db import models

from core.exceptions import InvalidParameters
from core.models import BaseRecord, as_vector, require_nonnegative, require_positive


class PlantChoice(models.TextChoices):
    EXAMPLE1 = 'example1', 'Procédé du premier ordre'
    EXAMPLE2 = 'example2', 'Procédé du second ordre avec dynamiques non modélisées'


@dataclass(frozen=True)
class DynamicSignal(BaseRecord):
    """Signal dynamique r : ṙ = −c̄r + Ῡ(x₁) + d, r(0) = r0"""
    c_bar: float
    d: float
    upsilon_bar: Callable[[float], float]
    r0: float = 0.0

    def __post_init__(self):
        require_positive('c_bar', self.c_bar)
        require_nonnegative('d', self.d)
        require_nonnegative('r0', self.r0)

    def rhs(self, r, x1):
        return -self.c_bar * r + self.upsilon_bar(x1) + self.d


@dataclass(frozen=True)
class ReferenceSignal(BaseRecord):
    """Trajectoire de référence y_d et ses deux premières dérivées analytiques"""
    y_d: Callable[[float], float]
    y_d_dot: Callable[[float], float]
    y_d_ddot: Callable[[float], float]


@dataclass(frozen=True)
class PlantKnowledge(BaseRecord):
    """
    Ce que le concepteur connaît du procédé : dimensions, bornes inférieures
    des gains, régresseurs, enveloppes ψ et paramètres du signal dynamique
    """
    n: int
    gain_lower: Tuple[float, ...]
    regressor: Callable
    regressor_dim: Tuple[int, ...]
    psi1: Callable
    psi2: Callable
    dyn_signal: Optional[DynamicSignal] = None


@dataclass(frozen=True)
class PlantModel(BaseRecord):
    """
    Procédé ẋᵢ = gᵢxᵢ₊₁ + θᵢᵀφᵢ + Δᵢ, ẋₙ = gₙu + θₙᵀφₙ + Δₙ, ξ̇ = q(t, ξ, x)

    Les indices i des fonctions sont comptés à partir de 1 ; x est passé en
    entier, chaque fonction n'en lit que les i premières composantes.
    """
    name: str
    n: int
    n0: int
    gain_lower: Tuple[float, ...]
    gain_upper: Tuple[float, ...]
    true_gain: Callable
    true_param_term: Callable
    regressor: Callable
    regressor_dim: Tuple[int, ...]
    uncertainty: Callable
    psi1: Callable
    psi2: Callable
    unmodeled_rhs: Optional[Callable] = None
    dyn_signal: Optional[DynamicSignal] = None
    uncertainty_bound: Optional[Callable] = None

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameters(f"L'ordre n doit être ≥ 1 (reçu {self.n})")
        if self.n0 < 0:
            raise InvalidParameters(f"n0 doit être ≥ 0 (reçu {self.n0})")
        if self.n0 and self.unmodeled_rhs is None:
            raise InvalidParameters("n0 > 0 exige une dynamique non modélisée `unmodeled_rhs`")
        lower = as_vector('gain_lower', self.gain_lower, self.n)
        upper = as_vector('gain_upper', self.gain_upper, self.n)
        for k, (lo, hi) in enumerate(zip(lower, upper), start=1):
            if lo > hi:
                raise InvalidParameters(f"g̲{k}={lo} dépasse ḡ{k}={hi}")
        dims = tuple(int(v) for v in self.regressor_dim)
        if len(dims) != self.n or min(dims) < 1:
            raise InvalidParameters(f"regressor_dim doit contenir {self.n} entier(s) ≥ 1 (reçu {self.regressor_dim})")
        object.__setattr__(self, 'gain_lower', lower)
        object.__setattr__(self, 'gain_upper', upper)
        object.__setattr__(self, 'regressor_dim', dims)

    def knowledge(self):
        """Sous-ensemble visible par le contrôleur"""
        return PlantKnowledge(
            n=self.n,
            gain_lower=self.gain_lower,
            regressor=self.regressor,
            regressor_dim=self.regressor_dim,
            psi1=self.psi1,
            psi2=self.psi2,
            dyn_signal=self.dyn_signal,
        )
