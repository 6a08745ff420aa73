"""
Gains, état intégré et espace de travail de la commande DSC adaptative
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

from core.exceptions import InvalidParameters
from core.models import BaseRecord, as_vector, require_positive
from perf_rate.models import EpsSchedule, GainSchedule, PerfRateFn

logger = logging.getLogger(__name__)

# Garde de la barrière : |z₁| ≥ 1 − GUARD_DELTA déclenche FunnelViolation
GUARD_DELTA = 1e-9


@dataclass(frozen=True)
class ControllerGains(BaseRecord):
    """
    Gains par étape (ς_z, ς_ω, ι_ϑ, ι_γ), σ̄, temps prescrit T, entonnoir
    (ρ₀, ρ_T, υ_ρ), forme υ_σ du gain de taux et schéma ε
    """
    varsigma_z: Tuple[float, ...]
    varsigma_w: Tuple[float, ...]
    iota_theta: Tuple[float, ...]
    iota_gamma: Tuple[float, ...]
    sigma_bar: float
    T: float
    rho0: float
    rhoT: float
    upsilon_rho: float
    upsilon_sigma: float
    eps: EpsSchedule = field(default_factory=lambda: EpsSchedule.exponential(0.1))

    def __post_init__(self):
        n = len(self.varsigma_z)
        if n < 1:
            raise InvalidParameters("varsigma_z doit contenir au moins une valeur")
        object.__setattr__(self, 'varsigma_z', as_vector('varsigma_z', self.varsigma_z, n))
        object.__setattr__(self, 'varsigma_w', as_vector('varsigma_w', self.varsigma_w, n - 1))
        object.__setattr__(self, 'iota_theta', as_vector('iota_theta', self.iota_theta, n))
        object.__setattr__(self, 'iota_gamma', as_vector('iota_gamma', self.iota_gamma, n - 1))
        for name in ('T', 'rho0', 'rhoT', 'upsilon_rho', 'upsilon_sigma'):
            require_positive(name, getattr(self, name))
        if self.varsigma_z[0] <= 0.5:
            raise InvalidParameters(f"ς_z1 doit dépasser 1/2 (reçu {self.varsigma_z[0]})")
        if not self.sigma_bar > 1:
            raise InvalidParameters(f"σ̄ doit dépasser 1 (reçu {self.sigma_bar})")
        if not self.rhoT < self.rho0:
            raise InvalidParameters(f"ρ_T={self.rhoT} doit être inférieur à ρ₀={self.rho0}")

    @property
    def n(self):
        return len(self.varsigma_z)

    @cached_property
    def funnel(self):
        return PerfRateFn.funnel(self.rho0, self.rhoT, self.T, self.upsilon_rho)

    @cached_property
    def schedule(self):
        return GainSchedule(PerfRateFn.rate(self.sigma_bar, self.T, self.upsilon_sigma), self.eps, self.T)


@dataclass(frozen=True)
class ScheduleSample(BaseRecord):
    """ρ, ρ̇, σ₁, σ₂ et ε des lissages évalués au même instant"""
    t: float
    rho: float
    rho_dot: float
    sigma1: float
    sigma2: float
    eps: float

    @classmethod
    def at(cls, gains, t):
        schedule = gains.schedule
        return cls(
            t=t,
            rho=gains.funnel.value(t),
            rho_dot=gains.funnel.derivative(t),
            sigma1=schedule.sigma1_value(t),
            sigma2=schedule.sigma2(t),
            eps=gains.eps.smoothing(t),
        )


@dataclass(frozen=True)
class ControllerState(BaseRecord):
    """
    États intégrés du contrôleur : sorties de filtres αᶜ, estimations ϑ̂ et γ̂,
    signal dynamique r. Sert aussi à porter leurs dérivées.
    """
    alpha_c: Tuple[float, ...]
    theta_hat: Tuple[float, ...]
    gamma_hat: Tuple[float, ...]
    r: float = 0.0

    @classmethod
    def size(cls, n):
        return (n - 1) + n + (n - 1) + 1

    def to_list(self):
        return [*self.alpha_c, *self.theta_hat, *self.gamma_hat, self.r]

    @classmethod
    def from_list(cls, values, n):
        values = list(values)
        return cls(
            alpha_c=tuple(values[:n - 1]),
            theta_hat=tuple(values[n - 1:2 * n - 1]),
            gamma_hat=tuple(values[2 * n - 1:3 * n - 2]),
            r=values[3 * n - 2],
        )


@dataclass(frozen=True)
class StepWorkspace(BaseRecord):
    """Quantités intermédiaires d'une évaluation de la loi, pour l'intégrateur et la journalisation"""
    t: float
    e: float
    z: Tuple[float, ...]
    w: Tuple[float, ...]
    lam: float
    kappa: Tuple[float, ...]
    zeta: Tuple[float, ...]
    Phi: Tuple[Tuple[float, ...], ...]
    varphi: Tuple[float, ...]
    alpha_bar: Tuple[float, ...]
    alpha: Tuple[float, ...]
    alpha_c_dot: Tuple[float, ...]
    schedules: ScheduleSample

    @property
    def u(self):
        return self.alpha[-1]
