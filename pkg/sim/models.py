"""
Configuration, scénarios et résultats des simulations en boucle fermée
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

from django.db import models

from core.exceptions import InvalidParameters
from core.models import BaseRecord, as_vector, require_positive
from controller.models import ControllerGains
from plant.models import PlantModel, ReferenceSignal

logger = logging.getLogger(__name__)


class RunStatus(models.TextChoices):
    COMPLETED = 'Completed', 'Horizon atteint'
    FUNNEL_VIOLATION = 'FunnelViolation', "Sortie de l'entonnoir"
    NUMERICAL_BLOWUP = 'NumericalBlowup', 'Divergence numérique'
    INITIAL_FUNNEL_VIOLATION = 'InitialFunnelViolation', "État initial hors de l'entonnoir"
    INVALID_PARAMETERS = 'InvalidParameters', 'Paramètres invalides'


class SweepParam(models.TextChoices):
    SIGMA_BAR = 'sigma_bar', 'σ̄'
    RHO_T = 'rho_T', 'ρ_T'
    T = 'T', 'Temps prescrit'
    EPS_DECAY = 'eps_decay', 'Taux de décroissance de ε'


@dataclass(frozen=True)
class SimConfig(BaseRecord):
    """Pas fixe RK4, horizon, pas de journalisation et gardes"""
    dt: float = 1e-4
    horizon: float = 10.0
    log_stride: int = 10
    guard_delta: float = 1e-9
    blowup_limit: float = 1e9

    def __post_init__(self):
        for name in ('dt', 'horizon', 'guard_delta', 'blowup_limit'):
            require_positive(name, getattr(self, name))
        if int(self.log_stride) != self.log_stride or self.log_stride < 1:
            raise InvalidParameters(f"log_stride doit être un entier ≥ 1 (reçu {self.log_stride})")
        if self.log_stride * self.dt > 0.01 * self.horizon * (1 + 1e-12):
            raise InvalidParameters(
                f"log_stride·dt={self.log_stride * self.dt:.6g} dépasse 1 % de l'horizon {self.horizon}"
            )

    @property
    def steps(self):
        return int(round(self.horizon / self.dt))


@dataclass(frozen=True)
class InitialConditions(BaseRecord):
    """x(0), ξ(0), r(0) et estimations initiales (None : valeurs par défaut)"""
    x0: Tuple[float, ...]
    xi0: Tuple[float, ...] = ()
    r0: Optional[float] = None
    theta_hat0: Optional[Tuple[float, ...]] = None
    gamma_hat0: Optional[Tuple[float, ...]] = None


@dataclass(frozen=True)
class Scenario(BaseRecord):
    """Procédé, référence, gains, conditions initiales et réglages du solveur"""
    plant: PlantModel
    reference: ReferenceSignal
    gains: ControllerGains
    initial: InitialConditions
    sim: SimConfig = field(default_factory=SimConfig)
    label: str = ''

    def __post_init__(self):
        n = self.plant.n
        if self.gains.n != n:
            raise InvalidParameters(f"Les gains décrivent {self.gains.n} étape(s) pour un procédé d'ordre {n}")
        as_vector('x0', self.initial.x0, n, positive=None)
        as_vector('xi0', self.initial.xi0, self.plant.n0, positive=None)
        if not self.sim.dt < self.gains.T / 100:
            raise InvalidParameters(f"dt={self.sim.dt} doit être inférieur à T/100={self.gains.T / 100:.6g}")

    def with_param(self, name, value):
        """Copie du scénario avec un paramètre de balayage modifié"""
        value = float(value)
        gains = self.gains
        if name == SweepParam.SIGMA_BAR:
            gains = gains.copy_with(sigma_bar=value)
        elif name == SweepParam.RHO_T:
            gains = gains.copy_with(rhoT=value)
        elif name == SweepParam.T:
            gains = gains.copy_with(T=value)
        elif name == SweepParam.EPS_DECAY:
            gains = gains.copy_with(eps=gains.eps.copy_with(decay=value))
        else:
            choices = ', '.join(SweepParam.values)
            raise InvalidParameters(f"Paramètre de balayage inconnu : {name} (choix : {choices})")
        return self.copy_with(gains=gains, label=f"{name}={value:g}")


@dataclass(frozen=True)
class TrajectoryRecord(BaseRecord):
    """Échantillon journalisé de la boucle fermée"""
    t: float
    x: Tuple[float, ...]
    xi: Tuple[float, ...]
    r: float
    z: Tuple[float, ...]
    w: Tuple[float, ...]
    u: float
    alpha: Tuple[float, ...]
    alpha_c: Tuple[float, ...]
    theta_hat: Tuple[float, ...]
    gamma_hat: Tuple[float, ...]
    sigma1: float
    sigma2: float
    rho: float
    e: float

    @classmethod
    def from_workspace(cls, t, x, xi, state, u, workspace):
        sched = workspace.schedules
        return cls(
            t=t,
            x=tuple(x),
            xi=tuple(xi),
            r=state.r,
            z=workspace.z,
            w=workspace.w,
            u=u,
            alpha=workspace.alpha[:-1],
            alpha_c=state.alpha_c,
            theta_hat=state.theta_hat,
            gamma_hat=state.gamma_hat,
            sigma1=sched.sigma1,
            sigma2=sched.sigma2,
            rho=sched.rho,
            e=workspace.e,
        )


@dataclass(frozen=True)
class RunOutcome(BaseRecord):
    """Statut, échantillons et résumé d'une exécution"""
    status: str
    records: Tuple[TrajectoryRecord, ...] = ()
    metrics: Optional[object] = None
    t_event: Optional[float] = None
    message: str = ''

    @property
    def completed(self):
        return self.status == RunStatus.COMPLETED
