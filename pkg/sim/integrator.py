"""
Intégration RK4 à pas fixe de la boucle fermée augmentée [x, ξ, αᶜ, ϑ̂, γ̂, r]
"""
import logging
import time

import numpy as np

from core.exceptions import FunnelViolation, InitialFunnelViolation, NumericalBlowup
from controller.laws import controller_eval, evaluate_law, init_state
from controller.models import ControllerState, ScheduleSample
from metrics.summary import summarize
from plant.dynamics import check_gain_bounds, plant_rhs
from sim.models import RunOutcome, RunStatus, TrajectoryRecord

logger = logging.getLogger(__name__)

# instants d'étage gardés en cache (t, t+h/2, t+h)
SCHEDULE_CACHE_SIZE = 4


class ClosedLoop:
    """Second membre de la boucle fermée, état augmenté à plat"""

    def __init__(self, plant, reference, gains, guard_delta):
        self.plant = plant
        self.knowledge = plant.knowledge()
        self.reference = reference
        self.gains = gains
        self.guard_delta = guard_delta
        self.n = plant.n
        self.n0 = plant.n0
        # bornes des tranches αᶜ | ϑ̂ | γ̂ | r dans le vecteur d'état
        split = self.n + self.n0
        self.slices = (split, split + self.n - 1, split + 2 * self.n - 1, split + 3 * self.n - 2)
        self._schedules = {}

    def pack(self, x, xi, state):
        return np.array([*x, *xi, *state.to_list()], dtype=float)

    def unpack(self, y):
        values = y.tolist()
        split = self.n + self.n0
        return values[:self.n], values[self.n:split], ControllerState.from_list(values[split:], self.n)

    def schedule(self, t):
        """ρ, σ₁, σ₂, ε à l'instant t ; les étapes RK4 partagent leurs instants"""
        sched = self._schedules.get(t)
        if sched is None:
            if len(self._schedules) >= SCHEDULE_CACHE_SIZE:
                self._schedules.clear()
            sched = self._schedules[t] = ScheduleSample.at(self.gains, t)
        return sched

    def __call__(self, t, y):
        """ẏ à l'instant t, sans espace de travail"""
        values = y.tolist()
        split, theta_at, gamma_at, r_at = self.slices
        x = values[:self.n]
        try:
            u, controller_dot, _ = evaluate_law(
                t, x, values[split:theta_at], values[theta_at:gamma_at], values[gamma_at:r_at], values[r_at],
                self.knowledge, self.reference, self.gains, self.schedule(t), self.guard_delta,
            )
            dx, dxi = plant_rhs(self.plant, t, x, values[self.n:split], u)
        except (ArithmeticError, ValueError) as exc:
            # débordement ou domaine mathématique sur un état d'étage démesuré
            raise NumericalBlowup(f"Erreur arithmétique à t={t:.6g} : {exc}", t=t)
        return np.array(dx + dxi + controller_dot, dtype=float)

    def record(self, t, y):
        """Échantillon journalisé : loi complète avec son espace de travail"""
        x, xi, state = self.unpack(y)
        u, _, workspace = controller_eval(
            t, x, state, self.knowledge, self.reference, self.gains, self.guard_delta, sched=self.schedule(t),
        )
        return TrajectoryRecord.from_workspace(t, x, xi, state, u, workspace)


def rk4_step(fn, t, y, h, k1=None):
    """Un pas RK4 classique ; k1 peut être fourni s'il est déjà évalué"""
    if k1 is None:
        k1 = fn(t, y)
    half = h / 2
    k2 = fn(t + half, y + half * k1)
    k3 = fn(t + half, y + half * k2)
    k4 = fn(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def run(plant, reference, gains, config, initial):
    """
    Simule la boucle fermée jusqu'à l'horizon

    Les gardes (barrière, divergence) terminent l'exécution avec le statut
    correspondant ; les échantillons déjà journalisés sont conservés.
    """
    started = time.perf_counter()
    loop = ClosedLoop(plant, reference, gains, config.guard_delta)
    x0 = [float(v) for v in initial.x0]
    xi0 = [float(v) for v in initial.xi0]
    try:
        state0 = init_state(
            loop.knowledge, reference, gains, x0,
            theta_hat0=initial.theta_hat0, gamma_hat0=initial.gamma_hat0, r0=initial.r0,
            guard_delta=config.guard_delta,
        )
    except InitialFunnelViolation as exc:
        logger.warning(f"{plant.name} : {exc}")
        return RunOutcome(RunStatus.INITIAL_FUNNEL_VIOLATION, t_event=0.0, message=str(exc))
    except (NumericalBlowup, ArithmeticError) as exc:
        logger.warning(f"{plant.name} : commande initiale non finie ({exc})")
        return RunOutcome(RunStatus.NUMERICAL_BLOWUP, t_event=0.0, message=str(exc))

    y = loop.pack(x0, xi0, state0)
    dt = config.dt
    steps = config.steps
    records = []
    status, t_event, message = RunStatus.COMPLETED, None, ''

    try:
        with np.errstate(over='ignore', invalid='ignore'):
            for k in range(steps + 1):
                t = k * dt
                if not np.all(np.abs(y) <= config.blowup_limit):
                    raise NumericalBlowup(f"État hors de ±{config.blowup_limit:g} à t={t:.6g}", t=t)
                k1 = loop(t, y)
                check_gain_bounds(plant, t, y[:plant.n].tolist())
                if k % config.log_stride == 0:
                    records.append(loop.record(t, y))
                if k == steps:
                    break
                y = rk4_step(loop, t, y, dt, k1=k1)
    except FunnelViolation as exc:
        status, t_event, message = RunStatus.FUNNEL_VIOLATION, exc.t, str(exc)
    except NumericalBlowup as exc:
        status, t_event, message = RunStatus.NUMERICAL_BLOWUP, exc.t, str(exc)

    completed = status == RunStatus.COMPLETED
    metrics = summarize(records, gains.T, completed=completed) if records else None
    elapsed = time.perf_counter() - started
    if completed:
        logger.info(f"{plant.name} σ̄={gains.sigma_bar:g} : {status} en {elapsed:.2f} s ({len(records)} échantillons)")
    else:
        logger.warning(f"{plant.name} σ̄={gains.sigma_bar:g} : {status} à t={t_event:.6g} ({message})")
    return RunOutcome(status, tuple(records), metrics, t_event, message)


def run_scenario(scenario):
    """Raccourci : exécute un Scenario complet"""
    return run(scenario.plant, scenario.reference, scenario.gains, scenario.sim, scenario.initial)
