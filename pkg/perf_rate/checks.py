"""
Suite de propriétés des fonctions performance-taux
"""
import logging
import warnings

import numpy as np
from scipy import integrate

from core.exceptions import InvalidParameters
from core.models import ViolationLog
from perf_rate.models import Direction, EpsSchedule, GainSchedule, PerfRateFn, PerfRateParams

logger = logging.getLogger(__name__)

MAX_DRAWS = 1000
GRID_POINTS = 64
QUAD_DRAWS = 50

FD_TOLERANCE = 1e-6
JUNCTION_OFFSET = 1e-6
JUNCTION_TOLERANCE = 1e-3
CONTINUITY_TOLERANCE = 1e-9
INTEGRAL_TOLERANCE = 1e-6


def _draw_function(rng):
    mu0, muT = np.exp(rng.uniform(np.log(0.05), np.log(50.0), size=2))
    if mu0 == muT:
        muT *= 2.0
    direction = Direction.DECREASING if mu0 > muT else Direction.INCREASING
    params = PerfRateParams(float(mu0), float(muT), float(rng.uniform(0.2, 5.0)), float(rng.uniform(0.2, 3.0)))
    return PerfRateFn(params, direction)


def _context(f, **extra):
    p = f.params
    return {'mu0': p.mu0, 'muT': p.muT, 'T': p.T, 'upsilon': p.upsilon, **extra}


def check_perf_rate(samples, seed=0):
    """
    Vérifie sur des tirages aléatoires : valeurs exactes aux extrémités,
    monotonie sur [0, T), dérivée analytique contre différence centrée,
    raccord C¹ en T, continuité de σ₂ en T et intégrabilité de ε
    """
    if samples <= 0:
        raise InvalidParameters(f"samples doit être strictement positif (reçu {samples})")
    rng = np.random.default_rng(seed)
    draws = min(int(samples), MAX_DRAWS)
    log = ViolationLog('perf_rate')

    for _ in range(draws):
        f = _draw_function(rng)
        p = f.params
        delta = abs(p.mu0 - p.muT)
        scale = max(p.mu0, p.muT)

        # extrémités et gel après T
        endpoint = max(
            abs(f.value(0.0) - p.mu0),
            abs(f.value(p.T) - p.muT),
            abs(f.value(p.T * (1.0 + rng.uniform(0.0, 3.0))) - p.muT),
            abs(f.derivative(0.0)),
            abs(f.derivative(2.0 * p.T)),
        )
        log.record(endpoint, **_context(f, property='endpoints'))

        grid = np.concatenate(([0.0], np.sort(rng.uniform(0.0, p.T, GRID_POINTS))))
        steps = np.diff(f.values(grid))
        if f.direction == Direction.INCREASING:
            steps = -steps
        log.record_many(steps - 1e-12 * scale, lambda k: _context(f, property='monotonicity', t=float(grid[k + 1])))

        h = 1e-5 * p.T
        t = rng.uniform(2.0 * h, p.T - 2.0 * h, GRID_POINTS)
        analytic = f.derivatives(t)
        central = (f.values(t + h) - f.values(t - h)) / (2.0 * h)
        excess = np.abs(analytic - central) - FD_TOLERANCE * np.maximum(1.0, np.abs(analytic))
        log.record_many(excess, lambda k: _context(f, property='derivative', t=float(t[k])))

        junction = abs(f.derivative(p.T - JUNCTION_OFFSET))
        log.record(junction - JUNCTION_TOLERANCE * delta / p.T, **_context(f, property='c1_junction'))

    for _ in range(draws):
        sigma_bar = float(rng.uniform(1.5, 200.0))
        T = float(rng.uniform(0.2, 5.0))
        eps = EpsSchedule.exponential(float(rng.uniform(0.01, 2.0)))
        schedule = GainSchedule(PerfRateFn.rate(sigma_bar, T, float(rng.uniform(0.2, 3.0))), eps, T)
        gap = abs(schedule.sigma2(T - CONTINUITY_TOLERANCE * T) - schedule.sigma2(T))
        log.record(
            gap - CONTINUITY_TOLERANCE * sigma_bar,
            property='sigma2_continuity', sigma_bar=sigma_bar, T=T, decay=eps.decay,
        )

    with warnings.catch_warnings():
        warnings.simplefilter('ignore', integrate.IntegrationWarning)
        for _ in range(min(draws, QUAD_DRAWS)):
            eps = EpsSchedule.exponential(float(rng.uniform(0.01, 2.0)))
            horizon = float(rng.uniform(1.0, 50.0))
            numeric, _err = integrate.quad(eps.raw, 0.0, horizon, limit=200)
            closed = eps.integral(horizon)
            log.record(
                abs(numeric - closed) - INTEGRAL_TOLERANCE * closed,
                property='eps_integral', decay=eps.decay, horizon=horizon,
            )

    report = log.report(draws)
    logger.info(f"perf_rate : {draws} tirages, {report.violations} violation(s)")
    return report
