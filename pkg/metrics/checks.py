"""
Vérifications échantillonnées des inégalités utilisées par la synthèse

Chaque vérification renvoie un CheckReport ; `report.assert_passed()` lève
CheckFailure avec le premier contre-exemple.
"""
import logging

import numpy as np

from core.exceptions import InvalidParameters
from core.models import ViolationLog
from controller.laws import smoothed_envelope, smoothed_normalizer

logger = logging.getLogger(__name__)

ABSOLUTE_TOLERANCE = 1e-12
RESIDUAL_TOLERANCE = 1e-3


def _require_samples(samples):
    if int(samples) <= 0:
        raise InvalidParameters(f"samples doit être strictement positif (reçu {samples})")
    return int(samples)


def _open_unit(rng, size):
    """Tirages uniformes dans (0, 1]"""
    return 1.0 - rng.random(size)


def check_normalizer_bound(samples, seed=0):
    """
    sΘᵀΦ ≤ ‖Θ‖·s²ΦᵀΦ/√(s²ΦᵀΦ + τ²) + τ‖Θ‖ pour s ∈ [−10, 10], Θ, Φ ∈ [−10, 10]⁴, τ ∈ (0, 1]
    """
    samples = _require_samples(samples)
    rng = np.random.default_rng(seed)
    s = rng.uniform(-10.0, 10.0, samples)
    theta = rng.uniform(-10.0, 10.0, (samples, 4))
    phi = rng.uniform(-10.0, 10.0, (samples, 4))
    tau = _open_unit(rng, samples)

    norm_theta = np.linalg.norm(theta, axis=1)
    lhs = s * np.einsum('ij,ij->i', theta, phi)
    smoothed = np.array([smoothed_normalizer(s[k], phi[k], tau[k]) for k in range(samples)])
    rhs = norm_theta * s * smoothed + tau * norm_theta

    log = ViolationLog('normalizer_bound')
    log.record_many(
        lhs - rhs - ABSOLUTE_TOLERANCE,
        lambda k: {'s': float(s[k]), 'theta': theta[k].tolist(), 'phi': phi[k].tolist(), 'tau': float(tau[k])},
    )
    return log.report(samples)


def check_log_barrier_bound(samples, seed=0):
    """
    log(k²/(k² − s²)) < s²/(k² − s²) pour k ∈ (0, 10] et 0 < |s| ≤ k(1 − 1e−6)
    """
    samples = _require_samples(samples)
    rng = np.random.default_rng(seed)
    k = 10.0 * _open_unit(rng, samples)
    ratio = rng.uniform(1e-4, 1.0 - 1e-6, samples) * rng.choice((-1.0, 1.0), samples)
    s = ratio * k

    q = (s / k) ** 2
    lhs = -np.log1p(-q)
    rhs = q / (1.0 - q)
    slack = lhs - rhs
    # inégalité stricte : l'égalité compte comme violation
    slack = np.where(slack >= 0.0, np.maximum(slack, np.finfo(float).tiny), slack)

    log = ViolationLog('log_barrier_bound')
    log.record_many(slack, lambda i: {'k': float(k[i]), 's': float(s[i])})
    return log.report(samples)


def check_envelope_bound(samples, seed=0):
    """
    z·ψ̂(z, ψ, ε) ≥ |z|ψ − ε pour z ∈ [−10, 10], ψ ∈ [0, 10], ε ∈ (0, 1]
    """
    samples = _require_samples(samples)
    rng = np.random.default_rng(seed)
    z = rng.uniform(-10.0, 10.0, samples)
    psi = rng.uniform(0.0, 10.0, samples)
    eps = _open_unit(rng, samples)

    realised = np.array([z[k] * smoothed_envelope(z[k], psi[k], eps[k]) for k in range(samples)])
    log = ViolationLog('envelope_bound')
    log.record_many(
        np.abs(z) * psi - eps - realised - ABSOLUTE_TOLERANCE,
        lambda k: {'z': float(z[k]), 'psi': float(psi[k]), 'eps': float(eps[k])},
    )
    return log.report(samples)


def check_dynamic_signal(records, c_bar, upsilon_bar, d):
    """
    r ≥ 0 sur toute la trajectoire et résidu |Δr/Δt − ṙ| ≤ 1e−3·max(1, |ṙ|)
    entre échantillons consécutifs (ṙ = −c̄r + Ῡ(x₁) + d moyenné aux deux bornes)
    """
    log = ViolationLog('dynamic_signal')
    if not records:
        return log.report(0)
    t = np.array([rec.t for rec in records])
    r = np.array([rec.r for rec in records])
    x1 = np.array([rec.x[0] for rec in records])

    log.record_many(-r, lambda k: {'t': float(t[k]), 'r': float(r[k]), 'property': 'nonnegative'})
    if len(records) > 1:
        rate = -c_bar * r + np.array([upsilon_bar(v) for v in x1]) + d
        expected = 0.5 * (rate[1:] + rate[:-1])
        secant = np.diff(r) / np.diff(t)
        log.record_many(
            np.abs(secant - expected) - RESIDUAL_TOLERANCE * np.maximum(1.0, np.abs(expected)),
            lambda k: {'t': float(t[k]), 'residual': float(secant[k] - expected[k]), 'property': 'ode_residual'},
        )
    return log.report(len(records))
