"""
Évaluation analytique des fonctions performance-taux

Le dénominateur est écrit (T−t)² + υ²t², strictement positif sur [0, T).
"""
import numpy as np


def eval_mu(f, t):
    """
    μ(t) = μ_T + (μ₀−μ_T)(T−t)² / ((T−t)² + υ²t²) pour t < T, μ_T ensuite
    """
    p = f.params
    if t <= 0.0:
        return p.mu0
    if t >= p.T:
        return p.muT
    s = p.T - t
    s2 = s * s
    return p.muT + (p.mu0 - p.muT) * s2 / (s2 + p.upsilon * p.upsilon * t * t)


def eval_mu_dot(f, t):
    """
    Dérivée analytique de μ : nulle en 0 et figée à 0 pour t ≥ T
    """
    p = f.params
    if t <= 0.0 or t >= p.T:
        return 0.0
    s = p.T - t
    u2 = p.upsilon * p.upsilon
    den = s * s + u2 * t * t
    return -2.0 * (p.mu0 - p.muT) * u2 * p.T * t * s / (den * den)


def eval_sigma2(schedule, t):
    """
    σ₂(t) = σ₁(t) avant T, σ̄·ε(t−T) ensuite ; jamais sous le plancher de ε
    """
    if t < schedule.T:
        value = eval_mu(schedule.sigma1, t)
    else:
        value = schedule.sigma_bar * schedule.eps.raw(t - schedule.T)
    return max(value, schedule.eps.floor)


def mu_values(f, t):
    """Version vectorisée de eval_mu"""
    p = f.params
    t = np.asarray(t, dtype=float)
    tc = np.clip(t, 0.0, p.T)
    s = p.T - tc
    den = s * s + p.upsilon ** 2 * tc * tc
    inner = p.muT + (p.mu0 - p.muT) * s * s / den
    return np.where(t <= 0.0, p.mu0, np.where(t >= p.T, p.muT, inner))


def mu_dot_values(f, t):
    """Version vectorisée de eval_mu_dot"""
    p = f.params
    t = np.asarray(t, dtype=float)
    tc = np.clip(t, 0.0, p.T)
    s = p.T - tc
    u2 = p.upsilon ** 2
    den = s * s + u2 * tc * tc
    inner = -2.0 * (p.mu0 - p.muT) * u2 * p.T * tc * s / (den * den)
    return np.where((t <= 0.0) | (t >= p.T), 0.0, inner)
