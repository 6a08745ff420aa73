"""
Résumé d'une trajectoire : énergie de commande, erreur en T, marge d'entonnoir
"""
import math

import numpy as np
from scipy import integrate

from core.exceptions import EmptyTrajectory
from metrics.models import MetricsSummary

# Fenêtre finale (fraction de l'horizon) pour l'erreur asymptotique
FINAL_WINDOW = 0.05


def _peaks(records, attr):
    return tuple(float(v) for v in np.max(np.abs([getattr(r, attr) for r in records]), axis=0))


def summarize(records, T, completed=True):
    """
    Énergie ∫u² par trapèzes sur les échantillons, |e(T)| interpolée
    linéairement, max |e|/ρ, |e| moyenne sur les derniers 5 %
    """
    if not records:
        raise EmptyTrajectory("Aucun échantillon à résumer")
    t = np.array([r.t for r in records])
    u = np.array([r.u for r in records])
    e = np.array([r.e for r in records])
    rho = np.array([r.rho for r in records])

    energy = float(integrate.trapezoid(u * u, t)) if len(t) > 1 else 0.0
    e_at_T = float(abs(np.interp(T, t, e))) if t[0] <= T <= t[-1] else math.nan
    window = t >= t[-1] - FINAL_WINDOW * (t[-1] - t[0])

    peaks = {'u': (float(np.max(np.abs(u))),), 'r': (float(np.max(np.abs([r.r for r in records]))),)}
    for attr in ('w', 'theta_hat', 'gamma_hat', 'xi'):
        if len(getattr(records[0], attr)):
            peaks[attr] = _peaks(records, attr)

    return MetricsSummary(
        energy=energy,
        e_at_T=e_at_T,
        max_funnel_ratio=float(np.max(np.abs(e) / rho)),
        final_error=float(np.mean(np.abs(e[window]))),
        max_abs_u=float(np.max(np.abs(u))),
        theta_hat_max=_peaks(records, 'theta_hat'),
        completed=completed,
        signal_peaks=peaks,
    )
