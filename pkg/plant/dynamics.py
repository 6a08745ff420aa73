"""
Second membre du procédé et contrôles d'hypothèses à l'exécution
"""
import math

from core.exceptions import NumericalBlowup, PlantAssumptionError


def plant_rhs(model, t, x, xi, u):
    """
    (ẋ, ξ̇) du procédé pour la commande u ; NumericalBlowup si une valeur n'est pas finie
    """
    n = model.n
    dx = []
    for i in range(1, n + 1):
        drive = x[i] if i < n else u
        dx.append(
            model.true_gain(i, t, x) * drive
            + model.true_param_term(i, t, x)
            + model.uncertainty(i, t, x, xi)
        )
    dxi = list(model.unmodeled_rhs(t, xi, x)) if model.n0 else []
    if not all(math.isfinite(v) for v in dx) or not all(math.isfinite(v) for v in dxi):
        raise NumericalBlowup(f"Dérivée non finie du procédé {model.name} à t={t:.6g}", t=t)
    return dx, dxi


def check_gain_bounds(model, t, x, tolerance=1e-12):
    """Vérifie g̲ᵢ ≤ gᵢ(t, x) ≤ ḡᵢ ; une violation est une erreur de définition du scénario"""
    for i in range(1, model.n + 1):
        g = model.true_gain(i, t, x)
        lower = model.gain_lower[i - 1]
        upper = model.gain_upper[i - 1]
        if not lower - tolerance <= g <= upper + tolerance:
            raise PlantAssumptionError(
                f"{model.name} : g{i}={g:.6g} hors de [{lower}, {upper}] à t={t:.6g}"
            )


def uncertainty_envelope_excess(model, t, x, xi):
    """
    max_i (|Δᵢ| − borne structurelle de Δᵢ) ; ≤ 0 quand l'enveloppe est respectée
    """
    if model.uncertainty_bound is None:
        return 0.0
    excess = -math.inf
    for i in range(1, model.n + 1):
        excess = max(excess, abs(model.uncertainty(i, t, x, xi)) - model.uncertainty_bound(i, t, x, xi))
    return excess
