"""
Procédés intégrés, sélectionnables par nom depuis un scénario

Les fonctions sont définies au niveau du module pour que les modèles
restent sérialisables par pickle (pool de processus des balayages).
"""
import math

from core.exceptions import InvalidParameters
from plant.models import DynamicSignal, PlantChoice, PlantModel, ReferenceSignal


def _zero_signal(t):
    return 0.0


def _zero_uncertainty(i, t, x, xi):
    return 0.0


def _zero_envelope(i, value):
    return 0.0


# Premier ordre : ẋ = g(t, x)u + θ(t)φ(x)

def _example1_gain(i, t, x):
    return 1.0 - 0.5 * math.cos(t * x[0])


def _example1_regressor(i, x):
    return (x[0] * math.sin(x[0]),)


def _example1_param_term(i, t, x):
    return (1.0 + 0.5 * math.sin(t)) * x[0] * math.sin(x[0])


def builtin_example1():
    """Procédé scalaire, sans incertitude ni signal dynamique, y_d ≡ 0"""
    model = PlantModel(
        name=PlantChoice.EXAMPLE1,
        n=1,
        n0=0,
        gain_lower=(0.5,),
        gain_upper=(1.5,),
        true_gain=_example1_gain,
        true_param_term=_example1_param_term,
        regressor=_example1_regressor,
        regressor_dim=(1,),
        uncertainty=_zero_uncertainty,
        psi1=_zero_envelope,
        psi2=_zero_envelope,
    )
    return model, ReferenceSignal(_zero_signal, _zero_signal, _zero_signal)


# Second ordre avec dynamique non modélisée ξ

def _example2_gain(i, t, x):
    if i == 1:
        return 1.0 + x[0] * x[0]
    return 3.0 - math.cos(x[0] * x[1])


def _example2_regressor(i, x):
    if i == 1:
        return (x[0] * math.exp(-0.5 * x[0]),)
    return (x[0] * x[1] * x[1],)


def _example2_param_term(i, t, x):
    return _example2_regressor(i, x)[0]


def _example2_uncertainty(i, t, x, xi):
    if i == 1:
        return 0.2 * xi[0] * x[0] * math.sin(x[1] * t)
    return 0.1 * xi[0] * math.cos(0.5 * x[1] * t)


def _example2_uncertainty_bound(i, t, x, xi):
    if i == 1:
        return 0.2 * abs(xi[0]) * abs(x[0])
    return 0.1 * abs(xi[0])


def _example2_unmodeled(t, xi, x):
    return (-xi[0] + 0.5 * x[0] * x[0] * math.sin(x[0] * t),)


def _example2_psi1(i, x):
    if i == 1:
        return math.sqrt(x[0] * x[0] + 0.1)
    return 0.0


def _example2_psi2(i, r):
    return math.sqrt(r * r + 0.1)


def _example2_upsilon(x1):
    return 2.5 * x1 ** 4


def _example2_y_d(t):
    return 0.5 * (math.sin(t) + math.sin(0.5 * t))


def _example2_y_d_dot(t):
    return 0.5 * (math.cos(t) + 0.5 * math.cos(0.5 * t))


def _example2_y_d_ddot(t):
    return 0.5 * (-math.sin(t) - 0.25 * math.sin(0.5 * t))


def builtin_example2(r0=0.0, state_bound=2.0):
    """
    Procédé du second ordre, gains dépendant de l'état et dynamique ξ
    exp-ISpS dominée par le signal dynamique r

    `state_bound` borne |x₁| sur la région de fonctionnement : ḡ₁ = 1 + B²
    """
    if state_bound <= 0:
        raise InvalidParameters(f"state_bound doit être strictement positif (reçu {state_bound})")
    model = PlantModel(
        name=PlantChoice.EXAMPLE2,
        n=2,
        n0=1,
        gain_lower=(1.0, 2.0),
        gain_upper=(1.0 + state_bound ** 2, 4.0),
        true_gain=_example2_gain,
        true_param_term=_example2_param_term,
        regressor=_example2_regressor,
        regressor_dim=(1, 1),
        uncertainty=_example2_uncertainty,
        uncertainty_bound=_example2_uncertainty_bound,
        unmodeled_rhs=_example2_unmodeled,
        psi1=_example2_psi1,
        psi2=_example2_psi2,
        dyn_signal=DynamicSignal(c_bar=1.0, d=0.625, upsilon_bar=_example2_upsilon, r0=r0),
    )
    return model, ReferenceSignal(_example2_y_d, _example2_y_d_dot, _example2_y_d_ddot)


BUILTIN_PLANTS = {
    PlantChoice.EXAMPLE1: builtin_example1,
    PlantChoice.EXAMPLE2: builtin_example2,
}


def get_builtin(name, **options):
    """Construit un procédé intégré et sa référence à partir de son nom"""
    try:
        factory = BUILTIN_PLANTS[PlantChoice(name)]
    except ValueError:
        choices = ', '.join(PlantChoice.values)
        raise InvalidParameters(f"Procédé inconnu : {name} (choix : {choices})")
    try:
        return factory(**options)
    except TypeError as exc:
        raise InvalidParameters(f"Options invalides pour {name} : {exc}")

