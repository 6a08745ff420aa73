"""
Exceptions partagées par les applications de simulation
"""


class SimulationError(Exception):
    """Erreur survenue pendant l'intégration de la boucle fermée"""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class FunnelViolation(SimulationError):
    """L'erreur transformée z₁ a atteint la frontière de la barrière"""

    def __init__(self, message, t=None, z1=None):
        super().__init__(message, t=t)
        self.z1 = z1


class InitialFunnelViolation(FunnelViolation):
    """|x₁(0) − y_d(0)| ≥ ρ₀ : l'entonnoir ne contient pas l'état initial"""


class NumericalBlowup(SimulationError):
    """Valeur non finie ou hors limite dans l'état augmenté"""


class InvalidParameters(ValueError):
    """Paramètres qui violent l'invariant d'un enregistrement"""


class PlantAssumptionError(InvalidParameters):
    """Le procédé sort des bornes déclarées par le scénario (gain hors [g̲, ḡ])"""


class EmptyTrajectory(ValueError):
    """Aucun échantillon à résumer"""


class ConfigError(ValueError):
    """Fichier de scénario invalide, avec la ligne et le champ fautifs"""

    def __init__(self, message, line=None, field=None):
        super().__init__(message)
        self.line = line
        self.field = field

    def __str__(self):
        message = super().__str__()
        if self.line is not None and self.field:
            return f"ligne {self.line} ({self.field}): {message}"
        if self.field:
            return f"{self.field}: {message}"
        return message


class CheckFailure(AssertionError):
    """Une inégalité échantillonnée n'est pas vérifiée"""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample or {}
