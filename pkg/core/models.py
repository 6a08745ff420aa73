"""
Enregistrements de base partagés
"""
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from core.exceptions import CheckFailure, InvalidParameters


class BaseRecord:
    """Mixin pour les dataclasses figées du domaine"""

    def as_dict(self):
        return asdict(self)

    def copy_with(self, **changes):
        """Copie modifiée ; __post_init__ revalide les invariants"""
        return replace(self, **changes)


@dataclass(frozen=True)
class CheckReport(BaseRecord):
    """Résultat d'une vérification échantillonnée"""
    name: str
    samples: int
    violations: int = 0
    max_slack: float = 0.0
    counterexample: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.violations == 0

    def as_payload(self):
        return {
            'name': self.name,
            'samples': self.samples,
            'violations': self.violations,
            'max_slack': self.max_slack,
            'passed': self.passed,
            'counterexample': self.counterexample or None,
        }

    def assert_passed(self):
        """Lève CheckFailure avec le premier contre-exemple en cas de violation"""
        if not self.passed:
            raise CheckFailure(
                f"{self.name} : {self.violations} violation(s) sur {self.samples} tirage(s)",
                counterexample=self.counterexample,
            )
        return self


def require_positive(name, value):
    """Vérifie qu'un paramètre est un réel fini strictement positif"""
    if not math.isfinite(value) or value <= 0:
        raise InvalidParameters(f"{name} doit être strictement positif (reçu {value})")
    return float(value)


def require_nonnegative(name, value):
    """Vérifie qu'un paramètre est un réel fini positif ou nul"""
    if not math.isfinite(value) or value < 0:
        raise InvalidParameters(f"{name} doit être positif ou nul (reçu {value})")
    return float(value)


def require_finite(name, value):
    if not math.isfinite(value):
        raise InvalidParameters(f"{name} doit être fini (reçu {value})")
    return float(value)


def as_vector(name, values, length, positive=True):
    """
    Convertit en tuple de flottants et contrôle la longueur

    positive : True (> 0), False (≥ 0) ou None (toute valeur finie)
    """
    vector = tuple(float(v) for v in values)
    if len(vector) != length:
        raise InvalidParameters(f"{name} doit contenir {length} valeur(s) (reçu {len(vector)})")
    check = {True: require_positive, False: require_nonnegative, None: require_finite}[positive]
    for k, v in enumerate(vector, start=1):
        check(f"{name}[{k}]", v)
    return vector


# Écart reporté pour une valeur non finie (le JSON strict refuse inf)
UNBOUNDED_SLACK = 1.0e308


class ViolationLog:
    """
    Accumule les écarts (gauche − droite) d'une inégalité échantillonnée :
    un écart strictement positif est une violation
    """

    def __init__(self, name):
        self.name = name
        self.violations = 0
        self.max_slack = -math.inf
        self.counterexample = {}

    def record(self, slack, **context):
        slack = float(slack)
        if not math.isfinite(slack):
            slack = UNBOUNDED_SLACK
        self.max_slack = max(self.max_slack, slack)
        if slack > 0:
            self.violations += 1
            if not self.counterexample:
                self.counterexample = {**context, 'slack': slack}

    def record_many(self, slacks, context):
        """
        Variante vectorisée ; `context(k)` construit le contre-exemple du tirage k
        """
        slacks = np.nan_to_num(np.asarray(slacks, dtype=float), nan=UNBOUNDED_SLACK, posinf=UNBOUNDED_SLACK)
        if slacks.size == 0:
            return
        self.max_slack = max(self.max_slack, float(slacks.max()))
        bad = np.flatnonzero(slacks > 0)
        if bad.size:
            self.violations += int(bad.size)
            if not self.counterexample:
                k = int(bad[0])
                self.counterexample = {**context(k), 'slack': float(slacks[k])}

    def report(self, samples):
        slack = self.max_slack if math.isfinite(self.max_slack) else 0.0
        return CheckReport(self.name, samples, self.violations, slack, self.counterexample)
