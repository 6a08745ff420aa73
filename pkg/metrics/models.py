"""
Résumés de trajectoire et bornes de diagnostic
"""
from dataclasses import dataclass, field
from typing import Dict, Tuple

from core.exceptions import InvalidParameters
from core.models import BaseRecord


@dataclass(frozen=True)
class MetricsSummary(BaseRecord):
    """Grandeurs dérivées d'une trajectoire journalisée"""
    energy: float
    e_at_T: float
    max_funnel_ratio: float
    final_error: float
    max_abs_u: float
    theta_hat_max: Tuple[float, ...]
    completed: bool
    signal_peaks: Dict[str, Tuple[float, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class ResidualBound(BaseRecord):
    """Ensemble résiduel Ω atteint en T et bornes associées sur |zᵢ|"""
    Omega: float
    z1_bound: float
    zi_bounds: Tuple[float, ...]

    def __post_init__(self):
        if self.Omega < 0 or self.z1_bound < 0 or any(b < 0 for b in self.zi_bounds):
            raise InvalidParameters(f"Borne résiduelle négative : {self}")
