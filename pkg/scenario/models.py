"""
Scénario validé : procédé intégré, gains, conditions initiales, solveur, sorties
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict

from core.models import BaseRecord
from controller.models import ControllerGains
from plant.builtin import get_builtin
from sim.models import InitialConditions, Scenario, SimConfig


@dataclass(frozen=True)
class OutputConfig(BaseRecord):
    """Répertoire de sortie et fichiers à écrire"""
    dir: str = 'out'
    csv: bool = True
    metrics: bool = True

    @property
    def path(self):
        return Path(self.dir)


@dataclass(frozen=True)
class ScenarioConfig(BaseRecord):
    plant: str
    gains: ControllerGains
    initial: InitialConditions
    sim: SimConfig
    outputs: OutputConfig = field(default_factory=OutputConfig)
    plant_options: Dict[str, float] = field(default_factory=dict)
    source: str = ''

    def build(self):
        """Scenario exécutable (procédé construit depuis le registre)"""
        plant, reference = get_builtin(self.plant, **self.plant_options)
        return Scenario(
            plant=plant,
            reference=reference,
            gains=self.gains,
            initial=self.initial,
            sim=self.sim,
            label=self.plant,
        )
