"""
Lecture des fichiers de scénario `section.champ = valeur`

Grammaire :
    - une affectation par ligne, `#` commence un commentaire ;
    - les clés sont préfixées par une section (plant., gains., init., sim., outputs.) ;
    - les vecteurs s'écrivent `1.0, 2.0` ; une valeur vide donne un vecteur vide.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict

from django.conf import settings

from core.exceptions import ConfigError

logger = logging.getLogger(__name__)

SECTIONS = ('plant', 'gains', 'init', 'sim', 'outputs')


@dataclass
class ParsedConfig:
    """Valeurs brutes par section et numéro de ligne de chaque clé"""
    sections: Dict[str, Dict[str, str]] = field(default_factory=lambda: {name: {} for name in SECTIONS})
    lines: Dict[str, int] = field(default_factory=dict)
    source: str = '<texte>'

    def set(self, key, value, line=None):
        """Affecte (ou surcharge) une valeur brute `section.champ`"""
        section, _, name = key.partition('.')
        if section not in SECTIONS or not name:
            raise ConfigError(f"Section inconnue (attendu : {', '.join(SECTIONS)})", line=line, field=key)
        self.sections[section][name] = value
        if line is not None:
            self.lines[key] = line
        else:
            self.lines.pop(key, None)

    def line_of(self, key):
        """Ligne d'une clé, ou de la première clé de la section"""
        if key in self.lines:
            return self.lines[key]
        prefix = f"{key}."
        candidates = [line for name, line in self.lines.items() if name.startswith(prefix)]
        return min(candidates) if candidates else None


def parse_config(text, source='<texte>'):
    parsed = ParsedConfig(source=source)
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        key = key.strip()
        if not sep or not key:
            raise ConfigError("Affectation `section.champ = valeur` attendue", line=number, field=key or None)
        if key in parsed.lines:
            raise ConfigError(f"Clé déjà définie ligne {parsed.lines[key]}", line=number, field=key)
        parsed.set(key, value.strip(), line=number)
    return parsed


def resolve_config_path(value):
    """Chemin explicite, ou nom d'un scénario fourni (`example1`, `example2.cfg`)"""
    path = Path(value)
    if path.is_file():
        return path
    bundled = Path(settings.SCENARIO_CONFIG_DIR) / (path.name if path.suffix == '.cfg' else f"{path.name}.cfg")
    if bundled.is_file():
        return bundled
    raise ConfigError(f"Fichier de scénario introuvable : {value}", field='--config')


def load_config(value):
    path = resolve_config_path(value)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f"Lecture impossible de {path} : {exc}", field='--config')
    logger.debug(f"Scénario lu depuis {path}")
    return parse_config(text, source=str(path))


def split_vector(raw):
    """`1, 2.5` -> ['1', '2.5'] ; chaîne vide -> []"""
    if isinstance(raw, (list, tuple)):
        return list(raw)
    raw = str(raw).strip()
    if not raw:
        return []
    return [item.strip() for item in raw.split(',')]
