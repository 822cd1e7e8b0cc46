"""
Constantes par défaut et réglages des échantillonneurs.
Chaque champ de SamplerSettings peut être surchargé par une variable
d'environnement CONFLUENT_<CHAMP> (ex. CONFLUENT_GAMMA=4).
"""
import os
from dataclasses import dataclass, fields, replace
from typing import Optional

from confluent.errors import ConfigError

# Seuil γ du protocole de repli des pièces B/C
DEFAULT_GAMMA = 3.0
# Nombre maximal d'approximations consultées par une p-pièce
DEFAULT_COIN_CEILING = 10_000
# Rejets consécutifs tolérés avant de déclarer la famine
DEFAULT_STARVATION_LIMIT = 10**6

# Grille de validation des hypothèses : [-50, 50] avec 10^4 points
DEFAULT_GRID_HALF_WIDTH = 50.0
DEFAULT_GRID_POINTS = 10_000

# Benchmark de temps : PSRS pont seulement pour T <= cutoff, budget = facteur × temps CDB
DEFAULT_PSRS_CUTOFF = 6.0
DEFAULT_PSRS_BUDGET_FACTOR = 10.0

SCHEMA_VERSION = 1
ENV_PREFIX = "CONFLUENT_"


@dataclass(frozen=True)
class SamplerSettings:
    """Réglages partagés par les échantillonneurs CDB et SDB."""
    gamma: float = DEFAULT_GAMMA
    coin_ceiling: int = DEFAULT_COIN_CEILING
    delta_max: Optional[float] = None
    starvation_limit: int = DEFAULT_STARVATION_LIMIT
    aux_trials: int = 1

    def __post_init__(self):
        if self.gamma <= 0:
            raise ConfigError(f"gamma doit être > 0 (reçu {self.gamma})")
        if self.coin_ceiling < 1:
            raise ConfigError(f"coin_ceiling doit être >= 1 (reçu {self.coin_ceiling})")
        if self.delta_max is not None and self.delta_max <= 0:
            raise ConfigError(f"delta_max doit être > 0 (reçu {self.delta_max})")
        if self.starvation_limit < 1:
            raise ConfigError("starvation_limit doit être >= 1")
        if self.aux_trials < 1:
            raise ConfigError(f"aux_trials doit être >= 1 (reçu {self.aux_trials})")

    @classmethod
    def from_env(cls, base: Optional["SamplerSettings"] = None) -> "SamplerSettings":
        """Applique les surcharges CONFLUENT_* présentes dans l'environnement."""
        base = base or cls()
        overrides = {}
        for f in fields(cls):
            raw = os.environ.get(ENV_PREFIX + f.name.upper())
            if raw is None or raw == "":
                continue
            try:
                if f.name in ("coin_ceiling", "starvation_limit", "aux_trials"):
                    overrides[f.name] = int(raw)
                else:
                    overrides[f.name] = float(raw)
            except ValueError:
                raise ConfigError(f"{ENV_PREFIX + f.name.upper()}={raw!r} n'est pas un nombre")
        return replace(base, **overrides)
