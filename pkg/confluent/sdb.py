"""
Pont de diffusion simple discrétisé (Euler-Maruyama), référence biaisée pour
mesurer ce que le CDB corrige : croisements détectés seulement aux nœuds de la grille.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from confluent.config import DEFAULT_STARVATION_LIMIT
from confluent.diffusion_model import DiffusionSpec
from confluent.errors import AcceptanceStarvationError, ConfigError
from confluent.rngkit import RngStream, sample_uniform

logger = logging.getLogger(__name__)


@dataclass
class GridPath:
    step: float
    values: np.ndarray
    splice_index: Optional[int] = None

    @property
    def times(self) -> np.ndarray:
        return self.step * np.arange(len(self.values))

    @property
    def T(self) -> float:
        return self.step * (len(self.values) - 1)

    def value_at(self, t: float) -> float:
        """Interpolation linéaire entre nœuds."""
        return float(np.interp(t, self.times, self.values))


@dataclass
class SdbState:
    path: GridPath
    trials: Union[int, float] = 1


def snap_grid(T: float, delta: float) -> Tuple[int, float]:
    """Nombre de pas et pas effectif pour que la grille couvre exactement [0, T]."""
    if not (T > 0 and delta > 0):
        raise ConfigError(f"T et delta doivent être > 0 (reçus {T}, {delta})")
    n = max(1, int(round(T / delta)))
    return n, T / n


def euler_ensemble(
    stream: RngStream,
    spec: DiffusionSpec,
    x0,
    T: float,
    delta: float,
    keep_path: bool = True,
) -> np.ndarray:
    """
    Trajectoires d'Euler indépendantes, une par valeur initiale de x0.
    Seule la récurrence en temps est une boucle ; chaque pas est vectorisé sur les trajectoires.
    Renvoie le tableau (trajectoires, n + 1) ou, sans keep_path, les seules valeurs finales.
    Les gaussiennes sont tirées pas par pas dans les deux cas : mêmes valeurs à flux égal.
    """
    n, step = snap_grid(T, delta)
    x = np.array(x0, dtype=float, ndmin=1)
    scale = np.sqrt(step)
    if not keep_path:
        for _ in range(n):
            x = x + np.asarray(spec.alpha(x), dtype=float) * step + scale * stream.generator.standard_normal(x.size)
        return x
    noise = scale * stream.generator.standard_normal((n, x.size))
    out = np.empty((x.size, n + 1))
    out[:, 0] = x
    for k in range(n):
        x = x + np.asarray(spec.alpha(x), dtype=float) * step + noise[k]
        out[:, k + 1] = x
    return out


def euler_path(stream: RngStream, spec: DiffusionSpec, x0: float, T: float, delta: float) -> GridPath:
    """X_{k+1} = X_k + alpha(X_k)·Δ + sqrt(Δ)·N(0, 1)."""
    _, step = snap_grid(T, delta)
    return GridPath(step, euler_ensemble(stream, spec, x0, T, delta)[0])


def first_crossing_index(diff: np.ndarray) -> Optional[int]:
    """Premier nœud gauche i tel que diff[i]·diff[i+1] <= 0."""
    hits = np.nonzero(diff[:-1] * diff[1:] <= 0)[0]
    return int(hits[0]) if hits.size else None


def sdb_propose(
    stream: RngStream,
    spec: DiffusionSpec,
    x0: float,
    xT: float,
    T: float,
    delta: float,
    limit: int = DEFAULT_STARVATION_LIMIT,
) -> GridPath:
    _, step = snap_grid(T, delta)
    for _ in range(limit):
        forward, backward = euler_ensemble(stream, spec, [x0, xT], T, delta)
        x2rev = backward[::-1]
        i = first_crossing_index(x2rev - forward)
        if i is None:
            continue
        values = np.concatenate([forward[: i + 1], x2rev[i + 1:]])
        return GridPath(step, values, splice_index=i)
    raise AcceptanceStarvationError(f"SDB : aucune paire croisée en {limit} tirages")


def _intersects(stream: RngStream, spec: DiffusionSpec, path: GridPath) -> bool:
    n = len(path.values) - 1
    aux = euler_path(stream, spec, path.values[-1], 2.0 * path.T, path.step)
    return first_crossing_index(aux.values[n:] - path.values) is not None


def sdb_mh_update(
    stream: RngStream,
    spec: DiffusionSpec,
    state: SdbState,
    delta: float,
    limit: int = DEFAULT_STARVATION_LIMIT,
) -> SdbState:
    path = state.path
    proposal = sdb_propose(stream, spec, path.values[0], path.values[-1], path.T, delta, limit)
    for trials in range(1, limit + 1):
        if _intersects(stream, spec, proposal):
            break
    else:
        raise AcceptanceStarvationError(f"SDB : aucune intersection auxiliaire en {limit} essais")
    if sample_uniform(stream) <= trials / state.trials:
        return SdbState(proposal, trials)
    return state


def run_sdb(
    stream: RngStream,
    spec: DiffusionSpec,
    x0: float,
    xT: float,
    T: float,
    delta: float,
    n_mh: int,
) -> List[GridPath]:
    if n_mh < 0:
        raise ConfigError(f"n_mh doit être >= 0 (reçu {n_mh})")
    state = SdbState(sdb_propose(stream, spec, x0, xT, T, delta))
    chain = [state.path]
    for _ in range(n_mh):
        state = sdb_mh_update(stream, spec, state, delta)
        chain.append(state.path)
    return chain
