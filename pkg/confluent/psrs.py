"""
Simulation exacte de diffusions à volatilité unité par rejet sur l'espace des
trajectoires (amincissement poissonien de propositions browniennes).
Les trajectoires sont rendues sous forme de squelettes révélables a posteriori.
"""
import logging
import math
import time
from typing import Callable, Optional, Tuple

from confluent.brownian import BridgePath
from confluent.config import DEFAULT_STARVATION_LIMIT
from confluent.diffusion_model import DiffusionSpec, phi
from confluent.errors import AcceptanceStarvationError, BudgetExhausted, ConfigError
from confluent.rngkit import RngStream, sample_normal, sample_poisson_times, sample_uniform

logger = logging.getLogger(__name__)


class Skeleton(BridgePath):
    """Squelette d'une trajectoire : pont brownien standard entre deux points consécutifs."""

    def __init__(self, times, values):
        super().__init__(times, values, sigma2=1.0)

    def __repr__(self) -> str:
        return f"Skeleton([{self.start:g}, {self.end:g}], {len(self)} points)"


def sample_biased_endpoint(
    stream: RngStream,
    spec: DiffusionSpec,
    x0: float,
    delta: float,
    limit: int = DEFAULT_STARVATION_LIMIT,
) -> float:
    """Tirage de densité proportionnelle à exp{A(u) - (u - x0)^2 / (2 delta)}."""
    if not delta > 0:
        raise ConfigError(f"delta doit être > 0 (reçu {delta})")
    for _ in range(limit):
        u = sample_normal(stream, x0, delta)
        if sample_uniform(stream) < math.exp(float(spec.A(u)) - spec.A_sup):
            return u
    raise AcceptanceStarvationError(
        f"{limit} rejets consécutifs de l'extrémité depuis x0={x0} : vérifier A_sup={spec.A_sup} "
        f"pour le modèle {spec.name}"
    )


def _segment_attempt(stream: RngStream, spec: DiffusionSpec, x0: float, t0: float, t1: float) -> Optional[Skeleton]:
    end = sample_biased_endpoint(stream, spec, x0, t1 - t0)
    skel = Skeleton([t0, t1], [x0, end])
    marks = sample_poisson_times(stream, spec.Psi, t0, t1)
    for psi in marks:
        height = spec.Psi * sample_uniform(stream)
        value = skel.reveal(stream, psi)
        if height < phi(spec, value) - spec.Phi:
            return None
    return skel


def _segment(
    stream: RngStream,
    spec: DiffusionSpec,
    x0: float,
    t0: float,
    t1: float,
    limit: int = DEFAULT_STARVATION_LIMIT,
) -> Skeleton:
    for attempt in range(limit):
        skel = _segment_attempt(stream, spec, x0, t0, t1)
        if skel is not None:
            if attempt:
                logger.debug("segment [%g, %g] accepté après %d rejets", t0, t1, attempt)
            return skel
    raise AcceptanceStarvationError(f"segment [{t0}, {t1}] : {limit} propositions rejetées")


def psrs_segment(stream: RngStream, spec: DiffusionSpec, x0: float, delta: float) -> Skeleton:
    """Un segment accepté de l'algorithme exact sur [0, delta]."""
    if not delta > 0:
        raise ConfigError(f"delta doit être > 0 (reçu {delta})")
    return _segment(stream, spec, x0, 0.0, delta)


def default_delta_max(spec: DiffusionSpec, T: float) -> float:
    return min(T, 1.0 / max(spec.Psi, 1.0))


def psrs_unconditioned(
    stream: RngStream,
    spec: DiffusionSpec,
    x0: float,
    T: float,
    delta_max: Optional[float] = None,
) -> Skeleton:
    """
    Trajectoire non conditionnée sur [0, T] : ceil(T / delta_max) segments de même
    longueur enchaînés par la propriété de Markov.
    """
    if not T > 0:
        raise ConfigError(f"horizon non positif : {T}")
    if delta_max is None:
        delta_max = default_delta_max(spec, T)
    if not delta_max > 0:
        raise ConfigError(f"delta_max doit être > 0 (reçu {delta_max})")
    n = max(1, math.ceil(T / delta_max))
    bounds = [T * i / n for i in range(n)] + [T]
    times, values = [0.0], [x0]
    for t0, t1 in zip(bounds, bounds[1:]):
        seg = _segment(stream, spec, values[-1], t0, t1)
        times.extend(seg.times[1:])
        values.extend(seg.values[1:])
    return Skeleton(times, values)


def reveal_at(stream: RngStream, skel: Skeleton, t: float) -> Tuple[float, Skeleton]:
    return skel.reveal(stream, t), skel


def psrs_bridge(
    stream: RngStream,
    spec: DiffusionSpec,
    x0: float,
    xT: float,
    T: float,
    budget_seconds: Optional[float] = None,
    clock: Callable[[], float] = time.perf_counter,
) -> Skeleton:
    """
    Pont de référence par rejet : proposition pont brownien épinglé en (x0, xT),
    acceptation par amincissement sur tout [0, T]. Coût exponentiel en T.
    """
    if not T > 0:
        raise ConfigError(f"horizon non positif : {T}")
    started = clock()
    attempts = 0
    while True:
        attempts += 1
        skel = Skeleton([0.0, T], [x0, xT])
        accepted = True
        for psi in sample_poisson_times(stream, spec.Psi, 0.0, T):
            height = spec.Psi * sample_uniform(stream)
            if height < phi(spec, skel.reveal(stream, psi)) - spec.Phi:
                accepted = False
                break
        if accepted:
            logger.debug("pont PSRS sur [0, %g] accepté après %d propositions", T, attempts)
            return skel
        if budget_seconds is not None and clock() - started > budget_seconds:
            raise BudgetExhausted(
                f"pont PSRS sur [0, {T}] : budget de {budget_seconds:.3g} s épuisé après {attempts} propositions"
            )
