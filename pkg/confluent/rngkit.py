"""
Flux aléatoires reproductibles et moteur de p-pièces exactes.
Tous les autres modules tirent leur aléa d'un RngStream : rejouer un flux
rejoue les sorties bit pour bit.
"""
import logging
import math
from typing import Iterable, Iterator, List, Optional, Protocol, Tuple

import numpy as np

from confluent.config import DEFAULT_COIN_CEILING
from confluent.errors import CoinCeilingError, ConfigError

logger = logging.getLogger(__name__)

MACHINE_EPS = float(np.finfo(float).eps)


class RngStream:
    """
    Flux pseudo-aléatoire identifié par (seed, stream_id).
    Générateur Philox (à compteur) initialisé par une SeedSequence dont la
    spawn_key est le stream_id : des stream_id distincts donnent des suites indépendantes.
    Un flux n'a qu'un seul propriétaire à la fois.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise ConfigError(f"seed et stream_id doivent être >= 0 (reçus {seed}, {stream_id})")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self._generator = np.random.Generator(np.random.Philox(sequence))

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def make_streams(seed: int, count: int, first_id: int = 0) -> List[RngStream]:
    """Un flux par réplique, identifiants consécutifs à partir de first_id."""
    return [RngStream(seed, first_id + i) for i in range(count)]


def sample_uniform(stream: RngStream) -> float:
    return float(stream.generator.random())


def sample_normal(stream: RngStream, mean: float, variance: float) -> float:
    if variance < 0:
        raise ConfigError(f"variance négative : {variance}")
    if variance == 0:
        return float(mean)
    return float(mean + math.sqrt(variance) * stream.generator.standard_normal())


def sample_inverse_gaussian(stream: RngStream, mu: float, lam: float) -> float:
    """
    Tirage IGau(mu, lam) par transformation du carré d'une normale
    suivie d'un choix uniforme entre les deux racines.
    """
    if not (mu > 0 and lam > 0):
        raise ConfigError(f"IGau exige mu > 0 et lam > 0 (reçus {mu}, {lam})")
    v = stream.generator.standard_normal() ** 2
    w = mu * v / (2.0 * lam)
    # mu * (1 + w - sqrt(w^2 + 2w)) écrit sans annulation
    root = mu / (1.0 + w + math.sqrt(w * w + 2.0 * w))
    if stream.generator.random() <= mu / (mu + root):
        return float(root)
    return float(mu * mu / root)


def sample_poisson_times(stream: RngStream, rate: float, t0: float, t1: float) -> List[float]:
    """Instants d'un processus de Poisson homogène sur (t0, t1), triés."""
    if t1 <= t0:
        raise ConfigError(f"intervalle vide : ({t0}, {t1})")
    if rate < 0:
        raise ConfigError(f"intensité négative : {rate}")
    if rate == 0:
        return []
    count = stream.generator.poisson(rate * (t1 - t0))
    if count == 0:
        return []
    times = np.sort(stream.generator.uniform(t0, t1, size=count))
    # uniform tire dans [t0, t1) : on écarte l'extrémité gauche (probabilité nulle)
    return [float(t) for t in times if t0 < t < t1]


class PCoinApproximator(Protocol):
    """Suite (p̂(n), ε(n)), n = 0, 1, ... avec |p - p̂(n)| < ε(n) et ε(n) -> 0."""

    def __iter__(self) -> Iterator[Tuple[float, float]]:
        ...


class ConstantApproximator:
    """Approximateur synthétique : p̂(n) = p, ε(n) = eps0 · 2^-n."""

    def __init__(self, p: float, eps0: float = 0.5):
        self.p = p
        self.eps0 = eps0

    def __iter__(self) -> Iterator[Tuple[float, float]]:
        n = 0
        while True:
            yield self.p, self.eps0 * 2.0 ** (-n)
            n += 1


def toss_p_coin(
    stream: RngStream,
    approx: Iterable[Tuple[float, float]],
    ceiling: int = DEFAULT_COIN_CEILING,
    u: Optional[float] = None,
) -> int:
    """
    Pièce exacte de probabilité p à partir d'approximations certifiées.
    Consomme exactement un uniforme (sauf si u est injecté) et renvoie 1{U < p}.
    """
    if u is None:
        u = sample_uniform(stream)
    n = -1
    for n, (p_hat, eps) in enumerate(approx):
        if n >= ceiling:
            raise CoinCeilingError(f"p-pièce indécise après {ceiling} approximations (U={u:.17g})")
        if not math.isfinite(p_hat) or math.isnan(eps):
            raise CoinCeilingError(f"approximation non finie au rang {n} : p̂={p_hat}, ε={eps}")
        if eps == math.inf:
            continue
        if u < p_hat - eps:
            return 1
        if u >= p_hat + eps:
            return 0
        if eps < MACHINE_EPS:
            raise CoinCeilingError(
                f"ε={eps:.3g} sous l'epsilon machine au rang {n} alors que U={u:.17g} "
                f"reste dans ({p_hat - eps:.17g}, {p_hat + eps:.17g})"
            )
    raise CoinCeilingError(f"approximateur épuisé après {n + 1} termes")
