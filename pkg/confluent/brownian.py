"""
Fonctionnelles browniennes exactes : révélation de ponts, premier passage en 0,
décomposition somme/différence, pont de Bessel de dimension 3 et paires conditionnées.
Toutes les longueurs sont locales à l'intervalle traité.
"""
import bisect
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from confluent.config import DEFAULT_STARVATION_LIMIT
from confluent.errors import AcceptanceStarvationError, ConfigError
from confluent.rngkit import RngStream, sample_inverse_gaussian, sample_normal, sample_uniform

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class BridgeSegment:
    t0: float
    t1: float
    x0: float
    x1: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ConfigError(f"segment vide : t0={self.t0}, t1={self.t1}")
        if not self.sigma2 > 0:
            raise ConfigError(f"variance infinitésimale non positive : {self.sigma2}")

    @property
    def length(self) -> float:
        return self.t1 - self.t0


@dataclass(frozen=True)
class FptOutcome:
    """Premier passage en 0 : tau=None signifie « jamais sur l'intervalle »."""
    tau: Optional[float] = None

    @property
    def finite(self) -> bool:
        return self.tau is not None


def bridge_moments(seg: BridgeSegment, t: float) -> Tuple[float, float]:
    w = (t - seg.t0) / seg.length
    mean = seg.x0 + w * (seg.x1 - seg.x0)
    variance = seg.sigma2 * (t - seg.t0) * (seg.t1 - t) / seg.length
    return mean, variance


def bb_sample_at(stream: RngStream, seg: BridgeSegment, t: float) -> float:
    if not seg.t0 < t < seg.t1:
        raise ConfigError(f"t={t} hors de l'intervalle ouvert ({seg.t0}, {seg.t1})")
    mean, variance = bridge_moments(seg, t)
    return sample_normal(stream, mean, variance)


def no_cross_prob(d0: float, dT: float, length: float, sigma2: float) -> float:
    """Probabilité qu'un pont de différence joignant d0 à dT ne touche jamais 0."""
    if not d0 * dT > 0:
        raise ConfigError(f"extrémités de signes différents ou nulles : d0={d0}, dT={dT}")
    if not (length > 0 and sigma2 > 0):
        raise ConfigError(f"longueur et variance doivent être > 0 (reçus {length}, {sigma2})")
    return -math.expm1(-2.0 * abs(d0 * dT) / (length * sigma2))


def fpt_zero(stream: RngStream, seg: BridgeSegment) -> FptOutcome:
    """
    Premier instant où le pont de différence (d0 = seg.x0, dT = seg.x1) atteint 0.
    Pour des extrémités de même signe, le pont évite 0 avec probabilité no_cross_prob ;
    sinon tau = t0 + len / (1/K + 1) avec K ~ IGau(|d0/dT|, d0² / (len·sigma2)).
    """
    d0, dT = seg.x0, seg.x1
    if d0 == 0.0:
        return FptOutcome(seg.t0)
    if dT == 0.0:
        return FptOutcome(seg.t1)
    if d0 * dT > 0 and sample_uniform(stream) < no_cross_prob(d0, dT, seg.length, seg.sigma2):
        return FptOutcome(None)
    k = sample_inverse_gaussian(stream, abs(d0 / dT), d0 * d0 / (seg.length * seg.sigma2))
    return FptOutcome(seg.t0 + seg.length * k / (1.0 + k))


def diff_sum_variance(t: float, s: float, T: float) -> float:
    """Covariance de S (ou de D) entre les instants s <= t d'un pont de longueur T."""
    if not 0.0 <= s <= t <= T or T <= 0:
        raise ConfigError(f"il faut 0 <= s <= t <= T (reçus s={s}, t={t}, T={T})")
    return 2.0 * (T - t) * s / T


class BridgePath:
    """
    Trajectoire connue en un nombre fini d'instants, pont brownien de variance
    sigma2 entre deux instants consécutifs. Révéler un instant l'insère dans la grille.
    """

    def __init__(self, times: Sequence[float], values: Sequence[float], sigma2: float = 1.0):
        if len(times) != len(values) or len(times) < 2:
            raise ConfigError("une trajectoire exige au moins deux points datés")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("les instants doivent être strictement croissants")
        self.times: List[float] = [float(t) for t in times]
        self.values: List[float] = [float(v) for v in values]
        self.sigma2 = sigma2

    @property
    def start(self) -> float:
        return self.times[0]

    @property
    def end(self) -> float:
        return self.times[-1]

    def __len__(self) -> int:
        return len(self.times)

    def enclosing(self, t: float) -> int:
        """Indice j tel que times[j] < t < times[j+1] (t supposé non révélé)."""
        return bisect.bisect_left(self.times, t) - 1

    def lookup(self, t: float) -> Optional[float]:
        i = bisect.bisect_left(self.times, t)
        if i < len(self.times) and self.times[i] == t:
            return self.values[i]
        return None

    def insert(self, t: float, value: float) -> None:
        i = bisect.bisect_left(self.times, t)
        self.times.insert(i, float(t))
        self.values.insert(i, float(value))

    def reveal(self, stream: RngStream, t: float) -> float:
        if not self.start <= t <= self.end:
            raise ConfigError(f"t={t} hors de [{self.start}, {self.end}]")
        known = self.lookup(t)
        if known is not None:
            return known
        j = self.enclosing(t)
        seg = BridgeSegment(self.times[j], self.times[j + 1], self.values[j], self.values[j + 1], self.sigma2)
        value = bb_sample_at(stream, seg, t)
        self.insert(t, value)
        return value


class Bessel3Bridge:
    """
    Pont de Bessel de dimension 3 (échelle sqrt(2)) partant de 0 et valant
    `terminal` en `length`, construit à partir de trois ponts browniens
    standard épinglés en 0 ; les révélations successives sont cohérentes.
    """

    def __init__(self, length: float, terminal: float):
        if not length > 0:
            raise ConfigError(f"longueur non positive : {length}")
        if terminal < 0:
            raise ConfigError(f"valeur terminale négative : {terminal}")
        self.length = length
        self.terminal = terminal
        self._bridges = [BridgePath([0.0, length], [0.0, 0.0]) for _ in range(3)]

    def value_at(self, stream: RngStream, t: float) -> float:
        if not 0.0 <= t <= self.length:
            raise ConfigError(f"t={t} hors de [0, {self.length}]")
        b1, b2, b3 = (bridge.reveal(stream, t) for bridge in self._bridges)
        mu = self.terminal * t / self.length
        return math.sqrt((SQRT2 * b1 + mu) ** 2 + 2.0 * b2 * b2 + 2.0 * b3 * b3)


def bessel3_bridge_at(stream: RngStream, length: float, terminal: float, t: float) -> float:
    if not 0.0 <= t < length:
        raise ConfigError(f"t={t} hors de [0, {length})")
    return Bessel3Bridge(length, terminal).value_at(stream, t)


def conditioned_pair_at(
    stream: RngStream,
    seg1: BridgeSegment,
    seg2: BridgeSegment,
    t: float,
    limit: int = DEFAULT_STARVATION_LIMIT,
) -> Tuple[float, float]:
    """
    Tirage joint de deux ponts indépendants en t, conditionnés à ne pas se croiser
    sur [t0, t1]. Rejet sur le signe en t, puis acceptation avec le produit des deux
    probabilités de non-croisement (processus différence, sigma2 = 2).
    """
    if (seg1.t0, seg1.t1) != (seg2.t0, seg2.t1):
        raise ConfigError("les deux segments doivent partager le même intervalle")
    d_left = seg2.x0 - seg1.x0
    d_right = seg2.x1 - seg1.x1
    if not d_left * d_right > 0:
        raise ConfigError(f"écarts d'extrémités de signes différents : {d_left}, {d_right}")
    sigma2 = seg1.sigma2 + seg2.sigma2
    for _ in range(limit):
        a = bb_sample_at(stream, seg1, t)
        b = bb_sample_at(stream, seg2, t)
        d = b - a
        if d * d_left <= 0:
            continue
        p = no_cross_prob(d_left, d, t - seg1.t0, sigma2) * no_cross_prob(d, d_right, seg1.t1 - t, sigma2)
        if sample_uniform(stream) < p:
            return a, b
    raise AcceptanceStarvationError(f"paire conditionnée : {limit} rejets consécutifs en t={t}")


def pre_crossing_pair_at(
    stream: RngStream,
    left_time: float,
    tau: float,
    x1_left: float,
    x2_left: float,
    t: float,
    z_tau: float,
) -> Tuple[float, float, float]:
    """
    Valeurs (z, x1, x2) en t dans (left_time, tau) lorsque la différence x2 - x1
    atteint 0 pour la première fois en tau, où les deux trajectoires valent z_tau.
    La différence, lue depuis tau, est un pont de Bessel ; la somme un pont de variance 2.
    """
    if not left_time < t < tau:
        raise ConfigError(f"t={t} hors de ({left_time}, {tau})")
    gap = x2_left - x1_left
    if gap == 0.0:
        raise ConfigError("les deux trajectoires coïncident déjà à gauche de la confluence")
    h = bessel3_bridge_at(stream, tau - left_time, abs(gap), tau - t)
    s = bb_sample_at(stream, BridgeSegment(left_time, tau, x1_left + x2_left, 2.0 * z_tau, 2.0), t)
    sgn = math.copysign(1.0, gap)
    x1 = 0.5 * (s - sgn * h)
    x2 = 0.5 * (s + sgn * h)
    return x1, x1, x2
