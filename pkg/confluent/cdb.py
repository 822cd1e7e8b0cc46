"""
Pont de diffusion confluent (CDB) : proposition exacte par confluence d'une
trajectoire avant et d'une trajectoire arrière retournée, test de croisement
par une diffusion auxiliaire, et chaîne de Metropolis-Hastings pseudo-marginale.
"""
import bisect
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple, Union

from confluent.brownian import BridgeSegment, bb_sample_at, conditioned_pair_at, fpt_zero, pre_crossing_pair_at
from confluent.coins import REGIME_B, REGIME_C, make_coin_input, p_A_cross_prob, toss_regime_coin
from confluent.config import SamplerSettings
from confluent.diffusion_model import DiffusionSpec
from confluent.errors import AcceptanceStarvationError, ConfigError
from confluent.psrs import psrs_unconditioned
from confluent.rngkit import RngStream, sample_uniform

logger = logging.getLogger(__name__)


@dataclass
class ChainStats:
    """Compteurs d'une chaîne CDB."""
    proposals: int = 0
    mh_steps: int = 0
    accepted: int = 0
    pair_restarts: int = 0
    aux_trials: int = 0
    endpoint_exits: int = 0
    regime_a: int = 0
    regime_b: int = 0
    regime_c: int = 0
    coin_branches: Counter = field(default_factory=Counter)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.mh_steps if self.mh_steps else 0.0


class ConfluentProposal:
    """
    Proposition z : x1 jusqu'à tau_z, x2 retournée ensuite.
    Les trois valeurs sont stockées sur une grille commune contenant tau_z.
    """

    def __init__(self, T: float, x0: float, xT: float, tau_z: float,
                 times: List[float], x1: List[float], x2rev: List[float]):
        self.T = T
        self.x0 = x0
        self.xT = xT
        self.tau_z = tau_z
        self.times = times
        self.x1 = x1
        self.x2rev = x2rev

    def __repr__(self) -> str:
        return f"ConfluentProposal(T={self.T:g}, tau_z={self.tau_z:.4g}, {len(self.times)} points)"

    @property
    def z_tau(self) -> float:
        return self.x1[self.times.index(self.tau_z)]

    def z_at_index(self, i: int) -> float:
        return self.x1[i] if self.times[i] <= self.tau_z else self.x2rev[i]

    @property
    def z_values(self) -> List[float]:
        return [self.z_at_index(i) for i in range(len(self.times))]

    def reveal(self, stream: RngStream, t: float, limit: Optional[int] = None) -> float:
        """Révèle (x1, x2rev) en t selon la position de t par rapport à tau_z et renvoie z_t."""
        if not 0.0 <= t <= self.T:
            raise ConfigError(f"t={t} hors de [0, {self.T}]")
        i = bisect.bisect_left(self.times, t)
        if i < len(self.times) and self.times[i] == t:
            return self.z_at_index(i)
        ta, tb = self.times[i - 1], self.times[i]
        if ta >= self.tau_z:
            v1 = bb_sample_at(stream, BridgeSegment(ta, tb, self.x1[i - 1], self.x1[i]), t)
            v2 = bb_sample_at(stream, BridgeSegment(ta, tb, self.x2rev[i - 1], self.x2rev[i]), t)
        elif tb == self.tau_z:
            _, v1, v2 = pre_crossing_pair_at(stream, ta, tb, self.x1[i - 1], self.x2rev[i - 1], t, self.x1[i])
        else:
            seg1 = BridgeSegment(ta, tb, self.x1[i - 1], self.x1[i])
            seg2 = BridgeSegment(ta, tb, self.x2rev[i - 1], self.x2rev[i])
            kwargs = {"limit": limit} if limit is not None else {}
            v1, v2 = conditioned_pair_at(stream, seg1, seg2, t, **kwargs)
        self.times.insert(i, float(t))
        self.x1.insert(i, v1)
        self.x2rev.insert(i, v2)
        return self.z_at_index(i)

    def validate(self) -> None:
        """Vérifie les invariants de la proposition ; lève ConfigError au premier écart."""
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ConfigError("grille non strictement croissante")
        if self.times[0] != 0.0 or self.times[-1] != self.T:
            raise ConfigError("la grille doit couvrir [0, T]")
        if self.x1[0] != self.x0 or self.x2rev[-1] != self.xT:
            raise ConfigError("extrémités (x0, xT) non respectées")
        if self.tau_z not in self.times:
            raise ConfigError("tau_z absent de la grille")
        k = self.times.index(self.tau_z)
        if self.x1[k] != self.x2rev[k]:
            raise ConfigError("x1 et x2rev diffèrent en tau_z")
        gaps = [a - b for a, b in zip(self.x1[:k], self.x2rev[:k])]
        if gaps and not (all(g > 0 for g in gaps) or all(g < 0 for g in gaps)):
            raise ConfigError("x1 - x2rev change de signe avant tau_z")


@dataclass
class ChainState:
    proposal: ConfluentProposal
    trials: Union[int, float] = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials doit être >= 1 (reçu {self.trials})")


def _settings(settings: Optional[SamplerSettings], gamma: Optional[float]) -> SamplerSettings:
    settings = settings or SamplerSettings()
    return replace(settings, gamma=gamma) if gamma is not None else settings


def propose_confluent(
    stream: RngStream,
    spec: DiffusionSpec,
    x0: float,
    xT: float,
    T: float,
    settings: Optional[SamplerSettings] = None,
    stats: Optional[ChainStats] = None,
) -> ConfluentProposal:
    """
    Tire x1 depuis x0 et x2 depuis xT, fusionne les grilles (x2 lue à rebours) et
    cherche de gauche à droite le premier passage en 0 de x2rev - x1.
    Sans croisement, la paire est rejetée et tout recommence.
    """
    settings = settings or SamplerSettings()
    stats = stats if stats is not None else ChainStats()
    while True:
        p1 = psrs_unconditioned(stream, spec, x0, T, settings.delta_max)
        p2 = psrs_unconditioned(stream, spec, xT, T, settings.delta_max)
        x1_map = dict(zip(p1.times, p1.values))
        x2_map = {T - s: v for s, v in zip(p2.times, p2.values)}
        grid = sorted(set(x1_map) | set(x2_map))
        for t in grid:
            if t not in x1_map:
                x1_map[t] = p1.reveal(stream, t)
            if t not in x2_map:
                x2_map[t] = p2.reveal(stream, T - t)
        times = list(grid)
        x1 = [x1_map[t] for t in times]
        x2rev = [x2_map[t] for t in times]

        for j in range(len(times) - 1):
            ta, tb = times[j], times[j + 1]
            crossing = fpt_zero(stream, BridgeSegment(ta, tb, x2rev[j] - x1[j], x2rev[j + 1] - x1[j + 1], 2.0))
            if not crossing.finite:
                continue
            tau = crossing.tau
            if x1[j] == x2rev[j] or x1[j + 1] == x2rev[j + 1]:
                # écart nul sur un point de grille : la confluence y est déjà réalisée
                tau = ta if x1[j] == x2rev[j] else tb
            else:
                # un tau arrondi sur une extrémité est ramené à l'intérieur
                tau = min(max(tau, math.nextafter(ta, tb)), math.nextafter(tb, ta))
                s = bb_sample_at(stream, BridgeSegment(ta, tb, x1[j] + x2rev[j], x1[j + 1] + x2rev[j + 1], 2.0), tau)
                times.insert(j + 1, tau)
                x1.insert(j + 1, 0.5 * s)
                x2rev.insert(j + 1, 0.5 * s)
            stats.proposals += 1
            logger.debug("confluence en tau_z=%.6g sur [%.6g, %.6g]", tau, ta, tb)
            return ConfluentProposal(T, x0, xT, tau, times, x1, x2rev)

        stats.pair_restarts += 1
        logger.debug("paire sans croisement sur [0, %g] : nouveau tirage", T)


def aux_crossing(
    stream: RngStream,
    spec: DiffusionSpec,
    proposal: ConfluentProposal,
    settings: Optional[SamplerSettings] = None,
    stats: Optional[ChainStats] = None,
) -> int:
    """
    Une diffusion auxiliaire partie de xT en -T croise-t-elle z sur [0, T] ?
    Contrôles du moins au plus coûteux : signes aux extrémités, pièces A à droite
    de tau_z, pièces B à gauche, puis la pièce C de l'intervalle qui finit en tau_z.
    """
    settings = settings or SamplerSettings()
    stats = stats if stats is not None else ChainStats()
    T = proposal.T
    x3_path = psrs_unconditioned(stream, spec, proposal.xT, 2.0 * T, settings.delta_max)
    x3_path.reveal(stream, T)
    x3_map = {s - T: v for s, v in zip(x3_path.times, x3_path.values) if s >= T}
    for t in sorted(set(proposal.times) | set(x3_map)):
        if t not in x3_map:
            x3_map[t] = x3_path.reveal(stream, t + T)
        proposal.reveal(stream, t, settings.starvation_limit)

    times = proposal.times
    z = proposal.z_values
    d = [x3_map[t] - zt for t, zt in zip(times, z)]
    intervals = range(len(times) - 1)

    for j in intervals:
        if d[j] * d[j + 1] <= 0:
            stats.endpoint_exits += 1
            return 1

    tau = proposal.tau_z
    for j in intervals:
        if times[j] >= tau:
            stats.regime_a += 1
            if sample_uniform(stream) < p_A_cross_prob(d[j], d[j + 1], times[j + 1] - times[j]):
                return 1

    def gap(i: int) -> Tuple[float, float]:
        return proposal.x1[i] - proposal.x2rev[i], proposal.x1[i] - x3_map[times[i]]

    for j in intervals:
        if times[j + 1] < tau:
            stats.regime_b += 1
            inp = make_coin_input(gap(j), gap(j + 1), times[j + 1] - times[j])
            if not toss_regime_coin(stream, inp, REGIME_B, settings.gamma, settings.coin_ceiling, stats.coin_branches):
                return 1

    if tau > 0.0:
        j = times.index(tau) - 1
        stats.regime_c += 1
        inp = make_coin_input(gap(j), (0.0, gap(j + 1)[1]), times[j + 1] - times[j])
        if not toss_regime_coin(stream, inp, REGIME_C, settings.gamma, settings.coin_ceiling, stats.coin_branches):
            return 1
    return 0


def _trial_count(stream, spec, proposal, settings, stats) -> int:
    for count in range(1, settings.starvation_limit + 1):
        stats.aux_trials += 1
        if aux_crossing(stream, spec, proposal, settings, stats):
            return count
    raise AcceptanceStarvationError(
        f"aucune intersection de la diffusion auxiliaire en {settings.starvation_limit} essais"
    )


def mh_update(
    stream: RngStream,
    spec: DiffusionSpec,
    state: ChainState,
    gamma: Optional[float] = None,
    settings: Optional[SamplerSettings] = None,
    stats: Optional[ChainStats] = None,
) -> ChainState:
    """
    Nouvelle proposition, nombre d'essais auxiliaires jusqu'à la première intersection
    (moyenne de aux_trials comptages géométriques), acceptation si U < essais / essais courants.
    """
    settings = _settings(settings, gamma)
    stats = stats if stats is not None else ChainStats()
    proposal = propose_confluent(stream, spec, state.proposal.x0, state.proposal.xT, state.proposal.T, settings, stats)
    counts = [_trial_count(stream, spec, proposal, settings, stats) for _ in range(settings.aux_trials)]
    trials = counts[0] if settings.aux_trials == 1 else sum(counts) / len(counts)
    stats.mh_steps += 1
    if sample_uniform(stream) < trials / state.trials:
        stats.accepted += 1
        return ChainState(proposal, trials)
    return state


def run_cdb(
    stream: RngStream,
    spec: DiffusionSpec,
    x0: float,
    xT: float,
    T: float,
    n_mh: int,
    gamma: Optional[float] = None,
    settings: Optional[SamplerSettings] = None,
    with_stats: bool = False,
):
    """
    Chaîne CDB de longueur n_mh + 1 initialisée avec une proposition et 𝒯 = 1.
    Renvoie la liste des états (et les compteurs si with_stats).
    """
    if n_mh < 0:
        raise ConfigError(f"n_mh doit être >= 0 (reçu {n_mh})")
    if not T > 0:
        raise ConfigError(f"horizon non positif : {T}")
    settings = _settings(settings, gamma)
    stats = ChainStats()
    state = ChainState(propose_confluent(stream, spec, x0, xT, T, settings, stats), 1)
    chain = [state.proposal]
    for _ in range(n_mh):
        state = mh_update(stream, spec, state, settings=settings, stats=stats)
        chain.append(state.proposal)
    logger.debug("chaîne CDB (%s, T=%g) : %d/%d acceptations, %d essais auxiliaires",
                 spec.name, T, stats.accepted, n_mh, stats.aux_trials)
    if with_stats:
        return chain, stats
    return chain


def switch_heuristic(theta1: float, delta_star1: float, theta2: float) -> float:
    """Distance critique entre observations pour un second processus, à trou spectral theta2."""
    if not (theta1 > 0 and delta_star1 > 0 and theta2 > 0):
        raise ConfigError("switch_heuristic attend des paramètres > 0")
    return theta1 / theta2 * delta_star1


def ou_spectral_gap(theta: float) -> float:
    if not theta > 0:
        raise ConfigError(f"theta doit être > 0 (reçu {theta})")
    return theta
