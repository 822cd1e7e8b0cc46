"""
Pièces de croisement des régimes A, B et C.

Sur un intervalle [0, len] on note g = (x1 - x2rev, x1 - x3) les deux écarts :
le régime B conditionne à l'absence de croisement de g[0], le régime C à un
premier passage de g[0] en 0 exactement à len. Chaque pièce renvoie 1 quand
z et x3 ne se croisent pas sur l'intervalle.

Les probabilités B et C sont des séries de fonctions de Bessel modifiées,
tronquées avec une borne d'erreur explicite et évaluées en espace log.
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from confluent.config import DEFAULT_COIN_CEILING, DEFAULT_GAMMA
from confluent.errors import ConfigError, SeriesOverflowError
from confluent.rngkit import RngStream, sample_uniform, toss_p_coin

logger = logging.getLogger(__name__)

REGIME_B = "B"
REGIME_C = "C"

SQRT3 = math.sqrt(3.0)
# Garde-fou du balayage de M̂ : au-delà, l'argument de la série est hors d'atteinte
M_SCAN_LIMIT = 1_000_000
LOG_FLOAT_MAX = 709.0

Pair = Tuple[float, float]


@dataclass(frozen=True)
class RegimeCoinInput:
    g0: Pair
    gT: Pair
    length: float
    k: int


@dataclass(frozen=True)
class PolarCoords:
    r0: float
    rT: float
    theta0: float
    thetaT: float
    alpha: float
    upsilon: int


@dataclass(frozen=True)
class SeriesTerms:
    """Constante c (en log), argument x = rT·r0/(2 len) et coefficients s_n d'une série B ou C."""
    regime: str
    log_c: float
    x: float
    upsilon: int
    polar: PolarCoords

    @property
    def c(self) -> float:
        return _safe_exp(self.log_c, "constante c")

    def s(self, n):
        """s_n, vectorisé sur n."""
        p = self.polar
        n = np.asarray(n, dtype=float)
        if self.regime == REGIME_B:
            return np.sin(n * np.pi * p.thetaT / p.alpha) * np.sin(n * np.pi * p.theta0 / p.alpha)
        return n * np.sin(n * np.pi * (p.alpha - p.theta0) / p.alpha)


def sign_pattern(g: Pair) -> int:
    """k = 1..4 selon les signes de (g[0], g[1]) : ++, +-, -+, --."""
    if g[0] == 0.0 or g[1] == 0.0:
        raise ConfigError(f"écart initial nul : g={g}")
    if g[0] > 0:
        return 1 if g[1] > 0 else 2
    return 3 if g[1] > 0 else 4


def make_coin_input(g0: Pair, gT: Pair, length: float) -> RegimeCoinInput:
    if not length > 0:
        raise ConfigError(f"longueur d'intervalle non positive : {length}")
    return RegimeCoinInput(tuple(map(float, g0)), tuple(map(float, gT)), float(length), sign_pattern(g0))


def reflect(inp: RegimeCoinInput) -> RegimeCoinInput:
    """Les motifs 3 et 4 se ramènent à 2 et 1 en changeant le signe de g aux deux extrémités."""
    if inp.k in (1, 2):
        return inp
    g0 = (-inp.g0[0], -inp.g0[1])
    gT = (-inp.gT[0], -inp.gT[1])
    return RegimeCoinInput(g0, gT, inp.length, 2 if inp.k == 3 else 1)


def polar_reparam(g: Pair, k: int) -> Tuple[float, float, float]:
    """(r, theta, alpha) de l'écart g dans les coordonnées polaires obliques."""
    g1, g2 = g
    if g1 == 0.0 and g2 == 0.0:
        raise ConfigError("g = (0, 0) n'a pas d'angle")
    r = math.sqrt((2.0 / 3.0) * (g1 * g1 + g2 * g2 - g1 * g2))
    denom = 2.0 * g1 - g2
    if denom < 0:
        theta = math.pi + math.atan(SQRT3 * abs(g2) / denom)
    elif denom == 0:
        theta = math.pi / 2.0
    else:
        theta = math.atan(SQRT3 * abs(g2) / denom)
    upsilon = 2 if k == 1 else 1
    return r, theta, upsilon * math.pi / 3.0


def polar_coords(inp: RegimeCoinInput, regime: str) -> PolarCoords:
    r0, theta0, alpha = polar_reparam(inp.g0, inp.k)
    if regime == REGIME_C:
        rT, thetaT = math.sqrt(2.0 / 3.0) * abs(inp.gT[1]), alpha
    else:
        rT, thetaT, _ = polar_reparam(inp.gT, inp.k)
    return PolarCoords(r0, rT, theta0, thetaT, alpha, 2 if inp.k == 1 else 1)


def _quad_form(d1: float, d2: float) -> float:
    return 2.0 * d1 * d1 - 2.0 * d1 * d2 + 2.0 * d2 * d2


def _check_pattern(inp: RegimeCoinInput, regime: str) -> None:
    if inp.k not in (1, 2):
        raise ConfigError(f"motif k={inp.k} : appliquer reflect() avant le calcul de la série")
    if regime == REGIME_B:
        if not (inp.g0[0] * inp.gT[0] > 0 and inp.g0[1] * inp.gT[1] > 0):
            raise ConfigError(f"régime B : écarts de signes incohérents g0={inp.g0}, gT={inp.gT}")
    elif regime == REGIME_C:
        if inp.gT[0] != 0.0 or not inp.g0[1] * inp.gT[1] > 0:
            raise ConfigError(f"régime C : il faut gT[0] = 0 et g[1] de signe constant (gT={inp.gT})")
    else:
        raise ConfigError(f"régime inconnu : {regime!r}")


def regime_B_series_terms(inp: RegimeCoinInput) -> SeriesTerms:
    _check_pattern(inp, REGIME_B)
    T = inp.length
    p = polar_coords(inp, REGIME_B)
    q = _quad_form(inp.gT[0] - inp.g0[0], inp.gT[1] - inp.g0[1])
    log_c = (
        q / (6.0 * T)
        - math.log(-math.expm1(-inp.g0[0] * inp.gT[0] / T))
        + math.log(4.0 * math.pi / p.alpha)
        - (p.rT ** 2 + p.r0 ** 2) / (2.0 * T)
    )
    return SeriesTerms(REGIME_B, log_c, p.rT * p.r0 / (2.0 * T), p.upsilon, p)


def regime_C_series_terms(inp: RegimeCoinInput) -> SeriesTerms:
    _check_pattern(inp, REGIME_C)
    T = inp.length
    p = polar_coords(inp, REGIME_C)
    q = _quad_form(-inp.g0[0], inp.gT[1] - inp.g0[1])
    log_c = (
        q / (6.0 * T)
        + math.log(4.0 * math.pi ** 2 * T / (p.alpha ** 2 * p.rT * inp.g0[0] * math.sqrt(2.0)))
        - (p.rT ** 2 + p.r0 ** 2) / (2.0 * T)
    )
    return SeriesTerms(REGIME_C, log_c, p.rT * p.r0 / (2.0 * T), p.upsilon, p)


def series_terms(inp: RegimeCoinInput, regime: str) -> SeriesTerms:
    if regime == REGIME_B:
        return regime_B_series_terms(inp)
    if regime == REGIME_C:
        return regime_C_series_terms(inp)
    raise ConfigError(f"régime inconnu : {regime!r}")


def _log_tails(terms: SeriesTerms, N: int, M: int) -> Tuple[float, float]:
    """Logarithmes des deux termes de la borne d'erreur (sans le facteur c·exp{...})."""
    lx = math.log(terms.x)
    u = terms.upsilon
    first = (3.0 * N / u + 3.0 / u) * lx - gammaln(N + 2)
    second = (2.0 * M + 2.0 + 3.0 / u) * lx - gammaln(M + 2) - gammaln(M + 3)
    return float(first), float(second)


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise SeriesOverflowError(f"{what} non fini ({value})")
    return value


def _safe_exp(log_value: float, what: str) -> float:
    if math.isnan(log_value) or log_value > LOG_FLOAT_MAX:
        raise SeriesOverflowError(f"{what} : exp({log_value:.6g}) n'est pas représentable")
    return math.exp(log_value)


def _log_term_grid(terms: SeriesTerms, n: np.ndarray, m: np.ndarray) -> np.ndarray:
    """log x^(2m + ν_n) / (m! Γ(m + ν_n + 1)) pour les lignes n et les colonnes m."""
    nu = 3.0 * np.asarray(n, dtype=float)[:, None] / terms.upsilon
    m = np.asarray(m, dtype=float)[None, :]
    return (2.0 * m + nu) * math.log(terms.x) - gammaln(m + 1.0) - gammaln(m + nu + 1.0)


def _p_hat_from_inner(terms: SeriesTerms, inner: np.ndarray) -> float:
    """c · Σ_n s_n · exp(inner_n), inner_n étant le log de la somme intérieure de la ligne n."""
    s = terms.s(np.arange(1, inner.size + 1))
    p_hat = 0.0
    if np.any(s != 0):
        lse, sign = logsumexp(inner, b=s, return_sign=True)
        if sign != 0 and math.isfinite(lse):
            p_hat = float(sign) * _safe_exp(terms.log_c + float(lse), "p̂")
    return _finite(p_hat, "p̂")


def _eps(terms: SeriesTerms, N: int, M: int) -> float:
    first, second = _log_tails(terms, N, M)
    log_eps = terms.log_c + float(np.logaddexp(first, second)) + terms.x ** (3.0 / terms.upsilon) + terms.x ** 2
    # une borne trop grande pour un flottant laisse simplement la pièce indécise
    return math.inf if log_eps > LOG_FLOAT_MAX else math.exp(_finite(log_eps, "log ε"))


def terms_p_hat_eps(terms: SeriesTerms, N: int, M: int) -> Tuple[float, float]:
    if N < 1 or M < 0:
        raise ConfigError(f"il faut N >= 1 et M >= 0 (reçus {N}, {M})")
    if terms.x == 0.0:
        return 0.0, 0.0
    inner = logsumexp(_log_term_grid(terms, np.arange(1, N + 1), np.arange(M + 1)), axis=1)
    return _p_hat_from_inner(terms, inner), _eps(terms, N, M)


def p_hat_eps(inp: RegimeCoinInput, regime: str, N: int, M: int) -> Tuple[float, float]:
    """Somme partielle p̂(N, M) et borne ε(N, M) avec |p - p̂| < ε."""
    return terms_p_hat_eps(series_terms(inp, regime), N, M)


class _MHatSequence:
    """M̂(0) = 0 puis, pour N >= 1, le plus petit M >= M̂(N-1) équilibrant les deux restes."""

    def __init__(self, terms: SeriesTerms):
        self.terms = terms
        self.values = [0]

    def __getitem__(self, N: int) -> int:
        if N < 0:
            raise ConfigError(f"N doit être >= 0 (reçu {N})")
        while len(self.values) <= N:
            n = len(self.values)
            M = self.values[-1]
            if self.terms.x > 0:
                first, _ = _log_tails(self.terms, n, 0)
                while _log_tails(self.terms, n, M)[1] > first:
                    M += 1
                    if M > M_SCAN_LIMIT:
                        raise SeriesOverflowError(f"M̂({n}) dépasse {M_SCAN_LIMIT} (x={self.terms.x:.6g})")
            self.values.append(M)
        return self.values[N]


def m_hat(N: int, inp: RegimeCoinInput, regime: Optional[str] = None) -> int:
    """M̂(N) ; le régime se déduit de gT[0] (nul en régime C) s'il n'est pas donné."""
    if regime is None:
        regime = REGIME_C if inp.gT[0] == 0.0 else REGIME_B
    return _MHatSequence(series_terms(inp, regime))[N]


class RegimeSeriesApproximator:
    """
    Suite (p̂(n), ε(n)) = (p̂(n, M̂(n)), ε(n, M̂(n))), n = 1, 2, ...
    Les sommes intérieures de chaque ligne sont conservées d'un pas à l'autre :
    un pas n'ajoute que la ligne n et les colonnes M̂(n-1)+1..M̂(n) des lignes existantes.
    """

    def __init__(self, terms: SeriesTerms):
        self.terms = terms
        self._m_hat = _MHatSequence(terms)

    def __iter__(self) -> Iterator[Tuple[float, float]]:
        terms = self.terms
        if terms.x == 0.0:
            while True:
                yield 0.0, 0.0
        inner = np.empty(0)
        M = -1
        n = 1
        while True:
            M_new = self._m_hat[n]
            if inner.size and M_new > M:
                extra = _log_term_grid(terms, np.arange(1, n), np.arange(M + 1, M_new + 1))
                inner = np.logaddexp(inner, logsumexp(extra, axis=1))
            row = logsumexp(_log_term_grid(terms, [n], np.arange(M_new + 1)), axis=1)
            inner = np.concatenate([inner, row])
            M = M_new
            yield _p_hat_from_inner(terms, inner), _eps(terms, n, M)
            n += 1


def p_A_cross_prob(d_left: float, d_right: float, length: float) -> float:
    """Probabilité que deux ponts indépendants d'écarts d_left, d_right se croisent."""
    if not d_left * d_right > 0:
        raise ConfigError(f"écarts de signes différents ou nuls : {d_left}, {d_right}")
    if not length > 0:
        raise ConfigError(f"longueur non positive : {length}")
    return math.exp(-abs(d_left * d_right) / length)


def toss_regime_coin(
    stream: RngStream,
    inp: RegimeCoinInput,
    regime: str,
    gamma: float = DEFAULT_GAMMA,
    ceiling: int = DEFAULT_COIN_CEILING,
    tally: Optional[Counter] = None,
) -> int:
    """
    Pièce B ou C (1 = pas de croisement) avec le protocole de repli en gamma :
    la série n'est évaluée que si les écarts restent sous gamma·sqrt(len) et 2·gamma·sqrt(len).
    Les branches d'approximation fixent la probabilité de croisement à 0, sauf
    lorsque seul g[0] est loin de 0 : la pièce A sur g[1] remplace alors la série.
    """
    inp = reflect(inp)
    level = gamma * math.sqrt(inp.length)
    a1 = (abs(inp.g0[0]), abs(inp.gT[0]))
    a2 = (abs(inp.g0[1]), abs(inp.gT[1]))
    tally = tally if tally is not None else Counter()

    if min(a1) < level and max(a1) < 2 * level and min(a2) < level and max(a2) < 2 * level:
        try:
            approx = RegimeSeriesApproximator(series_terms(inp, regime))
            bit = toss_p_coin(stream, approx, ceiling)
        except SeriesOverflowError as exc:
            logger.warning("série %s inexploitable (%s) : croisement approché par 0", regime, exc)
            tally["overflow"] += 1
            return 1
        tally["exact"] += 1
        return bit
    if min(a2) >= level:
        tally["far"] += 1
        return 1
    if min(a1) >= level:
        tally["p_a_substitute"] += 1
        return 0 if sample_uniform(stream) < p_A_cross_prob(inp.g0[1], inp.gT[1], inp.length) else 1
    tally["wide"] += 1
    logger.debug("pièce %s hors seuils gamma (g0=%s, gT=%s, len=%.3g) : croisement approché par 0",
                 regime, inp.g0, inp.gT, inp.length)
    return 1
