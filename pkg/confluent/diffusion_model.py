"""
Description de l'EDS cible après réduction de Lamperti (volatilité unité),
vérification des hypothèses A1-A5 et modèles intégrés (Langevin-t, brownien).
"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate, optimize

from confluent.config import DEFAULT_GRID_HALF_WIDTH, DEFAULT_GRID_POINTS
from confluent.errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

RealFunction = Callable[[float], float]


@dataclass(frozen=True)
class DiffusionSpec:
    """
    EDS dY = alpha(Y) dt + dW.
    Phi minore phi, Psi majore sup(phi) - Phi, A_sup majore A = primitive de alpha.
    """
    alpha: RealFunction
    alpha_prime: RealFunction
    A: RealFunction
    Phi: float
    Psi: float
    A_sup: float
    speed_finite: bool = True
    name: str = "custom"


@dataclass(frozen=True)
class RawSde:
    """EDS d'origine dX = b(X) dt + sigma(X) dW, avant transformée de Lamperti."""
    b: RealFunction
    sigma: RealFunction
    sigma_prime: RealFunction


def phi(spec: DiffusionSpec, y):
    """phi(y) = (alpha(y)^2 + alpha'(y)) / 2, vectorisée si y est un tableau."""
    a = spec.alpha(y)
    return 0.5 * (a * a + spec.alpha_prime(y))


# Modèle de Langevin à loi invariante de Student

def _t_alpha(v: float, x):
    return -(v + 1.0) * x / (2.0 * (v + x * x))


def _t_alpha_prime(v: float, x):
    x2 = x * x
    return -(v + 1.0) * (v - x2) / (2.0 * (v + x2) ** 2)


def _t_A(v: float, x):
    return -((v + 1.0) / 4.0) * np.log1p(x * x / v)


def t_phi_closed_form(v: float, x):
    x2 = x * x
    return (v + 1.0) * (-2.0 * v + x2 * (v + 3.0)) / (8.0 * (v + x2) ** 2)


def t_phi_argmax(v: float) -> float:
    """Point x̄ > 0 où phi atteint son maximum."""
    return math.sqrt((7.0 * v + v * v) / (v + 3.0))


def langevin_t_spec(v: float) -> DiffusionSpec:
    if v <= 0:
        raise ConfigError(f"le nombre de degrés de liberté doit être > 0 (reçu {v})")
    Phi = -(v + 1.0) / (4.0 * v)
    phi_max = (v + 1.0) * (v + 3.0) ** 2 / (32.0 * (v * v + 5.0 * v))
    return DiffusionSpec(
        alpha=partial(_t_alpha, v),
        alpha_prime=partial(_t_alpha_prime, v),
        A=partial(_t_A, v),
        Phi=Phi,
        Psi=phi_max - Phi,
        A_sup=0.0,
        speed_finite=True,
        name=f"langevin-t(v={v:g})",
    )


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def brownian_spec() -> DiffusionSpec:
    """Mouvement brownien (alpha = 0) : cible exacte connue pour les ponts."""
    return DiffusionSpec(
        alpha=_zero,
        alpha_prime=_zero,
        A=_zero,
        Phi=0.0,
        Psi=0.0,
        A_sup=0.0,
        speed_finite=False,
        name="brownian",
    )


def build_model(name: str, dof: Optional[float] = None) -> DiffusionSpec:
    """Modèles exposés par le CLI."""
    if name == "langevin-t":
        if dof is None:
            raise ConfigError("le modèle langevin-t exige --dof")
        return langevin_t_spec(dof)
    if name == "brownian":
        return brownian_spec()
    raise ConfigError(f"modèle inconnu : {name!r}")


# Transformée de Lamperti

def _inverse_sigma(raw: RawSde, u: float) -> float:
    s = raw.sigma(u)
    if not s > 0:
        raise DomainError(f"sigma({u:g}) = {s} <= 0")
    return 1.0 / s


def lamperti(raw: RawSde, x: float, reference: float = 0.0) -> Tuple[float, float]:
    """
    y = eta(x) = intégrale de 1/sigma entre reference et x (quadrature adaptative),
    et la dérive unitaire alpha(y) = b/sigma(x) - sigma'(x)/2.
    """
    s = raw.sigma(x)
    if not s > 0:
        raise DomainError(f"sigma({x:g}) = {s} <= 0")
    y, _ = integrate.quad(partial(_inverse_sigma, raw), reference, x, limit=200)
    return float(y), float(raw.b(x) / s - 0.5 * raw.sigma_prime(x))


class LampertiTransform:
    """eta, son inverse (par recherche de racine) et la dérive unitaire alpha."""

    def __init__(self, raw: RawSde, reference: float = 0.0):
        self.raw = raw
        self.reference = reference

    def eta(self, x: float) -> float:
        return lamperti(self.raw, x, self.reference)[0]

    def eta_inverse(self, y: float) -> float:
        lo, hi = self.reference - 1.0, self.reference + 1.0
        for _ in range(60):
            if self.eta(lo) <= y <= self.eta(hi):
                break
            width = hi - lo
            lo, hi = lo - width, hi + width
        else:
            raise DomainError(f"eta^-1({y:g}) introuvable")
        return optimize.brentq(lambda x: self.eta(x) - y, lo, hi, xtol=1e-13)

    def drift(self, y: float) -> float:
        return lamperti(self.raw, self.eta_inverse(y), self.reference)[1]


def spec_from_raw(
    raw: RawSde,
    Phi: float,
    Psi: float,
    A_sup: float,
    reference: float = 0.0,
    speed_finite: bool = True,
    step: float = 1e-5,
) -> DiffusionSpec:
    """
    Construit une DiffusionSpec à partir d'une EDS brute.
    alpha' par différence centrée et A par quadrature ; les bornes restent fournies par l'utilisateur.
    """
    transform = LampertiTransform(raw, reference)
    drift = np.vectorize(transform.drift, otypes=[float])

    def alpha_prime(y):
        return (drift(np.asarray(y) + step) - drift(np.asarray(y) - step)) / (2.0 * step)

    def primitive(y):
        return np.vectorize(lambda b: integrate.quad(transform.drift, 0.0, b)[0], otypes=[float])(y)

    return DiffusionSpec(drift, alpha_prime, primitive, Phi, Psi, A_sup, speed_finite, name="lamperti")


# Vérification des hypothèses

@dataclass
class AssumptionCheck:
    assumption: str
    passed: bool
    worst_point: Optional[float] = None
    worst_value: Optional[float] = None
    detail: str = ""


@dataclass
class ValidationReport:
    checks: List[AssumptionCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> AssumptionCheck:
        for c in self.checks:
            if c.assumption == name:
                return c
        raise KeyError(name)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(c) for c in self.checks])


def default_grid(half_width: float = DEFAULT_GRID_HALF_WIDTH, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    return np.linspace(-half_width, half_width, points)


def _tail_stable(
    f: RealFunction,
    L: float,
    center: float = 0.0,
    rtol: float = 1e-3,
    decay: float = 0.8,
) -> Tuple[bool, float]:
    """
    Critère de finitude empirique de l'intégrale de f sur R.
    Masses ajoutées en passant de [-L, L] à [-2L, 2L] puis à [-4L, 4L] : l'intégrale
    est jugée finie si la première est négligeable (rtol) ou si la seconde décroît
    d'au moins le facteur decay, soit une queue plus légère que |y|^-1.3 environ.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        # le pic de l'intégrande est signalé à quad pour ne pas le manquer
        masses = [integrate.quad(f, center - w, center + w, points=[center], limit=400)[0] for w in (L, 2.0 * L, 4.0 * L)]
    if not all(math.isfinite(m) for m in masses) or masses[-1] <= 0:
        return False, masses[-1]
    near, far = masses[1] - masses[0], masses[2] - masses[1]
    if near <= rtol * masses[1]:
        return True, masses[-1]
    return far <= decay * near, masses[-1]


def validate_assumptions(
    spec: DiffusionSpec,
    grid: Sequence[float],
    horizon: float = 1.0,
    fd_step: float = 1e-5,
    rtol: float = 1e-6,
) -> ValidationReport:
    """
    Rapport par hypothèse (A1-A5 et borne A_sup) avec le pire point de la grille.
    A2 et A5 sont vérifiées par quadrature, à titre indicatif seulement.
    """
    y = np.asarray(grid, dtype=float)
    if y.size == 0:
        raise ConfigError("grille de validation vide")
    report = ValidationReport()

    # A1 : alpha' cohérente avec une différence centrée
    fd = (spec.alpha(y + fd_step) - spec.alpha(y - fd_step)) / (2.0 * fd_step)
    err = np.abs(spec.alpha_prime(y) - fd) / np.maximum(np.abs(fd), 1.0)
    i = int(np.argmax(err))
    report.checks.append(AssumptionCheck("A1", bool(err[i] <= rtol), float(y[i]), float(err[i]),
                                         "erreur relative alpha' vs différence centrée"))

    # A2 : intégrabilité de exp{A(u) - (u - x)^2 / 2T}
    L = max(float(np.max(np.abs(y))), 1.0)
    centres = np.unique(np.quantile(y, [0.0, 0.25, 0.5, 0.75, 1.0]))
    a2_ok, a2_worst, a2_value = True, None, None
    for x in centres:
        ok, value = _tail_stable(
            lambda u, x=x: float(np.exp(spec.A(u) - (u - x) ** 2 / (2.0 * horizon))), L + abs(x), center=float(x)
        )
        if not ok:
            a2_ok, a2_worst, a2_value = False, float(x), value
            break
    report.checks.append(AssumptionCheck("A2", a2_ok, a2_worst, a2_value, "quadrature de exp{A(u) - (u-x)^2/2T}"))

    values = phi(spec, y)
    # A3 : phi >= Phi
    gap = values - spec.Phi
    i = int(np.argmin(gap))
    report.checks.append(AssumptionCheck("A3", bool(gap[i] >= -1e-12), float(y[i]), float(values[i]),
                                         f"phi minimale vs Phi={spec.Phi:g}"))

    # A4 : phi - Phi <= Psi
    excess = gap - spec.Psi
    i = int(np.argmax(excess))
    report.checks.append(AssumptionCheck("A4", bool(excess[i] <= 1e-12), float(y[i]), float(values[i]),
                                         f"phi maximale vs Phi + Psi={spec.Phi + spec.Psi:g}"))

    # Borne A <= A_sup utilisée par l'échantillonneur des extrémités
    a_values = np.asarray(spec.A(y), dtype=float)
    i = int(np.argmax(a_values))
    report.checks.append(AssumptionCheck("A_sup", bool(a_values[i] <= spec.A_sup + 1e-12), float(y[i]),
                                         float(a_values[i]), f"A maximale vs A_sup={spec.A_sup:g}"))

    # A5 : mesure de vitesse finie
    ok, value = _tail_stable(lambda u: float(np.exp(2.0 * spec.A(u) - 2.0 * spec.A(0.0))), L)
    detail = "quadrature de exp{2A(y) - 2A(0)}"
    if ok != spec.speed_finite:
        detail += f" (désaccord avec speed_finite={spec.speed_finite})"
    report.checks.append(AssumptionCheck("A5", ok, None, value, detail))

    for c in report.checks:
        if not c.passed:
            logger.warning("hypothèse %s non vérifiée pour %s : %s (point %s)", c.assumption, spec.name, c.detail, c.worst_point)
    return report
