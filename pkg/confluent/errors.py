"""
Hiérarchie d'exceptions du paquet confluent.
Toutes les erreurs levées volontairement par la bibliothèque dérivent de ConfluentError,
ce qui permet au CLI de les intercepter en un seul point.
"""


class ConfluentError(Exception):
    """Racine des erreurs de la bibliothèque."""


class ConfigError(ConfluentError, ValueError):
    """Paramètre invalide ou précondition non respectée."""


class DomainError(ConfluentError, ValueError):
    """Coefficient de diffusion non strictement positif rencontré (transformée de Lamperti)."""


class CoinCeilingError(ConfluentError):
    """
    Une p-pièce n'a pas pu conclure : plafond d'itérations atteint, ou ε est passé
    sous l'epsilon machine alors que U reste dans (p̂ - ε, p̂ + ε).
    """


class SeriesOverflowError(ConfluentError, ArithmeticError):
    """Terme non fini dans les séries des régimes B/C malgré le calcul en log."""


class AcceptanceStarvationError(ConfluentError):
    """Trop de rejets consécutifs dans un échantillonneur par rejet."""


class BudgetExhausted(ConfluentError):
    """Le budget de temps du PSRS de référence pour les ponts est épuisé."""
