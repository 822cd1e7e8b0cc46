"""
Chargement des fichiers de résultats de bridge-bench pour le visualiseur,
et agrégats calculés à partir de ces tableaux.
"""
import math
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd
import streamlit as st
from scipy import stats

from confluent.errors import ConfigError
from confluent.results import parse_results

SESSION_KEY = "bench_results"
# Dossier où le visualiseur cherche des fichiers par défaut
RESULTS_DIR = Path(__file__).parent.parent / "results"


def format_seconds(value) -> str:
    """
    Formate une durée en secondes de façon lisible.
    Ex: 0.00042 -> "0.42 ms", 12.3 -> "12.3 s"
    """
    try:
        value = float(value)
    except (TypeError, ValueError):
        return "N/A"
    if not math.isfinite(value):
        return "N/A"
    if value < 1.0:
        return f"{value * 1000:.3g} ms"
    return f"{value:.3g} s"


@st.cache_data(ttl=3600)
def load_results_text(text: str) -> Tuple[pd.DataFrame, Dict]:
    """Analyse le contenu d'un fichier ; renvoie un tableau vide si le format est invalide."""
    try:
        return parse_results(text)
    except (ConfigError, ValueError, KeyError) as e:
        st.error(f"Fichier de résultats invalide : {e}")
        return pd.DataFrame(), {}


def load_results_path(path) -> Tuple[pd.DataFrame, Dict]:
    path = Path(path)
    if not path.is_file():
        st.warning(f"Fichier de résultats introuvable : {path}")
        return pd.DataFrame(), {}
    return load_results_text(path.read_text(encoding="utf-8"))


def list_result_files(directory: Path = RESULTS_DIR):
    if not directory.is_dir():
        return []
    return sorted(p for p in directory.iterdir() if p.suffix in (".csv", ".json"))


def store_results(df: pd.DataFrame, header: Dict) -> None:
    """Partage le fichier chargé entre les pages."""
    st.session_state[SESSION_KEY] = (df, header)


def get_results(experiment: Optional[str] = None) -> Tuple[pd.DataFrame, Dict]:
    """Résultats chargés sur l'accueil, filtrés sur une expérience si demandé."""
    df, header = st.session_state.get(SESSION_KEY, (pd.DataFrame(), {}))
    if experiment is not None and header.get("experiment") != experiment:
        return pd.DataFrame(), {}
    return df, header


def midpoint_summary(df: pd.DataFrame) -> pd.DataFrame:
    """Moyenne, écart-type et effectif du point milieu par méthode (expérience bias)."""
    if df.empty:
        return pd.DataFrame(columns=["method", "n", "mean", "std"])
    grouped = df.groupby("method", sort=False)["midpoint"]
    return pd.DataFrame({
        "n": grouped.size(),
        "mean": grouped.mean(),
        "std": grouped.std(),
    }).reset_index()


def ks_frame(header: Dict) -> pd.DataFrame:
    """Tableau KS enregistré dans les métadonnées du fichier bias."""
    table = header.get("meta", {}).get("ks", [])
    return pd.DataFrame(table, columns=["method", "delta", "ks_statistic", "p_value"])


def brownian_midpoint_density(meta: Dict, grid: np.ndarray) -> Optional[np.ndarray]:
    """
    Densité exacte du point milieu quand le modèle est brownien : N((x0 + xT)/2, T/4).
    None pour les autres modèles ou si plusieurs horizons sont présents.
    """
    if meta.get("model") != "brownian" or len(meta.get("T", [])) != 1:
        return None
    T = float(meta["T"][0])
    mean = 0.5 * (float(meta["x0"]) + float(meta["xT"]))
    return stats.norm.pdf(grid, loc=mean, scale=math.sqrt(T / 4.0))


def timing_summary(df: pd.DataFrame) -> pd.DataFrame:
    """Médiane et quartiles des temps par (méthode, T) ; les PSRS hors budget sont comptés à part."""
    if df.empty:
        return pd.DataFrame(columns=["method", "T", "median", "q1", "q3", "n", "budget_exhausted"])
    rows = []
    for (method, T), group in df.groupby(["method", "T"], sort=True):
        ok = group.loc[group["status"] == "ok", "seconds"]
        rows.append(dict(
            method=method,
            T=T,
            median=float(ok.median()) if len(ok) else float("nan"),
            q1=float(ok.quantile(0.25)) if len(ok) else float("nan"),
            q3=float(ok.quantile(0.75)) if len(ok) else float("nan"),
            n=int(len(group)),
            budget_exhausted=int((group["status"] == "budget_exhausted").sum()),
        ))
    return pd.DataFrame(rows)


def median_ratio(df: pd.DataFrame, t_high: float, t_low: float, method: str = "cdb") -> Optional[float]:
    """Rapport des temps médians entre deux horizons (croissance linéaire attendue : t_high / t_low)."""
    subset = df[(df["method"] == method) & (df["status"] == "ok")]
    high = subset.loc[np.isclose(subset["T"], t_high), "seconds"]
    low = subset.loc[np.isclose(subset["T"], t_low), "seconds"]
    if high.empty or low.empty or low.median() <= 0:
        return None
    return float(high.median() / low.median())


def paths_for(df: pd.DataFrame, T: float) -> pd.DataFrame:
    """Trajectoires d'un horizon, triées par pont puis par instant."""
    subset = df[np.isclose(df["T"], T)]
    return subset.sort_values(["bridge", "t"]).reset_index(drop=True)


def bridge_slider_range(n_bridges: int, default: int = 10) -> Optional[Tuple[int, int]]:
    """(maximum, valeur initiale) du curseur de ponts ; None s'il n'y a rien à choisir (st.slider exige min < max)."""
    if n_bridges <= 1:
        return None
    return n_bridges, min(default, n_bridges)
