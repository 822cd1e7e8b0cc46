"""
Écriture et relecture des fichiers de résultats du benchmark (CSV ou JSON).
Le CSV commence par une ligne de commentaire JSON décrivant le schéma ;
le JSON porte le même en-tête et les lignes sous la clé "rows".
"""
import io
import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import pandas as pd

from confluent.config import SCHEMA_VERSION
from confluent.errors import ConfigError

SCHEMAS = {
    "bias": ["method", "delta", "replicate", "midpoint"],
    "timing": ["method", "T", "replicate", "seconds", "status"],
    "paths": ["T", "bridge", "t", "value"],
}
FORMATS = ("csv", "json")
FLOAT_FORMAT = "%.17g"
HEADER_PREFIX = "# "


def make_header(experiment: str, meta: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    if experiment not in SCHEMAS:
        raise ConfigError(f"expérience inconnue : {experiment!r}")
    return {
        "schema_version": SCHEMA_VERSION,
        "experiment": experiment,
        "columns": SCHEMAS[experiment],
        "meta": meta or {},
    }


def _plain(value: Any) -> Any:
    if value is None or (isinstance(value, float) and value != value):
        return None
    if hasattr(value, "item"):
        value = value.item()
        if isinstance(value, float) and value != value:
            return None
    return value


def render_results(df: pd.DataFrame, experiment: str, fmt: str = "csv", meta: Optional[Dict[str, Any]] = None) -> str:
    """Texte du fichier de résultats ; déterministe pour un même tableau."""
    header = make_header(experiment, meta)
    columns = header["columns"]
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise ConfigError(f"colonnes manquantes pour {experiment} : {missing}")
    df = df[columns]
    if fmt == "csv":
        body = df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return HEADER_PREFIX + json.dumps(header, sort_keys=True) + "\n" + body
    if fmt == "json":
        # json.dumps écrit les flottants au plus court aller-retour, sans perte
        rows = [
            {c: _plain(v) for c, v in zip(columns, record)}
            for record in df.itertuples(index=False, name=None)
        ]
        return json.dumps({**header, "rows": rows}, sort_keys=True, indent=2) + "\n"
    raise ConfigError(f"format inconnu : {fmt!r} (attendu : {', '.join(FORMATS)})")


def write_results(
    df: pd.DataFrame,
    path: Union[str, Path],
    experiment: str,
    fmt: str = "csv",
    meta: Optional[Dict[str, Any]] = None,
) -> Path:
    path = Path(path)
    path.write_text(render_results(df, experiment, fmt, meta), encoding="utf-8")
    return path


def parse_results(text: str) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    """Relit un fichier produit par render_results ; le format est reconnu au premier caractère."""
    if text.startswith(HEADER_PREFIX):
        first, _, body = text.partition("\n")
        header = json.loads(first[len(HEADER_PREFIX):])
        df = pd.read_csv(io.StringIO(body), float_precision="round_trip")
    elif text.lstrip().startswith("{"):
        payload = json.loads(text)
        rows = payload.pop("rows")
        header = payload
        df = pd.DataFrame(rows, columns=header["columns"])
    else:
        raise ConfigError("fichier de résultats non reconnu (ni en-tête CSV, ni JSON)")
    if header.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"version de schéma {header.get('schema_version')} non prise en charge")
    if list(df.columns) != list(header["columns"]):
        raise ConfigError(f"colonnes {list(df.columns)} différentes du schéma {header['columns']}")
    return df, header


def read_results(path: Union[str, Path]) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    return parse_results(Path(path).read_text(encoding="utf-8"))
