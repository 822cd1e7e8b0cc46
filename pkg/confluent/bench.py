"""
CLI `bridge-bench` : reproduit à échelle réglable les expériences de biais,
de temps de calcul et de trajectoires, et écrit des fichiers CSV/JSON.
"""
import argparse
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from scipy import stats
from tqdm import tqdm

from confluent.cdb import run_cdb
from confluent.config import DEFAULT_PSRS_BUDGET_FACTOR, DEFAULT_PSRS_CUTOFF, SamplerSettings
from confluent.diffusion_model import build_model
from confluent.errors import BudgetExhausted, ConfigError, ConfluentError
from confluent.psrs import psrs_bridge
from confluent.results import FORMATS, write_results
from confluent.rngkit import RngStream
from confluent.sdb import run_sdb

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
EXPERIMENTS = ("bias", "timing", "paths")
MODELS = ("langevin-t", "brownian")

# Valeurs par défaut des trois expériences
EXPERIMENT_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "bias": dict(x0=2.0, xT=3.3, T=[4.0], dof=3.0, n_mcmc=50, n_bridges=1000),
    "timing": dict(x0=7.0, xT=7.0, T=[float(t) for t in list(range(1, 11)) + [20, 30, 50, 100]],
                   dof=100.0, n_mcmc=200, n_bridges=50),
    "paths": dict(x0=7.0, xT=7.0, T=[1.0, 4.0, 20.0, 100.0], dof=100.0, n_mcmc=50, n_bridges=30),
}
DEFAULT_SDB_DELTAS = [0.4, 0.2, 0.005]


@dataclass
class ExperimentConfig:
    experiment: str
    x0: float
    xT: float
    T: List[float]
    n_bridges: int
    n_mcmc: int
    model: str = "langevin-t"
    dof: Optional[float] = 3.0
    seed: int = 0
    stream_base: int = 0
    sdb_delta: List[float] = field(default_factory=lambda: list(DEFAULT_SDB_DELTAS))
    gamma: Optional[float] = None
    out: Optional[str] = None
    fmt: str = "csv"
    psrs_cutoff: float = DEFAULT_PSRS_CUTOFF
    psrs_budget_factor: float = DEFAULT_PSRS_BUDGET_FACTOR
    delta_max: Optional[float] = None
    coin_ceiling: Optional[int] = None
    aux_trials: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"expérience inconnue : {self.experiment!r}")
        if not self.T:
            raise ConfigError("la liste des horizons T est vide")
        if any(t <= 0 for t in self.T):
            raise ConfigError(f"horizons non positifs : {self.T}")
        if self.n_bridges < 1:
            raise ConfigError(f"--bridges doit être >= 1 (reçu {self.n_bridges})")
        if self.n_mcmc < 0:
            raise ConfigError(f"--mcmc-steps doit être >= 0 (reçu {self.n_mcmc})")
        if self.experiment == "bias" and any(d <= 0 for d in self.sdb_delta):
            raise ConfigError(f"pas SDB non positifs : {self.sdb_delta}")
        if self.fmt not in FORMATS:
            raise ConfigError(f"format inconnu : {self.fmt!r}")
        if self.workers < 1:
            raise ConfigError(f"--workers doit être >= 1 (reçu {self.workers})")
        if self.seed < 0 or self.stream_base < 0:
            raise ConfigError("--seed et --streams doivent être >= 0")

    def settings(self) -> SamplerSettings:
        """Réglages d'environnement, surchargés par les options explicites du CLI."""
        overrides = {k: v for k, v in dict(gamma=self.gamma, coin_ceiling=self.coin_ceiling,
                                           delta_max=self.delta_max, aux_trials=self.aux_trials).items()
                     if v is not None}
        return replace(SamplerSettings.from_env(), **overrides)

    @property
    def output_path(self) -> str:
        return self.out or f"{self.experiment}.{self.fmt}"


@dataclass(frozen=True)
class Job:
    """Une réplique : tout ce qu'il faut pour la rejouer dans un autre processus."""
    method: str
    method_index: int
    T_index: int
    replicate: int
    T: float
    x0: float
    xT: float
    model: str
    dof: Optional[float]
    n_mcmc: int
    seed: int
    stream_id: int
    settings: SamplerSettings
    delta: Optional[float] = None
    psrs_stream_id: Optional[int] = None
    psrs_budget_factor: float = DEFAULT_PSRS_BUDGET_FACTOR

    @property
    def order(self) -> Tuple[int, int, int]:
        return self.method_index, self.T_index, self.replicate


def stream_id_for(config: ExperimentConfig, method_index: int, T_index: int, replicate: int) -> int:
    """Identifiant de flux déterministe, disjoint pour chaque (méthode, T, réplique)."""
    return config.stream_base + (method_index * len(config.T) + T_index) * config.n_bridges + replicate


def _job(config: ExperimentConfig, method: str, method_index: int, T_index: int, replicate: int, **extra) -> Job:
    return Job(
        method=method, method_index=method_index, T_index=T_index, replicate=replicate,
        T=config.T[T_index], x0=config.x0, xT=config.xT, model=config.model, dof=config.dof,
        n_mcmc=config.n_mcmc, seed=config.seed,
        stream_id=stream_id_for(config, method_index, T_index, replicate),
        settings=config.settings(), **extra,
    )


def _final_cdb(job: Job, stream: RngStream):
    spec = build_model(job.model, job.dof)
    return run_cdb(stream, spec, job.x0, job.xT, job.T, job.n_mcmc, settings=job.settings)[-1]


def run_bias_job(job: Job) -> List[Dict[str, Any]]:
    stream = RngStream(job.seed, job.stream_id)
    if job.method == "cdb":
        midpoint = _final_cdb(job, stream).reveal(stream, job.T / 2.0)
    else:
        spec = build_model(job.model, job.dof)
        final = run_sdb(stream, spec, job.x0, job.xT, job.T, job.delta, job.n_mcmc)[-1]
        midpoint = final.value_at(job.T / 2.0)
    return [dict(method=job.method, delta=job.delta, replicate=job.replicate, midpoint=float(midpoint))]


def run_timing_job(job: Job) -> List[Dict[str, Any]]:
    started = time.perf_counter()
    _final_cdb(job, RngStream(job.seed, job.stream_id))
    cdb_seconds = time.perf_counter() - started
    rows = [dict(method="cdb", T=job.T, replicate=job.replicate, seconds=cdb_seconds, status="ok")]
    if job.psrs_stream_id is not None:
        spec = build_model(job.model, job.dof)
        budget = job.psrs_budget_factor * cdb_seconds
        started = time.perf_counter()
        try:
            psrs_bridge(RngStream(job.seed, job.psrs_stream_id), spec, job.x0, job.xT, job.T, budget_seconds=budget)
            status = "ok"
        except BudgetExhausted as exc:
            logger.info("%s", exc)
            status = "budget_exhausted"
        rows.append(dict(method="psrs", T=job.T, replicate=job.replicate,
                         seconds=time.perf_counter() - started, status=status))
    return rows


def run_paths_job(job: Job) -> List[Dict[str, Any]]:
    final = _final_cdb(job, RngStream(job.seed, job.stream_id))
    return [dict(T=job.T, bridge=job.replicate, t=t, value=z) for t, z in zip(final.times, final.z_values)]


RUNNERS = {"bias": run_bias_job, "timing": run_timing_job, "paths": run_paths_job}


def build_jobs(config: ExperimentConfig) -> List[Job]:
    reps = range(config.n_bridges)
    jobs: List[Job] = []
    if config.experiment == "bias":
        methods = [("cdb", None)] + [(f"sdb(delta={d:g})", d) for d in config.sdb_delta]
        for mi, (name, delta) in enumerate(methods):
            jobs += [_job(config, name, mi, ti, r, delta=delta) for ti in range(len(config.T)) for r in reps]
    elif config.experiment == "timing":
        for ti, T in enumerate(config.T):
            for r in reps:
                psrs_id = stream_id_for(config, 1, ti, r) if T <= config.psrs_cutoff else None
                jobs.append(_job(config, "cdb", 0, ti, r, psrs_stream_id=psrs_id,
                                 psrs_budget_factor=config.psrs_budget_factor))
    else:
        jobs = [_job(config, "cdb", 0, ti, r) for ti in range(len(config.T)) for r in reps]
    return sorted(jobs, key=lambda j: j.order)


def _tqdm_disable(progress: Optional[bool]) -> Optional[bool]:
    # None : tqdm se désactive seul hors terminal
    return None if progress is None else not progress


def execute(config: ExperimentConfig, progress: Optional[bool] = None) -> List[Dict[str, Any]]:
    """Exécute toutes les répliques ; l'ordre des lignes ne dépend pas de l'ordre de complétion."""
    jobs = build_jobs(config)
    runner = RUNNERS[config.experiment]
    desc = f"{config.experiment} ({len(jobs)} répliques)"
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(tqdm(pool.map(runner, jobs, chunksize=max(1, len(jobs) // (8 * config.workers))),
                                total=len(jobs), desc=desc, disable=_tqdm_disable(progress)))
    else:
        results = [runner(job) for job in tqdm(jobs, desc=desc, disable=_tqdm_disable(progress))]
    return [row for rows in results for row in rows]


def ks_table(df: pd.DataFrame) -> List[Dict[str, Any]]:
    """Statistique de Kolmogorov-Smirnov à deux échantillons de chaque variante SDB contre le CDB."""
    reference = df.loc[df["method"] == "cdb", "midpoint"].to_numpy()
    table = []
    for method, group in df[df["method"] != "cdb"].groupby("method", sort=False):
        if len(reference) == 0 or len(group) == 0:
            continue
        res = stats.ks_2samp(group["midpoint"].to_numpy(), reference)
        table.append(dict(method=method, delta=float(group["delta"].iloc[0]),
                          ks_statistic=float(res.statistic), p_value=float(res.pvalue)))
    return table


def run_experiment(config: ExperimentConfig, progress: Optional[bool] = None) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    rows = execute(config, progress)
    df = pd.DataFrame(rows)
    meta: Dict[str, Any] = {
        "model": config.model,
        "dof": config.dof,
        "x0": config.x0,
        "xT": config.xT,
        "T": list(config.T),
        "n_bridges": config.n_bridges,
        "n_mcmc": config.n_mcmc,
        "seed": config.seed,
        "streams": config.stream_base,
        "settings": asdict(config.settings()),
    }
    if config.experiment == "bias":
        meta["sdb_delta"] = list(config.sdb_delta)
        meta["ks"] = ks_table(df)
    if config.experiment == "timing":
        meta["psrs_cutoff"] = config.psrs_cutoff
        meta["psrs_budget_factor"] = config.psrs_budget_factor
    return df, meta


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"liste de nombres attendue, reçu {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bridge-bench", description="Benchmarks d'échantillonnage exact de ponts de diffusion.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--model", choices=MODELS, default="langevin-t")
        p.add_argument("--dof", type=float, help="degrés de liberté du modèle de Langevin-t")
        p.add_argument("--x0", type=float)
        p.add_argument("--xT", type=float)
        p.add_argument("--T", type=_float_list, help="horizons, ex. '1,2,5'")
        p.add_argument("--bridges", type=int, dest="n_bridges")
        p.add_argument("--mcmc-steps", type=int, dest="n_mcmc")
        p.add_argument("--sdb-delta", type=_float_list, default=list(DEFAULT_SDB_DELTAS))
        p.add_argument("--gamma", type=float)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--streams", type=int, default=0, dest="stream_base", help="premier identifiant de flux")
        p.add_argument("--format", choices=FORMATS, default="csv", dest="fmt")
        p.add_argument("--out")
        p.add_argument("--psrs-cutoff", type=float, default=DEFAULT_PSRS_CUTOFF)
        p.add_argument("--psrs-budget-factor", type=float, default=DEFAULT_PSRS_BUDGET_FACTOR)
        p.add_argument("--delta-max", type=float)
        p.add_argument("--coin-ceiling", type=int)
        p.add_argument("--aux-trials", type=int)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--no-progress", action="store_true")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values = dict(EXPERIMENT_DEFAULTS[args.experiment])
    for key in ("x0", "xT", "T", "dof", "n_mcmc", "n_bridges"):
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    return ExperimentConfig(
        experiment=args.experiment, model=args.model, seed=args.seed, stream_base=args.stream_base,
        sdb_delta=args.sdb_delta, gamma=args.gamma, out=args.out, fmt=args.fmt,
        psrs_cutoff=args.psrs_cutoff, psrs_budget_factor=args.psrs_budget_factor, delta_max=args.delta_max,
        coin_ceiling=args.coin_ceiling, aux_trials=args.aux_trials, workers=args.workers, **values,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format=LOG_FORMAT)
    try:
        config = config_from_args(args)
        df, meta = run_experiment(config, progress=False if args.no_progress else None)
        path = write_results(df, config.output_path, config.experiment, config.fmt, meta)
    except ConfluentError as exc:
        print(f"bridge-bench: erreur: {exc}", file=sys.stderr)
        return 1
    logger.info("%d lignes écrites dans %s", len(df), path)
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
