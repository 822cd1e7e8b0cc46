"""
Échantillonnage exact de ponts de diffusion par confluence (CDB),
avec le rejet exact sur trajectoires (PSRS) et le schéma d'Euler (SDB) comme références.
"""
from confluent.cdb import run_cdb
from confluent.diffusion_model import DiffusionSpec, brownian_spec, langevin_t_spec, validate_assumptions
from confluent.psrs import psrs_bridge, psrs_unconditioned
from confluent.rngkit import RngStream
from confluent.sdb import run_sdb

__version__ = "0.1.0"

__all__ = [
    "DiffusionSpec",
    "RngStream",
    "brownian_spec",
    "langevin_t_spec",
    "psrs_bridge",
    "psrs_unconditioned",
    "run_cdb",
    "run_sdb",
    "validate_assumptions",
]
