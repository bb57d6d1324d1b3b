"""
Utility helpers for subspace-witness

CSV artifact writing and per-point random generators.
"""

from .csv_io import read_csv, read_measurements, write_csv, write_measurements
from .seeding import derive_rng, point_rngs

__all__ = [
    "read_csv",
    "read_measurements",
    "write_csv",
    "write_measurements",
    "derive_rng",
    "point_rngs",
]
