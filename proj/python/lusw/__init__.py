"""Stochastic rotating shallow water under location uncertainty."""

from ._core import (
    ConfigError,
    IntegrationError,
    IoError,
    canonical_config,
    cli,
    energy_flux,
    oracle_transport,
    params_digest,
    read_snapshot,
    run,
    swe_energy,
    write_snapshot,
)

__all__ = [
    "ConfigError",
    "IntegrationError",
    "IoError",
    "canonical_config",
    "cli",
    "energy_flux",
    "oracle_transport",
    "params_digest",
    "read_snapshot",
    "run",
    "swe_energy",
    "write_snapshot",
]
