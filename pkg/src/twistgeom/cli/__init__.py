"""Command-line interface: ``verify``, ``torsion``, ``fermionic`` and ``spectral``."""

from .config import RunConfig, build_config
from .report import Check, Report

__all__ = ["RunConfig", "build_config", "Check", "Report"]
