"""
Core types and configuration for the periodicity toolkit.

This package provides the foundations shared by every numerical module:

Modules:
    config: Numerical defaults and environment variable management
    logging: Logging configuration (stdlib handlers, structlog events)
    exceptions: Custom exception hierarchy with structured context
    symbol: Dispersion monomial, symbol polynomials c_j and mode roots
    boundary: Fourier boundary tables, traces, couplings, mode rationals
    presets: The Schroedinger, heat and Stokes problem families

Usage:
    from core.config import settings
    from core.logging import setup_logging
    from core.symbol import DispersionMonomial, denominator_roots
    from core.presets import Preset, ls_dirichlet_data

Example:
    setup_logging()

    pde = DispersionMonomial(a=1j, order=2)
    spectrum = denominator_roots(pde, omega=math.pi ** 2, n=1)
    print(spectrum.roots)
"""

__all__ = [
    "config",
    "logging",
    "exceptions",
    "symbol",
    "boundary",
    "presets",
]
