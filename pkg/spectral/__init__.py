"""
Spectral analysis of time-periodic boundary value problems.

This package turns Fourier boundary data into periodicity statements:

Modules:
    dtn: Per-mode Dirichlet-to-Neumann systems with resonance detection
    detfun: Stokes boundary determinants, zero counting and zero location
    periodic: Mode profiles U_n, the periodic solution u_1 and its datum u_T
    homogeneous: Sine, cosine and biorthogonal series for the remainder u_2
    contour: Contour-integral remainder for the decoupled Stokes problem
    commensurability: Rational dependence of T and 2/pi, resonance sets
    classify: Periodicity verdicts with witnesses and evidence

Pipeline:
    1. solve_dtn recovers the unprescribed boundary coefficients
    2. build_periodic_solution assembles u_1 from the recovered traces
    3. the homogeneous modules evolve u_0 - u_T
    4. classify combines resonance, spectral and number-theoretic evidence

Usage:
    from spectral.dtn import solve_dtn
    from spectral.periodic import build_periodic_solution, eval_u1
    from spectral.classify import classify
"""

__all__ = [
    "dtn",
    "detfun",
    "periodic",
    "homogeneous",
    "contour",
    "commensurability",
    "classify",
]
