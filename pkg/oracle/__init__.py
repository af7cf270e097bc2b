"""
Independent reference solver.

Modules:
    collocation: Chebyshev grid, differentiation and resampling matrices
    stepper: Crank-Nicolson integration with rectangular projection
    verification: Richardson-checked comparison with u_1 + u_2
"""

__all__ = ["collocation", "stepper", "verification"]
