"""
Pydantic schemas for problem documents and periodicity verdicts.

Schemas:
    problem: ProblemConfig and its nested specs (unknown keys rejected)
    verdict: Verdict, Witness, ModeEvidence, CommensurabilityReport

Usage:
    from schemas.problem import ProblemConfig
    from schemas.verdict import Verdict, VerdictKind

Example:
    config = ProblemConfig(
        preset="ls-dirichlet",
        omega=9.8696044010893586,
        boundary={"G0": [[1, 0.0, -0.5], [-1, 0.0, 0.5]]},
    )
"""

__all__ = [
    "ProblemConfig",
    "InitialDatumSpec",
    "Verdict",
    "VerdictKind",
    "Witness",
]
