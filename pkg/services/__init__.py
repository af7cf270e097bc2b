"""
Service layer between problem documents, the numerical packages and report files.

Modules:
    problem_service: Config loading, problem resolution, initial data, decomposition references
    report_service: Atomic CSV/JSON artefacts with resolved-config sidecars
"""
