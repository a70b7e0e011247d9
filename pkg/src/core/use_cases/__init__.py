"""
Application use cases.

Async orchestration of the domain services. Independent work items are run
on a thread pool and assembled in input order.
"""

from .certify_robustness import CertificationRun, CertifyRobustnessUseCase
from .compact_network import CompactNetworkUseCase
from .compare_analyses import COMPARISON_COLUMNS, CompareAnalysesUseCase, ComparisonRun
from .run_audit import AuditOptions, AuditReport, RunAuditUseCase
from .sweep_deltas import SWEEP_COLUMNS, SweepDeltasUseCase, SweepRun
from .verify_implication import SUMMARY_COLUMNS, VerificationRun, VerifyImplicationUseCase

__all__ = [
    "CertificationRun", "CertifyRobustnessUseCase",
    "CompactNetworkUseCase",
    "COMPARISON_COLUMNS", "CompareAnalysesUseCase", "ComparisonRun",
    "AuditOptions", "AuditReport", "RunAuditUseCase",
    "SWEEP_COLUMNS", "SweepDeltasUseCase", "SweepRun",
    "SUMMARY_COLUMNS", "VerificationRun", "VerifyImplicationUseCase",
]
