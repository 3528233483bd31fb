"""
Verification checks, reports and the command implementations
"""

from .checks import REGISTRY, SUITES, checks_for_suite, run_checks
from .report import VerificationReport, build_report, strip_volatile, write_report, export_report_to_excel
from .commands import cmd_norm, cmd_conjugate, cmd_verify

__all__ = [
    'REGISTRY',
    'SUITES',
    'checks_for_suite',
    'run_checks',
    'VerificationReport',
    'build_report',
    'strip_volatile',
    'write_report',
    'export_report_to_excel',
    'cmd_norm',
    'cmd_conjugate',
    'cmd_verify'
]
