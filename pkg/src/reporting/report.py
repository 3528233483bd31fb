"""
Verification Report Module
Assembles check results into a schema-versioned report, writes it as JSON
and exports the per-check table to Excel
"""

import json
import math
from copy import deepcopy
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd
import pytz

from src.config import REPORT_SCHEMA
from src.core.extended_real import to_json
from src.exceptions import VectorFileError
from src.reporting.checks import CheckResult
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

VOLATILE_KEYS = ('generated_at',)
VOLATILE_CHECK_KEYS = ('runtime_s',)
SETTINGS_IN_REPORT = (
    'dims', 'lambda_max', 'restarts', 'theorem_restarts', 'rel_tol', 'zero_tol',
    'biconj_tol', 'ceiling_slack', 'tie_rel_gap', 'enumeration_cap',
)


def json_safe(value: Any) -> Any:
    """Infinities become "+inf" / "-inf"; containers are walked."""
    if isinstance(value, float) and math.isinf(value):
        return to_json(value)
    if isinstance(value, dict):
        return {key: json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    return value


@dataclass
class VerificationReport:
    """Result of one `verify` run."""

    suite: str
    seed: int
    settings: Dict[str, Any]
    checks: List[CheckResult] = field(default_factory=list)
    generated_at: str = ''

    @property
    def summary(self) -> Dict[str, int]:
        statuses = [check.status for check in self.checks]
        return {
            'total': len(statuses),
            'passed': statuses.count('pass'),
            'failed': statuses.count('fail'),
            'errors': statuses.count('error'),
        }

    @property
    def passed(self) -> bool:
        return all(check.status == 'pass' for check in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return json_safe({
            'schema': REPORT_SCHEMA,
            'suite': self.suite,
            'seed': self.seed,
            'index_base': 0,
            'generated_at': self.generated_at,
            'settings': self.settings,
            'checks': [asdict(check) for check in self.checks],
            'summary': self.summary,
        })

    def to_frame(self) -> pd.DataFrame:
        """One row per check, as exported to Excel."""
        rows = [{
            'check_id': check.check_id,
            'suite': check.suite,
            'statement': check.statement,
            'reference': check.reference,
            'status': check.status,
            'worst_gap': check.worst_gap,
            'cases': check.cases,
            'runtime_s': round(check.runtime_s, 3),
            'message': check.message,
        } for check in self.checks]
        return pd.DataFrame(rows, columns=[
            'check_id', 'suite', 'statement', 'reference', 'status', 'worst_gap', 'cases', 'runtime_s',
            'message',
        ])


def utc_timestamp() -> str:
    return datetime.now(pytz.UTC).isoformat(timespec='seconds')


def build_report(suite: str, settings: Dict[str, Any], checks: List[CheckResult]) -> VerificationReport:
    """
    Assemble a VerificationReport

    Args:
        suite: Suite name given on the command line
        settings: Resolved settings (only the solver ones are recorded)
        checks: Check results in registry order

    Returns:
        VerificationReport stamped with the current UTC time
    """
    recorded = {key: settings[key] for key in SETTINGS_IN_REPORT if key in settings}
    report = VerificationReport(
        suite=suite,
        seed=int(settings['seed']),
        settings=recorded,
        checks=list(checks),
        generated_at=utc_timestamp(),
    )
    summary = report.summary
    logger.info(
        f"Report for suite '{suite}': {summary['passed']}/{summary['total']} passed, "
        f"{summary['failed']} failed, {summary['errors']} errors"
    )
    return report


def strip_volatile(report: Dict[str, Any]) -> Dict[str, Any]:
    """Copy of a report dict without timestamps and runtimes (the determinism contract)."""
    stripped = deepcopy(report)
    for key in VOLATILE_KEYS:
        stripped.pop(key, None)
    for check in stripped.get('checks', []):
        for key in VOLATILE_CHECK_KEYS:
            check.pop(key, None)
    return stripped


def write_report(report: VerificationReport, output_file: Union[str, Path]) -> Path:
    """Write the report as indented JSON; returns the path."""
    output_file = Path(output_file)
    try:
        output_file.parent.mkdir(parents=True, exist_ok=True)
        with open(output_file, 'w', encoding='utf-8') as handle:
            json.dump(report.to_dict(), handle, indent=2)
            handle.write('\n')
    except OSError as e:
        logger.error(f"Error writing report to {output_file}: {str(e)}")
        raise VectorFileError(f"Cannot write report {output_file}: {e}") from e
    logger.info(f"Report written to {output_file}")
    return output_file


def export_report_to_excel(report: VerificationReport, output_file: Union[str, Path]) -> Path:
    """
    Export the per-check table and the summary to an Excel workbook

    Args:
        report: VerificationReport to export
        output_file: Target .xlsx path

    Returns:
        Path of the written workbook
    """
    output_file = Path(output_file)
    logger.info(f"Exporting report to {output_file}...")
    summary = pd.DataFrame([{
        'suite': report.suite,
        'seed': report.seed,
        'generated_at': report.generated_at,
        **report.summary,
    }])
    try:
        output_file.parent.mkdir(parents=True, exist_ok=True)
        with pd.ExcelWriter(output_file, engine='openpyxl') as writer:
            report.to_frame().to_excel(writer, sheet_name='Checks', index=False)
            summary.to_excel(writer, sheet_name='Summary', index=False)
    except OSError as e:
        logger.error(f"Error exporting report to {output_file}: {str(e)}")
        raise VectorFileError(f"Cannot write workbook {output_file}: {e}") from e
    return output_file
