#!/usr/bin/env python3
"""
Report Checker for stored solve reports.
Re-certifies a saved solution set and lists inconsistencies by severity.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from src.core.arrangement import ArrangementMatrix, hessian_nondegenerate, parse_complex_vector, scattering_residual
from src.core.errors import CountError, InstanceError, MalformedInput, NotEssential
from src.core.homotopy import SolutionReport, verify_solution_set
from src.core.matroid import TYPE_II, LinearMatroid, ml_degree, reciprocal_degree
from src.utils.serialization import load_json

logger = logging.getLogger(__name__)


class ReportChecker:
    def __init__(self, source: Union[str, Path, Dict[str, Any]], tol: float = 1e-8, verbose: bool = False):
        self.source = source
        self.tol = tol
        self.verbose = verbose
        self.issues: List[Dict[str, Any]] = []

    def load_report(self) -> Tuple[ArrangementMatrix, np.ndarray, SolutionReport]:
        """Arrangement, exponents and solution report of a stored solve document."""
        document = self.source if isinstance(self.source, dict) else load_json(self.source)
        try:
            arrangement_data = document['arrangement']
            arrangement = ArrangementMatrix.from_rows(arrangement_data['L'], arrangement_data['d'],
                                                      arrangement_data['n'])
            u = parse_complex_vector(document['u'], arrangement.n + 1, 'u')
            report = SolutionReport.from_dict(document['report'])
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedInput(f"stored report is missing or has a malformed field: {e}")
        return arrangement, u, report

    def check_counts(self, arrangement: ArrangementMatrix, report: SolutionReport,
                     matroid: LinearMatroid) -> List[Dict[str, Any]]:
        issues = []
        try:
            expected = ml_degree(arrangement, matroid)
        except NotEssential as e:
            return [_issue('count', 'ml_degree', e.message, 'low')]
        if len(report.interior) != expected:
            issues.append(_issue('count', 'interior',
                                 f"{len(report.interior)} interior solutions but ML degree {expected}", 'high'))

        degree = reciprocal_degree(arrangement, matroid=matroid)
        if report.paths and len(report.paths) != degree:
            issues.append(_issue('count', 'paths',
                                 f"{len(report.paths)} paths but reciprocal degree {degree}", 'high'))
        mass = report.counts_check.get('boundary_mass')
        if mass is not None and report.boundary_clusters and \
                sum(c.multiplicity for c in report.boundary_clusters) != mass:
            issues.append(_issue('count', 'boundary_mass',
                                 "boundary clusters do not add up to the recorded boundary mass", 'medium'))
        return issues

    def check_residuals(self, arrangement: ArrangementMatrix, u: np.ndarray,
                        report: SolutionReport) -> List[Dict[str, Any]]:
        issues = []
        for k, point in enumerate(report.interior):
            try:
                residual = scattering_residual(arrangement, u, point.x)
                ok, _ = hessian_nondegenerate(arrangement, u, point.x)
            except InstanceError as e:
                issues.append(_issue('residual', f'solution_{k}', e.message, 'high'))
                continue
            if residual > self.tol:
                issues.append(_issue('residual', f'solution_{k}',
                                     f"scattering residual {residual:.3e} exceeds {self.tol:.0e}", 'high'))
            if not ok:
                issues.append(_issue('hessian', f'solution_{k}', "Hessian is degenerate", 'medium'))
        return issues

    def check_boundary_supports(self, report: SolutionReport, matroid: LinearMatroid) -> List[Dict[str, Any]]:
        issues = []
        for cluster in report.boundary_clusters:
            if not matroid.is_flat(cluster.support):
                issues.append(_issue('boundary', 'support',
                                     f"support {list(cluster.support)} is not a flat", 'medium'))
            elif matroid.make_flat(cluster.support).flat_type != TYPE_II:
                issues.append(_issue('boundary', 'support',
                                     f"support {list(cluster.support)} is not a type (ii) flat", 'medium'))
        return issues

    def check_certificate(self, arrangement: ArrangementMatrix, u: np.ndarray, report: SolutionReport,
                          matroid: LinearMatroid) -> Tuple[Optional[Dict[str, Any]], List[Dict[str, Any]]]:
        try:
            return verify_solution_set(arrangement, u, report, self.tol, matroid), []
        except (CountError, NotEssential) as e:
            return None, [_issue('certificate', type(e).__name__, e.message, 'high')]

    def run_checks(self) -> Dict[str, Any]:
        """Run all checks and return the summary document."""
        arrangement, u, report = self.load_report()
        matroid = LinearMatroid(arrangement)
        logger.info(f"Checking a report with {len(report.interior)} interior solutions")

        self.issues = []
        self.issues.extend(self.check_counts(arrangement, report, matroid))
        self.issues.extend(self.check_residuals(arrangement, u, report))
        self.issues.extend(self.check_boundary_supports(report, matroid))
        certificate, certificate_issues = self.check_certificate(arrangement, u, report, matroid)
        self.issues.extend(certificate_issues)
        logger.info(f"Found {len(self.issues)} issues")
        return self.generate_summary(self.issues, certificate)

    def generate_summary(self, issues: List[Dict[str, Any]],
                         certificate: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        summary = {
            'summary': {
                'total_issues': len(issues),
                'high_severity': len([i for i in issues if i['severity'] == 'high']),
                'medium_severity': len([i for i in issues if i['severity'] == 'medium']),
                'low_severity': len([i for i in issues if i['severity'] == 'low']),
            },
            'issues_by_type': {},
            'issues': issues,
            'certificate': certificate,
        }
        for issue in issues:
            summary['issues_by_type'].setdefault(issue['type'], []).append(issue)
        return summary

    @property
    def passed(self) -> bool:
        return not any(i['severity'] == 'high' for i in self.issues)


def _issue(issue_type: str, category: str, message: str, severity: str) -> Dict[str, Any]:
    return {'type': issue_type, 'category': category, 'issue': message, 'severity': severity}
