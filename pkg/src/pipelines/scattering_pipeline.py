#!/usr/bin/env python3
"""
Scattering Pipeline - command-line front end.
Runs the combinatorial analysis, the degeneration homotopy, the CHY census,
Hilbert function tables and eliminants, and re-certifies stored reports.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.core.arrangement import ArrangementMatrix, load_instance, parse_complex_vector
from src.core.chy import boundary_census, build_chy, extra_type_two_flats, sub_scattering_check
from src.core.errors import CountError, MalformedInput, NotEssential, ScatteringError
from src.core.hilbert import (
    eliminant,
    eliminant_roots,
    hilbert_function_RL,
    hilbert_regularity_RL,
    hilbert_series_numerator,
    quotient_hilbert_function,
    random_rational_vector,
)
from src.core.homotopy import random_complex, track_all, verify_solution_set
from src.core.matroid import (
    LinearMatroid,
    beta_invariant,
    characteristic_polynomial,
    circuits,
    degree_criterion,
    flats,
    is_connected,
    ml_degree,
    reciprocal_degree,
)
from src.utils.config import RunConfig, TrackerConfig
from src.utils.exact_linalg import to_rational
from src.utils.report_checker import ReportChecker
from src.utils.serialization import dumps, load_json, save_json, to_jsonable

COMMANDS = ('analyze', 'solve', 'chy', 'hilbert', 'eliminant', 'certify')
EXHAUSTIVE_FLAT_LIMIT = 6


class ScatteringPipeline:
    """
    One object per invocation; every random draw comes from a single
    generator seeded with the run seed.
    """

    def __init__(self, tracker: Optional[TrackerConfig] = None, verbose: bool = False, debug: bool = False):
        self.tracker = tracker or TrackerConfig()
        self.verbose = verbose

        # Set up logging based on verbosity
        if debug:
            level = logging.DEBUG
        elif verbose:
            level = logging.INFO
        else:
            level = logging.WARNING
        logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')
        self.logger = logging.getLogger(__name__)

    def load(self, path: str) -> Tuple[ArrangementMatrix, Optional[np.ndarray]]:
        arrangement, u = load_instance(path)
        self.logger.info(f"Loaded instance {path}: d={arrangement.d}, n={arrangement.n}")
        return arrangement, u

    def analyze(self, arrangement: ArrangementMatrix) -> Dict[str, Any]:
        """Matroid statistics of an arrangement."""
        matroid = LinearMatroid(arrangement)
        circuit_list = circuits(arrangement, matroid)
        flat_list = flats(arrangement, matroid)
        by_type: Dict[str, int] = {}
        for flat in flat_list:
            by_type[flat.flat_type] = by_type.get(flat.flat_type, 0) + 1

        try:
            ml = ml_degree(arrangement, matroid)
            chi = characteristic_polynomial(arrangement, matroid)
        except NotEssential as e:
            self.logger.warning(e.message)
            ml, chi = None, None

        return {
            'command': 'analyze',
            'arrangement': arrangement.to_dict(),
            'circuits': [c.to_dict() for c in circuit_list],
            'flats': [f.to_dict() for f in flat_list],
            'flats_by_type': by_type,
            'reciprocal_degree': reciprocal_degree(arrangement, matroid=matroid),
            'ml_degree': ml,
            'characteristic_polynomial': chi,
            'criterion': degree_criterion(arrangement, matroid).to_dict(),
            'connected': is_connected(arrangement, matroid),
            'beta': beta_invariant(arrangement, matroid),
            'h_vector': hilbert_series_numerator(arrangement, matroid=matroid),
        }

    def solve(self, arrangement: ArrangementMatrix, u: Optional[np.ndarray], rng: np.random.Generator,
              omega: Optional[Sequence[int]] = None, A0: Optional[np.ndarray] = None,
              bench: bool = False) -> Dict[str, Any]:
        """Track all paths and certify the interior solutions."""
        if u is None:
            u = random_complex(rng, arrangement.n + 1)
            self.logger.info("No exponents given; drawing generic complex u")
        report = track_all(arrangement, u, omega, A0, self.tracker, rng, bench=bench)
        document = {
            'command': 'solve',
            'arrangement': arrangement.to_dict(),
            'u': u,
            'seed': self.tracker.seed,
            'report': report.to_dict(),
            'certificate': None,
        }
        if report.counts_check.get('ml_degree') is not None:
            try:
                document['certificate'] = verify_solution_set(arrangement, u, report, self.tracker.tol_verify)
            except CountError as e:
                e.details['report'] = to_jsonable(document)
                raise
        return document

    def chy(self, m: int, rng: np.random.Generator) -> Dict[str, Any]:
        """Solve the scattering equations of L_m and tabulate the boundary strata."""
        instance = build_chy(m, rng=rng)
        tracker = replace(self.tracker, return_boundary=True)
        report = track_all(instance.arrangement, instance.s, config=tracker, rng=rng)
        census = boundary_census(instance, report)
        document = {
            'command': 'chy',
            'instance': instance.to_dict(),
            'seed': self.tracker.seed,
            'census': census.to_dict(),
            'counts_check': report.counts_check,
            'path_stats': report.path_stats,
            'sub_scattering_ok': sub_scattering_check(instance, census),
        }
        if m <= EXHAUSTIVE_FLAT_LIMIT:
            document['extra_type_two_flats'] = [list(f) for f in extra_type_two_flats(instance)]
        return document

    def hilbert(self, arrangement: ArrangementMatrix, q: int, rng: np.random.Generator,
                u: Optional[Sequence[Any]] = None, h: Optional[str] = None) -> Dict[str, Any]:
        """Hilbert functions of K[R_L] and of its linear section for degrees 0..q."""
        matroid = LinearMatroid(arrangement)
        rows = []
        for degree in range(q + 1):
            rows.append({
                'q': degree,
                'hf_reciprocal': hilbert_function_RL(arrangement, None, degree, matroid),
                'hf_quotient': quotient_hilbert_function(arrangement, degree, u, h, rng),
            })
        return {
            'command': 'hilbert',
            'arrangement': arrangement.to_dict(),
            'h': h,
            'table': rows,
            'h_vector': hilbert_series_numerator(arrangement, matroid=matroid),
            'regularity': hilbert_regularity_RL(arrangement, matroid=matroid),
            'reciprocal_degree': reciprocal_degree(arrangement, matroid=matroid),
        }

    def eliminant(self, arrangement: ArrangementMatrix, h1: str, h2: str, rng: np.random.Generator,
                  u: Optional[Sequence[Any]] = None, q: Optional[int] = None) -> Dict[str, Any]:
        if u is None:
            u = random_rational_vector(arrangement.n + 1, rng)
        result = eliminant(arrangement, u, h1, h2, q, rng=rng)
        return {
            'command': 'eliminant',
            'arrangement': arrangement.to_dict(),
            'u': list(u),
            'h1': h1,
            'h2': h2,
            'eliminant': result.to_dict(),
            'roots': eliminant_roots(result),
        }

    def certify(self, report_path: str) -> Tuple[int, Dict[str, Any]]:
        checker = ReportChecker(report_path, tol=self.tracker.tol_verify, verbose=self.verbose)
        summary = checker.run_checks()
        summary['command'] = 'certify'
        return (0 if checker.passed else CountError.exit_code), summary

    def run(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        """Dispatch one command; errors become exit codes with JSON bodies."""
        rng = np.random.default_rng(config.seed)
        try:
            if config.command == 'certify':
                if not config.report:
                    raise MalformedInput("certify needs --report")
                return self.certify(config.report)
            if config.command == 'chy':
                if config.m is None:
                    raise MalformedInput("chy needs --m")
                return 0, self.chy(config.m, rng)

            if not config.instance:
                raise MalformedInput(f"{config.command} needs an instance file")
            arrangement, u = self.load(config.instance)
            if config.u_file:
                u = _read_vector(config.u_file, arrangement.n + 1)

            if config.command == 'analyze':
                return 0, self.analyze(arrangement)
            if config.command == 'solve':
                A0 = _read_matrix(config.a0_file, arrangement.d, arrangement.n + 1) if config.a0_file else None
                return 0, self.solve(arrangement, u, rng, config.omega, A0, config.bench)
            if config.command == 'hilbert':
                q = config.q if config.q is not None else arrangement.d + 1
                return 0, self.hilbert(arrangement, q, rng, _rational_u(u), config.h1)
            if config.command == 'eliminant':
                if not (config.h1 and config.h2):
                    raise MalformedInput("eliminant needs --h1 and --h2")
                return 0, self.eliminant(arrangement, config.h1, config.h2, rng, _rational_u(u), config.q)
            raise MalformedInput(f"unknown command {config.command!r}")
        except ScatteringError as e:
            self.logger.error(f"{type(e).__name__}: {e.message}")
            return e.exit_code, e.to_dict()
        except FileNotFoundError as e:
            self.logger.error(str(e))
            return 1, {'error': 'FileNotFoundError', 'message': str(e), 'details': {}}


def _read_vector(path: str, length: int) -> np.ndarray:
    document = load_json(path)
    values = document.get('u') if isinstance(document, dict) else document
    return parse_complex_vector(values, length, 'u')


def _read_matrix(path: str, rows: int, cols: int) -> np.ndarray:
    document = load_json(path)
    values = document.get('A0') if isinstance(document, dict) else document
    if not isinstance(values, list) or len(values) != rows:
        raise MalformedInput(f"A0 must be a list of {rows} rows", {'rows': rows, 'cols': cols})
    return np.array([parse_complex_vector(row, cols, 'A0') for row in values])


def _rational_u(u: Optional[np.ndarray]) -> Optional[List[Any]]:
    """Exact exponents for the Macaulay computations; non-real or non-rational u are redrawn."""
    if u is None or np.any(np.asarray(u).imag != 0):
        return None
    values = [to_rational(float(v.real)) for v in u]
    return values if all(v != 0 for v in values) else None


def render_table(document: Dict[str, Any]) -> str:
    """Human-readable rendering of a result document."""
    command = document.get('command')
    if 'error' in document:
        return pd.DataFrame([{'error': document['error'], 'message': document['message']}]).to_string(index=False)
    if command == 'analyze':
        summary = {k: document[k] for k in ('reciprocal_degree', 'ml_degree', 'connected', 'beta')}
        summary['criterion'] = document['criterion']['verdict']
        frame = pd.DataFrame([summary])
        types = pd.DataFrame(sorted(document['flats_by_type'].items()), columns=['flat_type', 'count'])
        return frame.to_string(index=False) + "\n\n" + types.to_string(index=False)
    if command == 'solve':
        points = [
            {'solution': k, 'x': np.round(np.array([complex(*v) for v in p['x']]), 10).tolist(),
             'residual': p['residual'], 'hessian_ok': p['hessian_ok']}
            for k, p in enumerate(document['report']['interior'])
        ]
        stats = pd.DataFrame([document['report']['path_stats']])
        return pd.DataFrame(points).to_string(index=False) + "\n\n" + stats.to_string(index=False)
    if command == 'chy':
        strata = pd.DataFrame(document['census']['strata'])
        census = document['census']
        header = (f"m={census['m']}  interior {census['interior']} (expected {census['expected_interior']})  "
                  f"mass {census['total_mass']} (expected {census['expected_mass']})")
        columns = ['r', 'W', 'support', 'expected_points', 'observed_points',
                   'expected_multiplicity', 'observed_multiplicities']
        return header + "\n" + (strata[columns].to_string(index=False) if not strata.empty else "")
    if command == 'hilbert':
        return pd.DataFrame(document['table']).to_string(index=False)
    if command == 'eliminant':
        coefficients = document['eliminant']['coefficients']
        degree = len(coefficients) - 1
        frame = pd.DataFrame({'power': range(degree, -1, -1), 'coefficient': coefficients})
        return frame.to_string(index=False)
    if command == 'certify':
        issues = pd.DataFrame(document['issues'])
        summary = pd.DataFrame([document['summary']]).to_string(index=False)
        return summary + ("\n\n" + issues.to_string(index=False) if not issues.empty else "")
    return dumps(document)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Scattering equations of hyperplane arrangements')
    parser.add_argument('command', choices=COMMANDS, help='What to run')
    parser.add_argument('instance', nargs='?', help='Instance JSON file {"d", "n", "L", "u"?}')
    parser.add_argument('--m', type=int, help='Number of marked points for the chy command')
    parser.add_argument('--seed', type=int, default=None, help='Seed for every random draw')
    parser.add_argument('--omega', type=str, help='Weight order as comma-separated integers')
    parser.add_argument('--u-file', type=str, help='JSON file with the exponent vector u')
    parser.add_argument('--a0-file', type=str, help='JSON file with the d x (n+1) start matrix A0')
    parser.add_argument('--report', type=str, help='Stored solve report for certify')
    parser.add_argument('--q', type=int, help='Degree for hilbert and eliminant')
    parser.add_argument('--h1', type=str, help='Denominator linear form, e.g. "y1"')
    parser.add_argument('--h2', type=str, help='Numerator linear form, e.g. "y2"')
    parser.add_argument('--tol-corrector', type=float)
    parser.add_argument('--tol-zero', type=float)
    parser.add_argument('--tol-cluster', type=float)
    parser.add_argument('--max-steps', type=int)
    parser.add_argument('--workers', type=int, help='Worker processes for path tracking')
    parser.add_argument('--return-boundary', action=argparse.BooleanOptionalAction, default=None,
                        help='Include boundary clusters in the solve report (off unless set here '
                             'or through SCATTER_RETURN_BOUNDARY)')
    parser.add_argument('--format', choices=['json', 'table'], default='json')
    parser.add_argument('--out', type=str, help='Write the result here instead of stdout')
    parser.add_argument('--bench', action='store_true', help='Record wall time per phase')
    parser.add_argument('--verbose', '-v', action='store_true', help='Show progress and INFO logs')
    parser.add_argument('--debug', action='store_true', help='Show DEBUG logs')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    omega = None
    if args.omega:
        try:
            omega = [int(w) for w in args.omega.split(',')]
        except ValueError:
            raise MalformedInput(f"--omega must be comma-separated integers, got {args.omega!r}")
    tracker = TrackerConfig.from_env(
        defaults={'return_boundary': False},
        seed=args.seed,
        tol_corrector=args.tol_corrector,
        tol_zero=args.tol_zero,
        tol_cluster=args.tol_cluster,
        max_steps=args.max_steps,
        workers=args.workers,
        return_boundary=args.return_boundary,
        show_progress=args.verbose or None,
    )
    return RunConfig(
        command=args.command,
        instance=args.instance,
        m=args.m,
        seed=tracker.seed,
        omega=omega,
        u_file=args.u_file,
        a0_file=args.a0_file,
        report=args.report,
        q=args.q,
        h1=args.h1,
        h2=args.h2,
        output=args.out,
        format=args.format,
        bench=args.bench,
        verbose=args.verbose,
        tracker=tracker,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main function"""
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ScatteringError as e:
        print(dumps(e.to_dict()))
        return e.exit_code

    pipeline = ScatteringPipeline(config.tracker, verbose=config.verbose, debug=args.debug)
    code, document = pipeline.run(config)
    text = render_table(document) if config.format == 'table' else dumps(document)

    if config.output:
        if config.format == 'json':
            save_json(document, config.output)
        else:
            Path(config.output).write_text(text + "\n", encoding='utf-8')
        pipeline.logger.info(f"Result saved to: {config.output}")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
