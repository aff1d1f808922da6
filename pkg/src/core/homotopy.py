#!/usr/bin/env python3
"""
Degeneration homotopy for the linear section of a reciprocal linear space.

At t = 0 the circuit polynomials reduce to their initial monomials, whose
zero set is a union of coordinate subspaces, one per nbc basis.  Each start
point is the unique solution of the start linear system on one of these
subspaces.  Paths are followed with an RK4 predictor on the Davidenko
equation and a Newton corrector, along the arc t(s) = s + gamma s (1 - s).

The tracked system is square: the d linear equations, a random combination
R of the deformed circuit polynomials (n - d rows) and the affine patch
v . y = 1.  Endpoints are re-checked against every circuit polynomial.
"""

import logging
import time
from dataclasses import dataclass, field, replace
from multiprocessing import Pool
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from src.core.arrangement import (
    AffinePoint,
    ArrangementMatrix,
    certify_point,
    phi_inverse,
    polish,
)
from src.core.errors import (
    ChamberViolation,
    CountMismatch,
    DegenerateScale,
    InconsistentPoint,
    NotEssential,
    OnArrangement,
    RealityViolation,
    StartDegenerate,
)
from src.core.ideal import InitialIdeal, PolynomialBlock, circuit_polynomials, deform, initial_ideal
from src.core.matroid import (
    TYPE_II,
    Circuit,
    LinearMatroid,
    bounded_chamber_count,
    circuits,
    ml_degree,
    random_omega,
    to_mask,
    validate_omega,
)
from src.utils.config import TrackerConfig

logger = logging.getLogger(__name__)

STATUS_SUCCESS = "success"
STATUS_DIVERGED = "diverged"
STATUS_MIN_STEP = "min_step"
STATUS_MAX_STEPS = "max_steps"

DIVERGENCE_BOUND = 1e8
SINGULAR_CONDITION = 1e10
FAILURE_WARNING_FRACTION = 0.1
CONTRACTION = 0.75


@dataclass
class HomotopySystem:
    """H(y, t) squared up and patched; immutable once built."""
    A0: np.ndarray
    A_target: np.ndarray
    deformed_polys: List[Any]
    squareup: np.ndarray
    patch: np.ndarray
    gamma: complex
    block: PolynomialBlock = field(init=False, repr=False)

    def __post_init__(self):
        self.block = PolynomialBlock(self.deformed_polys, self.patch.shape[0])

    @property
    def nvars(self) -> int:
        return self.patch.shape[0]

    def arc(self, tau: float) -> Tuple[complex, complex]:
        """t(tau) and dt/dtau along the complex arc."""
        return tau + self.gamma * tau * (1.0 - tau), 1.0 + self.gamma * (1.0 - 2.0 * tau)

    def evaluate(self, y: np.ndarray, tau: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Square system value, Jacobian in y and derivative in tau."""
        t, slope = self.arc(tau)
        linear = (1.0 - t) * self.A0 + t * self.A_target
        values, jacobian, d_t = self.block.evaluate(y, t)
        F = np.concatenate([linear @ y, self.squareup @ values, [self.patch @ y - 1.0]])
        J = np.vstack([linear, self.squareup @ jacobian, self.patch[None, :]])
        F_tau = np.concatenate([(self.A_target - self.A0) @ y, self.squareup @ d_t, [0.0]]) * slope
        return F, J, F_tau

    def relative_residual(self, y: np.ndarray, tau: float) -> float:
        F, J, _ = self.evaluate(y, tau)
        return _relative(F, J, y)

    def target_residual(self, y: np.ndarray) -> float:
        """
        Residual of the full overdetermined target system at t = 1.

        Every row is measured against max|y|, never against its own terms:
        at a boundary point all monomials of some circuit vanish together.
        """
        linear = self.A_target @ y
        linear_scale = np.sum(np.abs(self.A_target), axis=1) * np.max(np.abs(y))
        values, _, _ = self.block.evaluate(y, 1.0)
        poly_scale = self.block.scales(y)
        ratios = np.concatenate([
            np.abs(linear) / np.maximum(linear_scale, 1e-300),
            np.abs(values) / np.maximum(poly_scale, 1e-300),
        ])
        return float(ratios.max(initial=0.0))


@dataclass
class TrackedPath:
    index: int
    start: np.ndarray
    status: str
    endpoint: np.ndarray
    t_reached: float
    newton_residual: float
    steps_taken: int
    singular: bool = False
    verified: bool = False
    support: Tuple[int, ...] = ()

    @property
    def finished(self) -> bool:
        """Reached the target, possibly at a singular endpoint."""
        return self.status == STATUS_SUCCESS or self.singular

    def to_dict(self) -> Dict[str, Any]:
        return {
            'index': self.index,
            'start': _pairs(self.start),
            'status': self.status,
            'endpoint': _pairs(self.endpoint),
            't_reached': float(self.t_reached),
            'newton_residual': float(self.newton_residual),
            'steps_taken': self.steps_taken,
            'singular': self.singular,
            'verified': self.verified,
            'support': list(self.support),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrackedPath":
        return cls(
            index=int(data['index']),
            start=_unpairs(data['start']),
            status=data['status'],
            endpoint=_unpairs(data['endpoint']),
            t_reached=float(data['t_reached']),
            newton_residual=float(data['newton_residual']),
            steps_taken=int(data['steps_taken']),
            singular=bool(data.get('singular', False)),
            verified=bool(data.get('verified', False)),
            support=tuple(data.get('support', ())),
        )


@dataclass
class BoundaryCluster:
    """Endpoints that converged to one boundary point."""
    support: Tuple[int, ...]
    representative: np.ndarray
    paths: List[int]
    flat_type: str
    singular: bool = False

    @property
    def multiplicity(self) -> int:
        return len(self.paths)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'support': list(self.support),
            'representative': _pairs(self.representative),
            'multiplicity': self.multiplicity,
            'paths': list(self.paths),
            'flat_type': self.flat_type,
            'singular': self.singular,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BoundaryCluster":
        return cls(
            support=tuple(data['support']),
            representative=_unpairs(data['representative']),
            paths=list(data['paths']),
            flat_type=data['flat_type'],
            singular=bool(data.get('singular', False)),
        )


@dataclass
class SolutionReport:
    interior: List[AffinePoint]
    interior_endpoints: List[np.ndarray]
    boundary_clusters: List[BoundaryCluster]
    path_stats: Dict[str, int]
    counts_check: Dict[str, Any]
    paths: List[TrackedPath] = field(default_factory=list)
    omega: Tuple[int, ...] = ()
    gamma: complex = 0j
    warnings: List[str] = field(default_factory=list)
    suspects: List[int] = field(default_factory=list)
    timings: Optional[Dict[str, float]] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'interior': [p.to_dict() for p in self.interior],
            'interior_endpoints': [_pairs(y) for y in self.interior_endpoints],
            'boundary_clusters': [c.to_dict() for c in self.boundary_clusters],
            'path_stats': dict(self.path_stats),
            'counts_check': dict(self.counts_check),
            'paths': [p.to_dict() for p in self.paths],
            'omega': list(self.omega),
            'gamma': [float(self.gamma.real), float(self.gamma.imag)],
            'warnings': list(self.warnings),
            'suspect_paths': list(self.suspects),
        }
        if self.timings is not None:
            data['timings'] = dict(self.timings)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolutionReport":
        return cls(
            interior=[AffinePoint.from_dict(p) for p in data.get('interior', [])],
            interior_endpoints=[_unpairs(y) for y in data.get('interior_endpoints', [])],
            boundary_clusters=[BoundaryCluster.from_dict(c) for c in data.get('boundary_clusters', [])],
            path_stats=dict(data.get('path_stats', {})),
            counts_check=dict(data.get('counts_check', {})),
            paths=[TrackedPath.from_dict(p) for p in data.get('paths', [])],
            omega=tuple(data.get('omega', ())),
            gamma=complex(*data.get('gamma', [0.0, 0.0])),
            warnings=list(data.get('warnings', [])),
            suspects=list(data.get('suspect_paths', [])),
            timings=data.get('timings'),
        )


@dataclass
class StartRegularity:
    """Diagnostics on the start system; all lists empty means regular starts."""
    rank_deficient: List[Tuple[int, ...]] = field(default_factory=list)
    vanishing_support: List[Tuple[int, ...]] = field(default_factory=list)
    coincident: List[Tuple[int, int]] = field(default_factory=list)
    singular_jacobian: List[int] = field(default_factory=list)

    @property
    def regular(self) -> bool:
        return not (self.rank_deficient or self.vanishing_support or self.coincident or self.singular_jacobian)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'regular': self.regular,
            'rank_deficient': [list(b) for b in self.rank_deficient],
            'vanishing_support': [list(b) for b in self.vanishing_support],
            'coincident': [list(p) for p in self.coincident],
            'singular_jacobian': list(self.singular_jacobian),
        }


def _pairs(vector: np.ndarray) -> List[List[float]]:
    return [[float(v.real), float(v.imag)] for v in np.asarray(vector, dtype=complex)]


def _unpairs(pairs: Sequence[Sequence[float]]) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def _relative(F: np.ndarray, J: np.ndarray, y: np.ndarray) -> float:
    scale = np.max(np.sum(np.abs(J), axis=1)) * np.max(np.abs(y)) + 1.0
    return float(np.max(np.abs(F)) / scale)


# Construction

def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_gamma(rng: np.random.Generator) -> complex:
    """|gamma| <= 0.3 with the imaginary part dominant."""
    real = rng.uniform(-0.1, 0.1)
    imag = rng.uniform(0.15, 0.25) * (1.0 if rng.random() < 0.5 else -1.0)
    return complex(real, imag)


def target_matrix(arrangement: ArrangementMatrix, u: Sequence[complex]) -> np.ndarray:
    """A^T diag(u) as a d x (n+1) complex matrix."""
    return arrangement.numeric[1:].astype(complex) * np.asarray(u, dtype=complex)[None, :]


def build_system(arrangement: ArrangementMatrix, u: Sequence[complex], omega: Sequence[int],
                 A0: np.ndarray, rng: np.random.Generator,
                 circuit_list: Optional[Sequence[Circuit]] = None,
                 gamma: Optional[complex] = None) -> HomotopySystem:
    """Draw the square-up matrix, the patch and the arc parameter (in that order)."""
    if circuit_list is None:
        circuit_list = circuits(arrangement)
    size = arrangement.n + 1
    polys = [deform(p, omega) for p in circuit_polynomials(arrangement, circuit_list)]
    squareup = random_complex(rng, (arrangement.n - arrangement.d, len(polys)))
    patch = random_complex(rng, size)
    drawn = random_gamma(rng)
    return HomotopySystem(
        A0=np.asarray(A0, dtype=complex),
        A_target=target_matrix(arrangement, u),
        deformed_polys=polys,
        squareup=squareup,
        patch=patch,
        gamma=complex(gamma) if gamma is not None else drawn,
    )


# Start system

def _restricted_kernel(A0: np.ndarray, basis: Sequence[int], tol: float) -> Tuple[Optional[np.ndarray], np.ndarray]:
    sub = A0[:, list(basis)]
    _, singular_values, vh = np.linalg.svd(sub)
    if singular_values[0] == 0 or singular_values[-1] <= tol * singular_values[0]:
        return None, singular_values
    return vh[-1].conj(), singular_values


def start_solutions(arrangement: ArrangementMatrix, A0: np.ndarray, ideal: InitialIdeal,
                    patch: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """One point per nbc basis B: the kernel of A0 on the columns B, patched to v . y = 1."""
    size = arrangement.n + 1
    starts = []
    for basis in ideal.bases:
        vec, singular_values = _restricted_kernel(np.asarray(A0), basis, tol)
        if vec is None:
            raise StartDegenerate(f"A0 restricted to {basis} does not have a one-dimensional kernel",
                                  {'basis': list(basis), 'singular_values': singular_values.tolist()})
        y = np.zeros(size, dtype=complex)
        y[list(basis)] = vec
        scale = patch @ y
        if abs(scale) <= tol * np.max(np.abs(y)):
            raise StartDegenerate(f"start point on {basis} lies on the patch hyperplane", {'basis': list(basis)})
        starts.append(y / scale)
    return np.array(starts, dtype=complex).reshape(len(starts), size)


def start_regularity(system: HomotopySystem, ideal: InitialIdeal,
                     tol: float = 1e-8, tol_cluster: float = 1e-4) -> StartRegularity:
    """Check that the start points are isolated, distinct and nonsingular."""
    report = StartRegularity()
    points: List[Tuple[int, np.ndarray]] = []
    for k, basis in enumerate(ideal.bases):
        vec, _ = _restricted_kernel(system.A0, basis, tol)
        if vec is None:
            report.rank_deficient.append(tuple(basis))
            continue
        magnitudes = np.abs(vec)
        if magnitudes.min() <= tol * magnitudes.max():
            report.vanishing_support.append(tuple(basis))
        y = np.zeros(system.nvars, dtype=complex)
        y[list(basis)] = vec
        scale = system.patch @ y
        if abs(scale) <= tol * magnitudes.max():
            report.vanishing_support.append(tuple(basis))
            continue
        y = y / scale
        _, J, _ = system.evaluate(y, 0.0)
        if np.linalg.cond(J) > 1.0 / tol:
            report.singular_jacobian.append(k)
        points.append((k, y))

    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            ka, ya = points[a]
            kb, yb = points[b]
            if np.max(np.abs(ya - yb)) < tol_cluster * max(1.0, np.max(np.abs(ya))):
                report.coincident.append((ka, kb))
    return report


# Path tracking

def _correct(system: HomotopySystem, y: np.ndarray, tau: float, iterations: int,
             tol: float, max_first: Optional[float] = None) -> Tuple[np.ndarray, bool]:
    """Newton on the square system at fixed tau; ``max_first`` caps the first update relative to max|y|."""
    previous = None
    for _ in range(iterations):
        F, J, _ = system.evaluate(y, tau)
        if _relative(F, J, y) <= tol:
            return y, True
        try:
            dy = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return y, False
        norm = np.max(np.abs(dy))
        if previous is None and max_first is not None and norm > max_first * np.max(np.abs(y)):
            return y, False
        y = y + dy
        if norm <= tol * (1.0 + np.max(np.abs(y))):
            return y, True
        if previous is not None and norm > CONTRACTION * previous:
            return y, False
        previous = norm
    return y, system.relative_residual(y, tau) <= tol


def _velocity(system: HomotopySystem, y: np.ndarray, tau: float) -> np.ndarray:
    _, J, F_tau = system.evaluate(y, tau)
    return np.linalg.solve(J, -F_tau)


def _predict(system: HomotopySystem, y: np.ndarray, tau: float, h: float,
             k1: Optional[np.ndarray] = None) -> np.ndarray:
    """Classical fourth-order Runge-Kutta step of the Davidenko equation."""
    if k1 is None:
        k1 = _velocity(system, y, tau)
    k2 = _velocity(system, y + 0.5 * h * k1, tau + 0.5 * h)
    k3 = _velocity(system, y + 0.5 * h * k2, tau + 0.5 * h)
    k4 = _velocity(system, y + h * k3, tau + h)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _refine(system: HomotopySystem, y: np.ndarray, iterations: int, tol: float) -> Tuple[np.ndarray, bool]:
    """Newton at t = 1; converged only if the update itself becomes negligible."""
    for _ in range(iterations):
        F, J, _ = system.evaluate(y, 1.0)
        try:
            dy = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return y, False
        y = y + dy
        if np.max(np.abs(dy)) <= tol * (1.0 + np.max(np.abs(y))):
            _, J, _ = system.evaluate(y, 1.0)
            return y, np.linalg.cond(J) < SINGULAR_CONDITION
    return y, False


def track_one(system: HomotopySystem, start: np.ndarray, config: Optional[TrackerConfig] = None,
              index: int = 0) -> TrackedPath:
    """Follow one path from tau = 0 to tau = 1."""
    config = config or TrackerConfig()
    y = np.asarray(start, dtype=complex).copy()
    tau, h = 0.0, config.initial_step
    steps, streak = 0, 0
    status = None

    while tau < 1.0:
        if steps >= config.max_steps:
            status = STATUS_MAX_STEPS
            break
        accepted = False
        landing = h >= 1.0 - tau
        step = 1.0 - tau if landing else h
        try:
            k1 = _velocity(system, y, tau)
            if np.max(np.abs(k1)) <= config.tol_corrector * (1.0 + np.max(np.abs(y))):
                # stationary point of the flow: try the rest of the interval at once
                landing, step = True, 1.0 - tau
            predicted = _predict(system, y, tau, step, k1)
            if np.all(np.isfinite(predicted)):
                corrected, accepted = _correct(system, predicted, tau + step, config.corrector_iters,
                                               config.tol_corrector, config.max_correction)
        except np.linalg.LinAlgError:
            accepted = False
        steps += 1

        if accepted:
            y = corrected
            tau = 1.0 if landing else tau + step
            streak += 1
            h = min(h, config.max_step)
            if streak >= 4:
                h = min(1.5 * h, config.max_step)
                streak = 0
        else:
            h = 0.5 * min(step, h)
            streak = 0
            if h < config.min_step:
                status = STATUS_MIN_STEP
                break

        if np.max(np.abs(y)) > DIVERGENCE_BOUND:
            status = STATUS_DIVERGED
            break

    singular = False
    if tau >= 1.0 or (status == STATUS_MIN_STEP and tau >= 1.0 - config.endgame_gap):
        y, converged = _refine(system, y, config.refine_iters, config.tol_corrector)
        if converged:
            status, tau = STATUS_SUCCESS, 1.0
        else:
            status, singular = STATUS_MIN_STEP, True

    residual = system.relative_residual(y, 1.0 if singular or status == STATUS_SUCCESS else tau)
    return TrackedPath(index=index, start=np.asarray(start, dtype=complex), status=status, endpoint=y,
                       t_reached=float(tau), newton_residual=residual, steps_taken=steps, singular=singular)


def _track_worker(args) -> TrackedPath:
    system, start, config, index = args
    return track_one(system, start, config, index)


def _run_paths(system: HomotopySystem, starts: np.ndarray, config: TrackerConfig,
               indices: Optional[Sequence[int]] = None) -> List[TrackedPath]:
    indices = range(len(starts)) if indices is None else indices
    jobs = [(system, starts[k], config, k) for k in indices]
    if config.workers > 1 and len(jobs) > 1:
        with Pool(config.workers) as pool:
            return list(tqdm(pool.imap(_track_worker, jobs), total=len(jobs),
                             desc="Tracking paths", disable=not config.show_progress))
    return [_track_worker(job) for job in tqdm(jobs, desc="Tracking paths", disable=not config.show_progress)]


# Classification

def _support(y: np.ndarray, tol: float) -> Tuple[int, ...]:
    magnitudes = np.abs(y)
    return tuple(int(i) for i in np.nonzero(magnitudes > tol * magnitudes.max())[0])


def _close(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    return float(np.max(np.abs(a - b))) < tol * max(1.0, float(np.max(np.abs(a))))


def random_start_matrix(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    return random_complex(rng, (d, size))


def track_all(arrangement: ArrangementMatrix, u: Sequence[complex], omega: Optional[Sequence[int]] = None,
              A0: Optional[np.ndarray] = None, config: Optional[TrackerConfig] = None,
              rng: Optional[np.random.Generator] = None, bench: bool = False) -> SolutionReport:
    """Solve the scattering equations by tracking one path per nbc basis."""
    config = config or TrackerConfig()
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    u = np.asarray(u, dtype=complex)
    size = arrangement.n + 1
    omega = validate_omega(omega, size) if omega is not None else random_omega(size, rng)
    warnings: List[str] = []
    timings: Dict[str, float] = {}

    clock = time.perf_counter()
    matroid = LinearMatroid(arrangement)
    circuit_list = circuits(arrangement, matroid)
    ideal = initial_ideal(arrangement, omega, matroid, circuit_list)
    try:
        expected_interior = ml_degree(arrangement, matroid)
    except NotEssential as e:
        expected_interior = None
        warnings.append(e.message)
    timings['combinatorics'] = time.perf_counter() - clock
    logger.info(f"Combinatorics: {len(circuit_list)} circuits, {len(ideal.bases)} nbc bases, "
                f"ML degree {expected_interior}")

    clock = time.perf_counter()
    user_start = A0 is not None
    attempts = 1 if user_start else 3
    for attempt in range(attempts):
        start_matrix = np.asarray(A0, dtype=complex) if user_start else random_start_matrix(arrangement.d, size, rng)
        system = build_system(arrangement, u, omega, start_matrix, rng, circuit_list, gamma=config.gamma)
        try:
            starts = start_solutions(arrangement, system.A0, ideal, system.patch)
            break
        except StartDegenerate as e:
            if attempt == attempts - 1:
                raise
            logger.warning(f"Degenerate start system ({e.message}); drawing a fresh A0")
    timings['start'] = time.perf_counter() - clock
    logger.info(f"Start system: {len(starts)} start points")

    clock = time.perf_counter()
    paths = _run_paths(system, starts, config)
    timings['tracking'] = time.perf_counter() - clock

    clock = time.perf_counter()
    report = classify_paths(arrangement, u, system, paths, matroid, config)
    timings['classification'] = time.perf_counter() - clock

    tighter = config
    for _ in range(config.retrack_rounds):
        if not report.suspects:
            break
        tighter = replace(tighter, max_step=tighter.max_step * config.retrack_factor,
                          initial_step=min(tighter.initial_step, tighter.max_step * config.retrack_factor))
        logger.info(f"Re-tracking paths {report.suspects} with max step {tighter.max_step:g}")
        clock = time.perf_counter()
        for path in _run_paths(system, starts, tighter, report.suspects):
            paths[path.index] = path
        timings['tracking'] += time.perf_counter() - clock
        clock = time.perf_counter()
        report = classify_paths(arrangement, u, system, paths, matroid, config)
        timings['classification'] += time.perf_counter() - clock
    if report.suspects:
        logger.warning(f"Paths {report.suspects} stay unresolved after re-tracking")

    failures = report.path_stats['failed']
    if paths and failures > FAILURE_WARNING_FRACTION * len(paths):
        message = f"TooManyFailures: {failures} of {len(paths)} paths failed"
        logger.warning(message)
        warnings.append(message)

    report.counts_check.update({
        'paths': len(paths),
        'reciprocal_degree': len(ideal.bases),
        'paths_match': len(paths) == len(ideal.bases),
        'ml_degree': expected_interior,
        'interior_match': expected_interior is not None and len(report.interior) == expected_interior,
    })
    report.omega = tuple(omega)
    report.gamma = system.gamma
    report.warnings = warnings + report.warnings
    report.timings = timings if bench else None
    logger.info(f"Solved: {len(report.interior)} interior, {len(report.boundary_clusters)} boundary clusters")
    return report


def classify_paths(arrangement: ArrangementMatrix, u: np.ndarray, system: HomotopySystem,
                   paths: List[TrackedPath], matroid: LinearMatroid, config: TrackerConfig) -> SolutionReport:
    """
    Split finished endpoints into certified interior points and boundary clusters.

    Paths that fail, fail verification or land on an interior point another
    path already reached are listed in ``suspects``, together with that path.
    """
    stats = {STATUS_SUCCESS: 0, STATUS_DIVERGED: 0, STATUS_MIN_STEP: 0, STATUS_MAX_STEPS: 0,
             'singular': 0, 'unverified': 0, 'duplicates': 0, 'failed': 0, 'interior': 0, 'boundary': 0}
    interior: List[AffinePoint] = []
    interior_endpoints: List[np.ndarray] = []
    owners: List[int] = []
    clusters: List[BoundaryCluster] = []
    warnings: List[str] = []
    suspects = set()

    for path in paths:
        path.verified = False
        stats[path.status] += 1
        if path.singular:
            stats['singular'] += 1
        if not path.finished:
            stats['failed'] += 1
            suspects.add(path.index)
            continue

        tol_check = config.tol_zero_singular if path.singular else config.tol_verify
        if system.target_residual(path.endpoint) > tol_check:
            stats['unverified'] += 1
            stats['failed'] += 1
            suspects.add(path.index)
            continue
        path.verified = True
        path.support = _support(path.endpoint, config.tol_zero_singular if path.singular else config.tol_zero)

        if len(path.support) == arrangement.n + 1:
            twins = [owners[k] for k, other in enumerate(interior_endpoints)
                     if _close(path.endpoint, other, config.tol_cluster)]
            if twins:
                stats['duplicates'] += 1
                suspects.update(twins + [path.index])
                continue
            try:
                point = phi_inverse(arrangement, path.endpoint, config.tol_zero, tol_check)
                point.x = polish(arrangement, u, point.x)
                point = certify_point(arrangement, u, point, config.tol_zero)
            except (InconsistentPoint, DegenerateScale, OnArrangement) as e:
                logger.debug(f"Path {path.index}: interior endpoint rejected ({e.message})")
                stats['unverified'] += 1
                stats['failed'] += 1
                suspects.add(path.index)
                continue
            interior.append(point)
            interior_endpoints.append(path.endpoint)
            owners.append(path.index)
            stats['interior'] += 1
        else:
            stats['boundary'] += 1
            for cluster in clusters:
                if cluster.support == path.support and _close(cluster.representative, path.endpoint,
                                                              config.tol_cluster):
                    cluster.paths.append(path.index)
                    cluster.singular = cluster.singular or path.singular
                    break
            else:
                mask = to_mask(path.support)
                flat_type = matroid.make_flat(mask).flat_type if matroid.is_flat(mask) else "not_a_flat"
                if flat_type != TYPE_II:
                    message = f"boundary support {list(path.support)} is {flat_type}, expected a type (ii) flat"
                    logger.warning(message)
                    warnings.append(message)
                clusters.append(BoundaryCluster(support=path.support, representative=path.endpoint,
                                                paths=[path.index], flat_type=flat_type,
                                                singular=path.singular))

    boundary_mass = sum(c.multiplicity for c in clusters)
    counts_check = {
        'interior': len(interior),
        'boundary_mass': boundary_mass,
        'boundary_type_ii': all(c.flat_type == TYPE_II for c in clusters),
    }
    return SolutionReport(
        interior=interior,
        interior_endpoints=interior_endpoints,
        boundary_clusters=clusters if config.return_boundary else [],
        path_stats=stats,
        counts_check=counts_check,
        paths=paths,
        warnings=warnings,
        suspects=sorted(suspects),
    )


# Certification

def _chamber_is_bounded(A: np.ndarray, signs: np.ndarray, tol: float = 1e-12) -> bool:
    """
    A chamber {x : signs_i ell_i(x) > 0} of a real arrangement in dimension
    d <= 2 is unbounded iff some nonzero direction v has signs_i A_i . v >= 0.
    Extreme rays of that cone lie on lines A_i . v = 0, so finitely many
    candidate directions decide it.
    """
    rows = [(a, s) for a, s in zip(A, signs) if np.any(a != 0)]
    d = A.shape[1]
    if d == 1:
        candidates = [np.array([1.0]), np.array([-1.0])]
    else:
        candidates = []
        for a, _ in rows:
            v = np.array([-a[1], a[0]])
            candidates.extend([v, -v])
    for v in candidates:
        if all(s * (a @ v) >= -tol * np.max(np.abs(a)) * np.max(np.abs(v)) for a, s in rows):
            return False
    return True


def verify_solution_set(arrangement: ArrangementMatrix, u: Sequence[complex], report: SolutionReport,
                        tol: float = 1e-8, matroid: Optional[LinearMatroid] = None) -> Dict[str, Any]:
    """Check the interior count against the ML degree and, for positive u, reality and chambers."""
    u = np.asarray(u, dtype=complex)
    matroid = matroid or LinearMatroid(arrangement)
    expected = ml_degree(arrangement, matroid)
    found = len(report.interior)
    if found != expected:
        raise CountMismatch(f"{found} interior solutions but ML degree {expected}",
                            {'interior': found, 'ml_degree': expected})

    certificate: Dict[str, Any] = {
        'interior': found,
        'ml_degree': expected,
        'max_residual': max((float(p.residual) for p in report.interior), default=0.0),
        'all_hessians_nondegenerate': all(p.hessian_ok for p in report.interior),
        'reality_checked': False,
        'chambers_checked': False,
    }

    positive_real = bool(np.all(np.abs(u.imag) == 0) and np.all(u.real > 0))
    if not positive_real:
        return certificate

    for k, point in enumerate(report.interior):
        imaginary = float(np.max(np.abs(np.asarray(point.x).imag), initial=0.0))
        if imaginary >= tol:
            raise RealityViolation(f"solution {k} has imaginary part {imaginary:.3e}",
                                   {'solution': k, 'imaginary': imaginary})
    certificate['reality_checked'] = True

    if arrangement.d <= 2:
        A = arrangement.numeric[1:].T
        seen = {}
        for k, point in enumerate(report.interior):
            x = np.asarray(point.x).real
            signs = np.sign(np.concatenate(([1.0], x)) @ arrangement.numeric)
            key = tuple(int(s) for s in signs)
            if 0 in key:
                raise ChamberViolation(f"solution {k} lies on the arrangement", {'solution': k})
            if key in seen:
                raise ChamberViolation(f"solutions {seen[key]} and {k} share a chamber",
                                       {'solutions': [seen[key], k], 'signs': list(key)})
            if not _chamber_is_bounded(A, signs):
                raise ChamberViolation(f"solution {k} lies in an unbounded chamber",
                                       {'solution': k, 'signs': list(key)})
            seen[key] = k
        bounded = bounded_chamber_count(arrangement, matroid)
        if len(seen) != bounded:
            raise ChamberViolation(f"solutions occupy {len(seen)} bounded chambers but there are {bounded}",
                                   {'occupied': len(seen), 'bounded_chambers': bounded})
        certificate['chambers_checked'] = True
        certificate['bounded_chambers'] = len(seen)
    return certificate
