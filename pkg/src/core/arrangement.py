#!/usr/bin/env python3
"""
Hyperplane arrangements and their scattering equations.

An arrangement is stored as the exact rational matrix L whose column i holds
the coefficients of ell_i(x) = L[0, i] + sum_j L[j, i] x_j.  The master
function is sum_i u_i log ell_i(x); its critical points are the solutions
of the scattering equations.
"""

import json
import logging
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Rational

from src.core.errors import (
    DegenerateScale,
    InconsistentPoint,
    MalformedInput,
    OnArrangement,
    RankDeficient,
)
from src.utils.exact_linalg import format_rational, kernel, rank, rref, to_rational

logger = logging.getLogger(__name__)

DEFAULT_TOL_ZERO = 1e-8
DEFAULT_TOL_VERIFY = 1e-8


@dataclass(frozen=True)
class ArrangementMatrix:
    """The (d+1) x (n+1) coefficient matrix L of an affine arrangement."""
    L: Tuple[Tuple[Rational, ...], ...]
    d: int
    n: int

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], d: Optional[int] = None,
                  n: Optional[int] = None) -> "ArrangementMatrix":
        """Validate rows of rational entries and build the matrix."""
        try:
            exact = tuple(tuple(to_rational(v) for v in row) for row in rows)
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise MalformedInput(f"Non-rational entry in L: {e}")

        if not exact or not exact[0]:
            raise MalformedInput("L must have at least one row and one column")
        if d is None:
            d = len(exact) - 1
        if n is None:
            n = len(exact[0]) - 1
        if len(exact) != d + 1:
            raise MalformedInput(f"L has {len(exact)} rows, expected d+1 = {d + 1}",
                                 {'rows': len(exact), 'd': d})
        for i, row in enumerate(exact):
            if len(row) != n + 1:
                raise MalformedInput(f"Row {i} of L has {len(row)} entries, expected n+1 = {n + 1}",
                                     {'row': i, 'n': n})
        if d < 1:
            raise MalformedInput("the ambient dimension d must be at least 1", {'d': d})

        for i in range(n + 1):
            if all(exact[r][i] == 0 for r in range(d + 1)):
                raise MalformedInput(f"Column {i} of L is zero and defines no hyperplane", {'column': i})

        achieved = rank(exact)
        if achieved < d + 1:
            raise RankDeficient(f"rank(L) = {achieved} < d+1 = {d + 1}",
                                {'rank': achieved, 'expected': d + 1})
        return cls(L=exact, d=d, n=n)

    @property
    def size(self) -> int:
        return self.n + 1

    @cached_property
    def numeric(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.L], dtype=float)

    @cached_property
    def A(self) -> Tuple[Tuple[Rational, ...], ...]:
        """The (n+1) x d matrix of linear parts, A[i][j] = L[j+1][i]."""
        return tuple(tuple(self.L[j + 1][i] for j in range(self.d)) for i in range(self.n + 1))

    @cached_property
    def b(self) -> Tuple[Rational, ...]:
        return tuple(-v for v in self.L[0])

    def column(self, i: int) -> Tuple[Rational, ...]:
        return tuple(row[i] for row in self.L)

    def scaled_column(self, i: int, factor: Any) -> "ArrangementMatrix":
        factor = to_rational(factor)
        if factor == 0:
            raise MalformedInput("column scale factor must be nonzero")
        rows = [list(row) for row in self.L]
        for row in rows:
            row[i] = row[i] * factor
        return ArrangementMatrix(L=tuple(tuple(r) for r in rows), d=self.d, n=self.n)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'd': self.d,
            'n': self.n,
            'L': [[format_rational(v) for v in row] for row in self.L],
        }


@dataclass
class AffinePoint:
    """A candidate critical point x together with its certificates."""
    x: np.ndarray
    residual: float = float('nan')
    hessian_ok: bool = False
    condition: float = float('nan')
    membership_residual: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'x': [[float(v.real), float(v.imag)] for v in np.asarray(self.x, dtype=complex)],
            'residual': float(self.residual),
            'hessian_ok': bool(self.hessian_ok),
            'condition': float(self.condition),
            'membership_residual': float(self.membership_residual),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AffinePoint":
        return cls(
            x=np.array([complex(re, im) for re, im in data['x']], dtype=complex),
            residual=float(data.get('residual', float('nan'))),
            hessian_ok=bool(data.get('hessian_ok', False)),
            condition=float(data.get('condition', float('nan'))),
            membership_residual=float(data.get('membership_residual', 0.0)),
        )


# Parsing

def parse_arrangement(text: str) -> ArrangementMatrix:
    """Parse an instance document ``{"d", "n", "L", "u"?}`` into an arrangement."""
    document = _load_document(text)
    for key in ('d', 'n', 'L'):
        if key not in document:
            raise MalformedInput(f"Instance document is missing '{key}'", {'missing': key})
    d, n, rows = document['d'], document['n'], document['L']
    if not _is_int(d) or not _is_int(n):
        raise MalformedInput("'d' and 'n' must be integers", {'d': d, 'n': n})
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MalformedInput("'L' must be a list of rows")
    return ArrangementMatrix.from_rows(rows, d=int(d), n=int(n))


def parse_exponents(text: str, n: int) -> Optional[np.ndarray]:
    """Return the optional ``u`` vector of an instance document."""
    document = _load_document(text)
    if document.get('u') is None:
        return None
    return parse_complex_vector(document['u'], n + 1, name='u')


def parse_instance(text: str) -> Tuple[ArrangementMatrix, Optional[np.ndarray]]:
    arrangement = parse_arrangement(text)
    return arrangement, parse_exponents(text, arrangement.n)


def load_instance(path: Union[str, Path]) -> Tuple[ArrangementMatrix, Optional[np.ndarray]]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Instance file not found: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        return parse_instance(f.read())


def parse_complex_vector(values: Any, length: Optional[int] = None, name: str = 'vector') -> np.ndarray:
    """Accept ``[[re, im], ...]`` pairs or plain numbers."""
    if not isinstance(values, list):
        raise MalformedInput(f"'{name}' must be a list")
    out = []
    for entry in values:
        try:
            if isinstance(entry, (list, tuple)) and len(entry) == 2:
                out.append(complex(float(entry[0]), float(entry[1])))
            elif isinstance(entry, (int, float)) and not isinstance(entry, bool):
                out.append(complex(entry))
            elif isinstance(entry, str):
                out.append(complex(float(to_rational(entry))))
            else:
                raise ValueError(entry)
        except (TypeError, ValueError, ZeroDivisionError):
            raise MalformedInput(f"Cannot read entry {entry!r} of '{name}'")
    vector = np.array(out, dtype=complex)
    if length is not None and vector.shape[0] != length:
        raise MalformedInput(f"'{name}' has length {vector.shape[0]}, expected {length}",
                             {'length': int(vector.shape[0]), 'expected': length})
    if not np.all(np.isfinite(vector)):
        raise MalformedInput(f"'{name}' has non-finite entries")
    return vector


def _load_document(text: str) -> Dict[str, Any]:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedInput(f"Instance document is not valid JSON: {e}")
    if not isinstance(document, dict):
        raise MalformedInput("Instance document must be a JSON object")
    return document


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


# Evaluation

def linear_forms_at(arrangement: ArrangementMatrix, x: Sequence[complex]) -> np.ndarray:
    """(ell_0(x), ..., ell_n(x)) = (1, x) . L"""
    x = np.asarray(x)
    if x.shape != (arrangement.d,):
        raise MalformedInput(f"x has shape {x.shape}, expected ({arrangement.d},)")
    point = np.concatenate(([1.0], x))
    return point @ arrangement.numeric


def _checked_forms(arrangement: ArrangementMatrix, x: Sequence[complex], tol: float) -> np.ndarray:
    values = linear_forms_at(arrangement, x)
    magnitudes = np.abs(values)
    scale = magnitudes.max()
    if scale == 0 or magnitudes.min() <= tol * scale:
        i = int(np.argmin(magnitudes))
        raise OnArrangement(f"x lies on hyperplane {i} (|ell_{i}(x)| = {magnitudes[i]:.3e})",
                            {'hyperplane': i, 'value': float(magnitudes[i])})
    return values


def gradient(arrangement: ArrangementMatrix, u: Sequence[complex], x: Sequence[complex],
             tol: float = DEFAULT_TOL_ZERO) -> np.ndarray:
    """Gradient of the master function: A^T diag(u) (1 / ell(x))."""
    values = _checked_forms(arrangement, x, tol)
    u = np.asarray(u, dtype=complex)
    return arrangement.numeric[1:] @ (u / values)


def scattering_residual(arrangement: ArrangementMatrix, u: Sequence[complex], x: Sequence[complex],
                        tol: float = DEFAULT_TOL_ZERO) -> float:
    """Max-norm of the gradient of the master function at x."""
    return float(np.max(np.abs(gradient(arrangement, u, x, tol)), initial=0.0))


def log_likelihood(arrangement: ArrangementMatrix, u: Sequence[complex], x: Sequence[complex],
                   tol: float = DEFAULT_TOL_ZERO) -> complex:
    """sum_i u_i log ell_i(x) on the principal branch."""
    values = _checked_forms(arrangement, x, tol).astype(complex)
    return complex(np.sum(np.asarray(u, dtype=complex) * np.log(values)))


def hessian(arrangement: ArrangementMatrix, u: Sequence[complex], x: Sequence[complex],
            tol: float = DEFAULT_TOL_ZERO) -> np.ndarray:
    values = _checked_forms(arrangement, x, tol)
    weights = np.asarray(u, dtype=complex) / values ** 2
    A_t = arrangement.numeric[1:]
    return -(A_t * weights) @ A_t.T


def hessian_nondegenerate(arrangement: ArrangementMatrix, u: Sequence[complex], x: Sequence[complex],
                          tol: float = DEFAULT_TOL_ZERO) -> Tuple[bool, float]:
    """
    Test det(H) != 0 relative to the product of the row max-norms of H.

    Returns the verdict and the normalized determinant |det H| / prod_j max_k |H_jk|.
    """
    H = hessian(arrangement, u, x, tol)
    normalizer = float(np.prod(np.max(np.abs(H), axis=1)))
    if normalizer == 0.0:
        return False, 0.0
    condition = float(abs(np.linalg.det(H)) / normalizer)
    return condition > tol, condition


def phi(arrangement: ArrangementMatrix, x: Sequence[complex], tol: float = DEFAULT_TOL_ZERO) -> np.ndarray:
    """The reciprocal map x -> (1/ell_0(x) : ... : 1/ell_n(x))."""
    return 1.0 / _checked_forms(arrangement, x, tol)


def phi_inverse(arrangement: ArrangementMatrix, y: Sequence[complex],
                tol_zero: float = DEFAULT_TOL_ZERO,
                tol_verify: float = DEFAULT_TOL_VERIFY) -> AffinePoint:
    """
    Recover x from a point y of the image of phi.

    Writing ell_i(x) = 1 / (lambda y_i) with z = lambda x and mu = lambda gives
    the overdetermined linear system L^T (mu, z) = 1/y, solved by least squares.
    """
    y = np.asarray(y, dtype=complex)
    if y.shape != (arrangement.n + 1,):
        raise MalformedInput(f"y has shape {y.shape}, expected ({arrangement.n + 1},)")
    magnitudes = np.abs(y)
    scale = magnitudes.max()
    if scale == 0 or magnitudes.min() <= tol_zero * scale:
        raise InconsistentPoint("y has a vanishing coordinate and is not in the image of phi",
                                {'coordinate': int(np.argmin(magnitudes))})

    rhs = 1.0 / (y / scale)
    system = arrangement.numeric.T.astype(complex)
    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    membership = float(np.max(np.abs(system @ solution - rhs)) / np.max(np.abs(rhs)))
    if membership > tol_verify:
        raise InconsistentPoint(f"y is not in the image of phi (residual {membership:.3e})",
                                {'residual': membership})

    mu, z = solution[0], solution[1:]
    if abs(mu) <= tol_zero * np.max(np.abs(solution)):
        raise DegenerateScale(f"scale mu = {abs(mu):.3e} vanishes; y lies at infinity",
                              {'mu': [float(mu.real), float(mu.imag)]})
    return AffinePoint(x=z / mu, membership_residual=membership)


def polish(arrangement: ArrangementMatrix, u: Sequence[complex], x: Sequence[complex],
           iterations: int = 5, tol: float = 1e-15) -> np.ndarray:
    """Newton refinement of a critical point using the Hessian."""
    x = np.asarray(x, dtype=complex).copy()
    for _ in range(iterations):
        g = gradient(arrangement, u, x)
        try:
            step = np.linalg.solve(hessian(arrangement, u, x), -g)
        except np.linalg.LinAlgError:
            logger.debug("Singular Hessian while polishing; keeping the current point")
            break
        x = x + step
        if np.max(np.abs(step)) <= tol * max(1.0, np.max(np.abs(x))):
            break
    return x


def certify_point(arrangement: ArrangementMatrix, u: Sequence[complex], point: AffinePoint,
                  tol: float = DEFAULT_TOL_ZERO) -> AffinePoint:
    """Fill in the residual and Hessian certificates of a point."""
    residual = scattering_residual(arrangement, u, point.x, tol)
    ok, condition = hessian_nondegenerate(arrangement, u, point.x, tol)
    return replace(point, residual=residual, hessian_ok=ok, condition=condition)


def probability_scaling(arrangement: ArrangementMatrix, search: int = 3) -> Optional[List[Rational]]:
    """
    Nonzero rational column scales c with sum_i c_i ell_i = 1, if any exist.

    Such a scaling turns the arrangement into a linear statistical model whose
    coordinates sum to one.
    """
    size = arrangement.n + 1
    augmented = [list(row) + [Rational(int(i == 0))] for i, row in enumerate(arrangement.L)]
    reduced, pivots = rref(augmented)
    if size in pivots:
        return None
    particular = [Rational(0)] * size
    for i, p in enumerate(pivots):
        particular[p] = reduced[i][size]
    basis = kernel(arrangement.L, ncols=size)

    candidates = [particular]
    for coeffs in np.ndindex(*([2 * search + 1] * min(len(basis), 3))):
        shifts = [c - search for c in coeffs]
        vec = list(particular)
        for shift, direction in zip(shifts, basis):
            vec = [a + shift * b for a, b in zip(vec, direction)]
        candidates.append(vec)
    for vec in candidates:
        if all(v != 0 for v in vec):
            return vec
    return None


# Instances

def example_intro() -> ArrangementMatrix:
    """Four lines in general position in the plane; ML degree 3."""
    return ArrangementMatrix.from_rows([
        [0, 0, 2, 2],
        [1, 0, -1, -2],
        [0, 1, -2, -1],
    ])


def example_boundary() -> ArrangementMatrix:
    """Two parallel lines plus a triple point; reciprocal degree 2, ML degree 1."""
    return ArrangementMatrix.from_rows([
        [1, 0, 0, 0],
        [1, 1, 0, 1],
        [0, 0, 1, 1],
    ])


def identity_arrangement(d: int) -> ArrangementMatrix:
    return ArrangementMatrix.from_rows([[int(i == j) for j in range(d + 1)] for i in range(d + 1)])


def random_integer_arrangement(d: int, n: int, rng: np.random.Generator,
                               low: int = -20, high: int = 20, attempts: int = 100) -> ArrangementMatrix:
    """Uniform integer entries in [low, high], redrawn until the matrix is valid."""
    for _ in range(attempts):
        rows = rng.integers(low, high + 1, size=(d + 1, n + 1)).tolist()
        try:
            return ArrangementMatrix.from_rows(rows)
        except (RankDeficient, MalformedInput):
            continue
    raise RankDeficient(f"no valid {d + 1}x{n + 1} integer matrix after {attempts} draws")
