#!/usr/bin/env python3
"""
Hilbert functions of the reciprocal linear space and the Macaulay eliminant.

The coordinate ring K[R_L] degenerates flatly to the Stanley-Reisner ring of
the broken-circuit complex, so its Hilbert function is a face count.  For the
linear section by A^T diag(u) y = 0 the Hilbert function is obtained from the
exact rank of a Macaulay matrix with u specialized to random rationals.

Monomials are sorted tuples of variable indices with repetition, so
(0, 0, 2) stands for y0^2 y2.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Poly, Rational, Symbol, interpolate, symbols
from sympy.parsing.sympy_parser import parse_expr
from sympy.polys.domains import QQ

from src.core.arrangement import ArrangementMatrix
from src.core.errors import (
    DegreeCollapse,
    GenericityFailure,
    MalformedInput,
    MatrixTooLarge,
    RegularityContradiction,
    SingularSelection,
)
from src.core.ideal import circuit_polynomials, leading_term
from src.core.matroid import (
    Circuit,
    LinearMatroid,
    broken_circuit_complex,
    broken_circuits,
    circuits,
    is_connected,
    nbc_bases,
    validate_omega,
)
from src.utils.exact_linalg import format_rational, qq, qq_det, qq_independent_rows, qq_sparse_rank

logger = logging.getLogger(__name__)

MAX_MONOMIALS = 100000
DEFAULT_Q_MAX = 8
RATIONAL_BOUND = 100

Monomial = Tuple[int, ...]
Form = Dict[Monomial, Any]


@dataclass
class StandardMonomialBasis:
    degree: int
    monomials: List[Monomial]

    def __len__(self) -> int:
        return len(self.monomials)

    def exponent_vectors(self, nvars: int) -> List[List[int]]:
        return [exponents(m, nvars) for m in self.monomials]


@dataclass
class MacaulayMatrix:
    """Sparse rows over QQ in the basis of all degree-q monomials."""
    degree: int
    columns: List[Monomial]
    rows: List[Dict[int, Any]] = field(default_factory=list)
    tags: List[str] = field(default_factory=list)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.columns)

    def rank(self) -> int:
        return qq_sparse_rank(self.rows, len(self.columns))

    def corank(self) -> int:
        return len(self.columns) - self.rank()


@dataclass
class Eliminant:
    """Monic univariate polynomial whose roots are the values of h2/h1 on the solutions."""
    poly: Poly
    q: int
    size: int
    selected: List[Monomial]

    @property
    def degree(self) -> int:
        return self.poly.degree()

    @property
    def coefficients(self) -> List[Rational]:
        return list(self.poly.all_coeffs())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'degree': self.degree,
            'q': self.q,
            'matrix_size': self.size,
            'coefficients': [format_rational(c) for c in self.coefficients],
            'selected_monomials': [list(m) for m in self.selected],
        }


def exponents(monomial: Monomial, nvars: int) -> List[int]:
    vector = [0] * nvars
    for i in monomial:
        vector[i] += 1
    return vector


def _multiply(form: Mapping[Monomial, Any], monomial: Monomial) -> Form:
    return {tuple(sorted(m + monomial)): c for m, c in form.items()}


def ambient_monomials(nvars: int, q: int) -> List[Monomial]:
    """All degree-q monomials in nvars variables."""
    count = comb(nvars + q - 1, q) if nvars > 0 else int(q == 0)
    if count > MAX_MONOMIALS:
        raise MatrixTooLarge(f"{count} monomials of degree {q} in {nvars} variables exceed {MAX_MONOMIALS}",
                             {'monomials': count, 'limit': MAX_MONOMIALS})
    return list(combinations_with_replacement(range(nvars), q))


# Stanley-Reisner side

def _faces(arrangement: ArrangementMatrix, omega: Optional[Sequence[int]],
           matroid: Optional[LinearMatroid]) -> List[Tuple[int, ...]]:
    if omega is None:
        omega = tuple(range(1, arrangement.n + 2))
    return broken_circuit_complex(arrangement, omega, matroid)


def face_numbers(arrangement: ArrangementMatrix, omega: Optional[Sequence[int]] = None,
                 matroid: Optional[LinearMatroid] = None) -> List[int]:
    """f_k = number of faces with k elements, k = 0..d+1."""
    counts = [0] * (arrangement.d + 2)
    for face in _faces(arrangement, omega, matroid):
        counts[len(face)] += 1
    return counts


def hilbert_function_RL(arrangement: ArrangementMatrix, omega: Optional[Sequence[int]], q: int,
                        matroid: Optional[LinearMatroid] = None) -> int:
    """HF(q) = sum over nonempty faces F of C(q-1, |F|-1); HF(0) = 1."""
    if q < 0:
        raise MalformedInput(f"degree must be nonnegative, got {q}")
    if q == 0:
        return 1
    f = face_numbers(arrangement, omega, matroid)
    return sum(f[k] * comb(q - 1, k - 1) for k in range(1, len(f)))


def hilbert_series_numerator(arrangement: ArrangementMatrix, omega: Optional[Sequence[int]] = None,
                             matroid: Optional[LinearMatroid] = None) -> List[int]:
    """
    The h-vector: HS(z) = h(z) / (1 - z)^(d+1).

    h(z) = sum_k f_k z^k (1 - z)^(d+1-k); trailing zeros are dropped.
    """
    f = face_numbers(arrangement, omega, matroid)
    top = arrangement.d + 1
    h = [sum(f[k] * (-1) ** (j - k) * comb(top - k, j - k) for k in range(j + 1)) for j in range(top + 1)]
    while len(h) > 1 and h[-1] == 0:
        h.pop()
    return h


def hilbert_regularity_RL(arrangement: ArrangementMatrix, omega: Optional[Sequence[int]] = None,
                          matroid: Optional[LinearMatroid] = None) -> int:
    """deg h(z) - d; never positive, and zero exactly for connected matroids."""
    h = hilbert_series_numerator(arrangement, omega, matroid)
    regularity = (len(h) - 1) - arrangement.d
    connected = is_connected(arrangement, matroid)
    if regularity > 0 or (regularity == 0) != connected:
        raise RegularityContradiction(
            f"Hilbert regularity {regularity} with connected={connected}",
            {'regularity': regularity, 'connected': connected, 'h_vector': h})
    return regularity


def standard_monomials(arrangement: ArrangementMatrix, omega: Optional[Sequence[int]], q: int,
                       matroid: Optional[LinearMatroid] = None) -> StandardMonomialBasis:
    """Degree-q monomials whose support contains no broken circuit."""
    if q == 0:
        return StandardMonomialBasis(degree=0, monomials=[()])
    monomials = []
    for face in _faces(arrangement, omega, matroid):
        if not face or len(face) > q:
            continue
        for extra in combinations_with_replacement(face, q - len(face)):
            monomials.append(tuple(sorted(face + extra)))
    return StandardMonomialBasis(degree=q, monomials=sorted(monomials))


# Forms

def parse_form(form: Union[str, Mapping[Monomial, Any]], nvars: int) -> Form:
    """Homogeneous form in y0, ..., y{nvars-1} as {monomial: QQ coefficient}."""
    if isinstance(form, Mapping):
        parsed = {tuple(sorted(m)): qq(c) for m, c in form.items()}
    else:
        names = symbols(f"y0:{nvars}")
        try:
            expr = parse_expr(str(form), local_dict={str(s): s for s in names})
            poly = Poly(expr, *names, domain=QQ)
        except Exception as e:
            raise MalformedInput(f"cannot parse form {form!r}: {e}")
        parsed = {}
        for powers, coefficient in poly.terms():
            monomial = tuple(i for i, e in enumerate(powers) for _ in range(e))
            parsed[monomial] = qq(coefficient)
    parsed = {m: c for m, c in parsed.items() if c}
    if not parsed:
        raise MalformedInput(f"form {form!r} is zero")
    if any(i < 0 or i >= nvars for m in parsed for i in m):
        raise MalformedInput(f"form {form!r} uses variables outside y0..y{nvars - 1}")
    if len({len(m) for m in parsed}) != 1:
        raise MalformedInput(f"form {form!r} is not homogeneous")
    return parsed


def form_degree(form: Form) -> int:
    return len(next(iter(form)))


def linear_generators(arrangement: ArrangementMatrix, u: Sequence[Any]) -> List[Form]:
    """The d linear forms of A^T diag(u) y."""
    u = [qq(v) for v in u]
    generators = []
    for row in arrangement.L[1:]:
        form = {(i,): qq(a) * u[i] for i, a in enumerate(row) if a != 0}
        generators.append({m: c for m, c in form.items() if c})
    return generators


def circuit_forms(arrangement: ArrangementMatrix, circuit_list: Optional[Sequence[Circuit]] = None) -> List[Form]:
    return [{term.monomial: qq(term.coefficient) for term in poly.terms}
            for poly in circuit_polynomials(arrangement, circuit_list)]


def random_rational_vector(size: int, rng: np.random.Generator, bound: int = RATIONAL_BOUND) -> List[Rational]:
    """Nonzero rationals p/q with |p|, q <= bound."""
    numerators = rng.integers(1, bound + 1, size=size) * rng.choice([-1, 1], size=size)
    denominators = rng.integers(1, bound + 1, size=size)
    return [Rational(int(p), int(q)) for p, q in zip(numerators, denominators)]


# Macaulay matrices

def macaulay_matrix(arrangement: ArrangementMatrix, q: int, u: Optional[Sequence[Any]] = None,
                    h: Optional[Form] = None, include_linear: bool = True, include_circuits: bool = True,
                    circuit_list: Optional[Sequence[Circuit]] = None) -> MacaulayMatrix:
    """Degree-q multiples of the chosen generators in the basis of all degree-q monomials."""
    nvars = arrangement.n + 1
    columns = ambient_monomials(nvars, q)
    index = {m: k for k, m in enumerate(columns)}
    matrix = MacaulayMatrix(degree=q, columns=columns)

    generators: List[Tuple[str, Form]] = []
    if include_linear:
        if u is None:
            raise MalformedInput("the linear generators need exponents u")
        generators += [(f"linear{j}", g) for j, g in enumerate(linear_generators(arrangement, u))]
    if include_circuits:
        generators += [(f"circuit{k}", f) for k, f in enumerate(circuit_forms(arrangement, circuit_list))]
    if h is not None:
        generators.append(("h", h))

    for tag, generator in generators:
        degree = form_degree(generator)
        if degree > q:
            continue
        for monomial in combinations_with_replacement(range(nvars), q - degree):
            row = {}
            for m, c in _multiply(generator, monomial).items():
                row[index[m]] = row.get(index[m], QQ.zero) + c
            matrix.rows.append(row)
            matrix.tags.append(tag)
    logger.debug(f"Macaulay matrix of degree {q}: {matrix.shape[0]} x {matrix.shape[1]}")
    return matrix


def circuit_hilbert_function(arrangement: ArrangementMatrix, q: int,
                             circuit_list: Optional[Sequence[Circuit]] = None) -> int:
    """dim K[y]_q - rank of the circuit polynomials alone at degree q."""
    return macaulay_matrix(arrangement, q, include_linear=False, circuit_list=circuit_list).corank()


def quotient_hilbert_function(arrangement: ArrangementMatrix, q: int, u: Optional[Sequence[Any]] = None,
                              h: Optional[Union[str, Form]] = None, rng: Optional[np.random.Generator] = None,
                              q_max: int = DEFAULT_Q_MAX,
                              circuit_list: Optional[Sequence[Circuit]] = None) -> int:
    """
    HF of K[R_L] / (I(L_u) + <h>) at degree q.

    Without u, two independent random rational specializations are used and
    must agree.
    """
    if q > q_max:
        raise MatrixTooLarge(f"degree {q} exceeds the limit {q_max}", {'q': q, 'q_max': q_max})
    if circuit_list is None:
        circuit_list = circuits(arrangement)
    form = parse_form(h, arrangement.n + 1) if h is not None else None

    if u is not None:
        return macaulay_matrix(arrangement, q, u, form, circuit_list=circuit_list).corank()

    rng = rng if rng is not None else np.random.default_rng()
    values = [
        macaulay_matrix(arrangement, q, random_rational_vector(arrangement.n + 1, rng), form,
                        circuit_list=circuit_list).corank()
        for _ in range(2)
    ]
    if values[0] != values[1]:
        raise GenericityFailure(f"random specializations disagree at degree {q}: {values}",
                                {'q': q, 'values': values})
    return values[0]


# Normal forms modulo I(R_L)

class NormalForm:
    """
    Reduction modulo the circuit polynomials.

    Leading terms for the omega weight are the broken-circuit monomials, and
    every reduction step strictly lowers the weight, so the remainder is the
    unique representative in the span of the standard monomials.
    """

    def __init__(self, arrangement: ArrangementMatrix, omega: Sequence[int],
                 circuit_list: Optional[Sequence[Circuit]] = None):
        self.omega = validate_omega(omega, arrangement.n + 1)
        if circuit_list is None:
            circuit_list = circuits(arrangement)
        minimal = set(broken_circuits(circuit_list, self.omega))
        self.reducers: Dict[Monomial, Tuple[Any, List[Tuple[Monomial, Any]]]] = {}
        for poly in circuit_polynomials(arrangement, circuit_list):
            lead = leading_term(poly, self.omega)
            if lead.monomial in minimal and lead.monomial not in self.reducers:
                others = [(t.monomial, qq(t.coefficient)) for t in poly.terms if t.omitted != lead.omitted]
                self.reducers[lead.monomial] = (qq(lead.coefficient), others)
        self._cache: Dict[Monomial, Form] = {}

    def weight(self, monomial: Monomial) -> int:
        return sum(self.omega[i] for i in monomial)

    def divisor(self, monomial: Monomial) -> Optional[Monomial]:
        present = set(monomial)
        for broken in self.reducers:
            if present.issuperset(broken):
                return broken
        return None

    def is_standard(self, monomial: Monomial) -> bool:
        return self.divisor(monomial) is None

    def monomial(self, monomial: Monomial) -> Form:
        if monomial in self._cache:
            return self._cache[monomial]
        pending: Dict[Monomial, Any] = {monomial: QQ.one}
        result: Dict[Monomial, Any] = {}
        while pending:
            m = max(pending, key=self.weight)
            c = pending.pop(m)
            if not c:
                continue
            broken = self.divisor(m)
            if broken is None:
                result[m] = result.get(m, QQ.zero) + c
                continue
            lead_coefficient, others = self.reducers[broken]
            quotient = list(m)
            for i in broken:
                quotient.remove(i)
            factor = c / lead_coefficient
            for other, coefficient in others:
                key = tuple(sorted(quotient + list(other)))
                pending[key] = pending.get(key, QQ.zero) - factor * coefficient
        result = {m: c for m, c in result.items() if c}
        self._cache[monomial] = result
        return result

    def reduce(self, form: Mapping[Monomial, Any]) -> Form:
        result: Dict[Monomial, Any] = {}
        for m, c in form.items():
            for standard, coefficient in self.monomial(m).items():
                result[standard] = result.get(standard, QQ.zero) + c * coefficient
        return {m: c for m, c in result.items() if c}


def normal_form(arrangement: ArrangementMatrix, form: Union[str, Form], omega: Optional[Sequence[int]] = None,
                circuit_list: Optional[Sequence[Circuit]] = None) -> Form:
    if omega is None:
        omega = tuple(range(1, arrangement.n + 2))
    parsed = parse_form(form, arrangement.n + 1)
    return NormalForm(arrangement, omega, circuit_list).reduce(parsed)


# Eliminant

def _dense(rows: Sequence[Mapping[int, Any]], ncols: int) -> List[List[Any]]:
    dense = []
    for row in rows:
        values = [QQ.zero] * ncols
        for j, v in row.items():
            values[j] = v
        dense.append(values)
    return dense


def _in_basis(form: Form, index: Mapping[Monomial, int]) -> Dict[int, Any]:
    return {index[m]: c for m, c in form.items()}


def _pencil_row(top: Dict[int, Any], bottom: Dict[int, Any], t: Any) -> Dict[int, Any]:
    """top - t * bottom."""
    row = dict(top)
    for j, v in bottom.items():
        row[j] = row.get(j, QQ.zero) - t * v
    return row


def eliminant(arrangement: ArrangementMatrix, u: Sequence[Any], h1: Union[str, Form], h2: Union[str, Form],
              q: Optional[int] = None, omega: Optional[Sequence[int]] = None,
              rng: Optional[np.random.Generator] = None, attempts: int = 3) -> Eliminant:
    """
    Univariate polynomial in t vanishing at h2/h1 on every point of the linear section.

    M(t) is square of size HF(q): a row basis of I(L_u)_q modulo I(R_L),
    followed by deg R_L rows (h2 - t h1) m for selected degree-(q-1) monomials m.
    det M(t) is recovered by exact evaluation at deg + 1 points and interpolation.
    """
    nvars = arrangement.n + 1
    q = arrangement.d + 1 if q is None else q
    if omega is None:
        omega = tuple(range(1, nvars + 1))
    rng = rng if rng is not None else np.random.default_rng()
    circuit_list = circuits(arrangement)
    forms = [parse_form(h, nvars) for h in (h1, h2)]
    if any(form_degree(f) != 1 for f in forms):
        raise MalformedInput("h1 and h2 must be linear forms")

    reducer = NormalForm(arrangement, omega, circuit_list)
    basis = standard_monomials(arrangement, omega, q)
    index = {m: k for k, m in enumerate(basis.monomials)}
    size = len(basis)
    degree = len(nbc_bases(arrangement, omega, circuit_list=circuit_list))

    multipliers = ambient_monomials(nvars, q - 1)
    linear_rows = [
        _in_basis(reducer.reduce(_multiply(g, m)), index)
        for g in linear_generators(arrangement, u) for m in multipliers
    ]
    top = [linear_rows[k] for k in qq_independent_rows(_dense(linear_rows, size), size)]
    if len(top) != size - degree:
        raise GenericityFailure(
            f"I(L_u) spans {len(top)} of {size} dimensions at degree {q}, expected {size - degree}",
            {'rank': len(top), 'size': size, 'degree': degree, 'q': q})

    h2_rows = [_in_basis(reducer.reduce(_multiply(forms[1], m)), index) for m in multipliers]
    h1_rows = [_in_basis(reducer.reduce(_multiply(forms[0], m)), index) for m in multipliers]

    selected = None
    for _ in range(attempts):
        t_star = QQ(int(rng.integers(1, 1000)), int(rng.integers(1, 1000)))
        candidates = [_pencil_row(a, b, t_star) for a, b in zip(h2_rows, h1_rows)]
        pivots = qq_independent_rows(_dense(top + candidates, size), size)
        if len(pivots) == size:
            selected = [p - len(top) for p in pivots if p >= len(top)]
            break
        logger.debug(f"Row selection at t = {t_star} reached rank {len(pivots)} of {size}; reselecting")
    if selected is None:
        raise SingularSelection(f"no selection of {degree} pencil rows completes the matrix",
                                {'size': size, 'degree': degree})

    t = Symbol('t')
    samples = []
    for k in range(degree + 1):
        point = QQ(k)
        rows = top + [_pencil_row(h2_rows[i], h1_rows[i], point) for i in selected]
        samples.append((Rational(k), QQ.to_sympy(qq_det(_dense(rows, size)))))
    determinant = Poly(interpolate(samples, t), t, domain=QQ)

    if determinant.is_zero:
        raise DegreeCollapse("det M(t) vanishes identically; h1 is not a valid denominator",
                             {'q': q, 'size': size})
    if determinant.degree() < degree:
        raise DegreeCollapse(f"det M(t) has degree {determinant.degree()}, expected {degree}; "
                             f"h1 vanishes on the linear section",
                             {'degree': determinant.degree(), 'expected': degree})
    result = Eliminant(poly=determinant.monic(), q=q, size=size, selected=[multipliers[i] for i in selected])
    logger.info(f"Eliminant of degree {result.degree} from a {size} x {size} matrix")
    return result


def eliminant_roots(result: Eliminant) -> np.ndarray:
    coefficients = [complex(float(c), 0.0) for c in result.coefficients]
    return np.sort_complex(np.roots(coefficients))
