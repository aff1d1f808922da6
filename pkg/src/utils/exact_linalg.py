"""
Exact rational linear algebra helpers.

Thin layer over sympy's DomainMatrix (matrices over QQ) so the
combinatorial modules can ask for ranks, kernels and independent rows without
touching floating point.
"""

import numbers
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

from sympy import Matrix, Rational, nsimplify
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

RationalLike = Union[int, str, Fraction, Rational]


def to_rational(value: RationalLike) -> Rational:
    """Parse ints, Fractions, sympy Rationals and ``"p/q"`` strings."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rational entries")
    if isinstance(value, numbers.Integral):
        return Rational(int(value))
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational string")
        if '/' in text:
            num, den = text.split('/', 1)
            return Rational(int(num.strip()), int(den.strip()))
        return Rational(int(text))
    if isinstance(value, float):
        # only exact binary fractions are accepted silently
        return nsimplify(value, rational=True)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def format_rational(value: Rational) -> str:
    value = Rational(value)
    if value.q == 1:
        return str(value.p)
    return f"{value.p}/{value.q}"


def domain_matrix(rows: Sequence[Sequence[RationalLike]], ncols: int = None) -> DomainMatrix:
    """Build a DomainMatrix over QQ from nested sequences."""
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    entries = [[QQ.from_sympy(to_rational(v)) for v in r] for r in rows]
    return DomainMatrix(entries, (len(entries), ncols), QQ)


def rank(rows: Sequence[Sequence[RationalLike]]) -> int:
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    return domain_matrix(rows).rank()


def rref(rows: Sequence[Sequence[RationalLike]]) -> Tuple[List[List[Rational]], Tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return [list(r) for r in rows], ()
    reduced, pivots = domain_matrix(rows).rref()
    as_matrix = reduced.to_Matrix()
    return [list(as_matrix.row(i)) for i in range(as_matrix.rows)], tuple(pivots)


def kernel(rows: Sequence[Sequence[RationalLike]], ncols: int = None) -> List[List[Rational]]:
    """Basis of the right kernel {v : M v = 0}, one vector per free column."""
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[Rational(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Rational(0)] * ncols
        vec[f] = Rational(1)
        for i, p in enumerate(pivots):
            vec[p] = -reduced[i][f]
        basis.append(vec)
    return basis


def independent_rows(rows: Sequence[Sequence[RationalLike]]) -> List[int]:
    """Indices of a greedy maximal independent subset of the rows, in input order."""
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return []
    transposed = [list(col) for col in zip(*rows)]
    _, pivots = domain_matrix(transposed, ncols=len(rows)).rref()
    return list(pivots)


def determinant(rows: Sequence[Sequence[RationalLike]]) -> Rational:
    rows = [list(r) for r in rows]
    if not rows:
        return Rational(1)
    return QQ.to_sympy(domain_matrix(rows).det())


def column_submatrix(rows: Sequence[Sequence[RationalLike]], columns: Iterable[int]) -> List[List[Rational]]:
    columns = list(columns)
    return [[r[c] for c in columns] for r in rows]


def to_sympy_matrix(rows: Sequence[Sequence[RationalLike]]) -> Matrix:
    return Matrix([[to_rational(v) for v in r] for r in rows])


# Entries already in QQ

def qq(value: RationalLike):
    return QQ.from_sympy(to_rational(value))


def qq_matrix(rows: Sequence[Sequence], ncols: int) -> DomainMatrix:
    """DomainMatrix from rows whose entries are already QQ elements."""
    rows = [list(r) for r in rows]
    return DomainMatrix(rows, (len(rows), ncols), QQ)


def qq_rank(rows: Sequence[Sequence], ncols: int) -> int:
    if not rows or ncols == 0:
        return 0
    return qq_matrix(rows, ncols).rank()


def qq_independent_rows(rows: Sequence[Sequence], ncols: int) -> List[int]:
    """Greedy maximal independent subset of rows, by pivoting on the transpose."""
    if not rows or ncols == 0:
        return []
    transposed = [[rows[i][j] for i in range(len(rows))] for j in range(ncols)]
    _, pivots = qq_matrix(transposed, len(rows)).rref()
    return list(pivots)


def qq_det(rows: Sequence[Sequence]):
    if not rows:
        return QQ.one
    return qq_matrix(rows, len(rows)).det()


def qq_sparse_rank(rows: Sequence[Dict[int, Any]], ncols: int) -> int:
    """Rank of a matrix given as one {column: QQ entry} dict per row."""
    table = {i: {j: v for j, v in row.items() if v} for i, row in enumerate(rows)}
    table = {i: row for i, row in table.items() if row}
    if not table or ncols == 0:
        return 0
    return DomainMatrix(table, (len(rows), ncols), QQ).rank()
