#!/usr/bin/env python3
"""
Exact combinatorics of the linear matroid M(L).

Ranks are computed over QQ and cached per column subset.  Subsets are
handled internally as integer bitmasks over the ground set {0, ..., n}.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Rational

from src.core.arrangement import ArrangementMatrix
from src.core.errors import GroundSetTooLarge, InternalInconsistency, MalformedInput, NotEssential
from src.utils.exact_linalg import format_rational, kernel, qq, qq_rank

logger = logging.getLogger(__name__)

MAX_GROUND_SET = 24

TYPE_I = "type_i"
TYPE_II = "type_ii"
NEITHER = "neither"


@dataclass(frozen=True)
class Circuit:
    support: Tuple[int, ...]
    alpha: Tuple[Rational, ...]

    def coefficient(self, i: int) -> Rational:
        return self.alpha[self.support.index(i)]

    def to_dict(self) -> Dict:
        return {'support': list(self.support), 'alpha': [format_rational(a) for a in self.alpha]}


@dataclass(frozen=True)
class Flat:
    support: Tuple[int, ...]
    rank_L: int
    rank_A: int
    flat_type: str

    @property
    def mask(self) -> int:
        return to_mask(self.support)

    def to_dict(self) -> Dict:
        return {
            'support': list(self.support),
            'rank_L': self.rank_L,
            'rank_A': self.rank_A,
            'flat_type': self.flat_type,
        }


@dataclass(frozen=True)
class AffineFlat:
    """A nonempty intersection of hyperplanes with its Moebius value."""
    flat: Flat
    dimension: int
    mobius: int


@dataclass
class CriterionResult:
    verdict: str
    witnesses: List[Flat] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {'verdict': self.verdict, 'witnesses': [list(w.support) for w in self.witnesses]}


def to_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def from_mask(mask: int) -> Tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


class LinearMatroid:
    """Rank oracle for the columns of L and of A^T = L[1:]."""

    def __init__(self, arrangement: ArrangementMatrix):
        self.arrangement = arrangement
        self.size = arrangement.n + 1
        self.rank = arrangement.d + 1
        self._rows = [[qq(v) for v in row] for row in arrangement.L]
        self._rank_L: Dict[int, int] = {0: 0}
        self._rank_A: Dict[int, int] = {0: 0}

    def _subset_rank(self, rows: List[List], mask: int) -> int:
        columns = from_mask(mask)
        return qq_rank([[row[c] for c in columns] for row in rows], len(columns))

    def rank_L(self, subset) -> int:
        mask = subset if isinstance(subset, int) else to_mask(subset)
        if mask not in self._rank_L:
            self._rank_L[mask] = self._subset_rank(self._rows, mask)
        return self._rank_L[mask]

    def rank_A(self, subset) -> int:
        mask = subset if isinstance(subset, int) else to_mask(subset)
        if mask not in self._rank_A:
            self._rank_A[mask] = self._subset_rank(self._rows[1:], mask)
        return self._rank_A[mask]

    def closure(self, subset) -> int:
        mask = subset if isinstance(subset, int) else to_mask(subset)
        base = self.rank_L(mask)
        for e in range(self.size):
            bit = 1 << e
            if not mask & bit and self.rank_L(mask | bit) == base:
                mask |= bit
        return mask

    def is_flat(self, subset) -> bool:
        mask = subset if isinstance(subset, int) else to_mask(subset)
        return self.closure(mask) == mask

    def make_flat(self, subset) -> Flat:
        mask = subset if isinstance(subset, int) else to_mask(subset)
        rank_L, rank_A = self.rank_L(mask), self.rank_A(mask)
        if rank_A == rank_L:
            flat_type = TYPE_I
        elif rank_A == rank_L - 1:
            flat_type = TYPE_II
        else:
            flat_type = NEITHER
        return Flat(support=from_mask(mask), rank_L=rank_L, rank_A=rank_A, flat_type=flat_type)


def _matroid(arrangement: ArrangementMatrix, matroid: Optional[LinearMatroid]) -> LinearMatroid:
    if arrangement.n + 1 > MAX_GROUND_SET:
        raise GroundSetTooLarge(f"ground set of size {arrangement.n + 1} exceeds {MAX_GROUND_SET}",
                                {'size': arrangement.n + 1, 'limit': MAX_GROUND_SET})
    if matroid is None or matroid.arrangement is not arrangement:
        matroid = LinearMatroid(arrangement)
    return matroid


def validate_omega(omega: Sequence[int], size: int) -> Tuple[int, ...]:
    """A weight order needs one integer per element, pairwise distinct."""
    try:
        values = tuple(int(w) for w in omega)
    except (TypeError, ValueError):
        raise MalformedInput(f"omega must be integers, got {omega!r}")
    if len(values) != size:
        raise MalformedInput(f"omega has length {len(values)}, expected {size}",
                             {'length': len(values), 'expected': size})
    if len(set(values)) != size:
        raise MalformedInput("omega entries must be pairwise distinct", {'omega': list(values)})
    return values


def random_omega(size: int, rng: np.random.Generator) -> Tuple[int, ...]:
    return tuple(int(w) for w in rng.permutation(size) + 1)


# Circuits and flats

def circuits(arrangement: ArrangementMatrix, matroid: Optional[LinearMatroid] = None) -> List[Circuit]:
    """All minimal dependent column sets with their normalized linear relation."""
    matroid = _matroid(arrangement, matroid)
    size = matroid.size
    found: List[int] = []
    result: List[Circuit] = []

    for k in range(1, min(matroid.rank + 1, size) + 1):
        for combo in combinations(range(size), k):
            mask = to_mask(combo)
            if any(c & mask == c for c in found):
                continue
            if matroid.rank_L(mask) < k:
                found.append(mask)
                result.append(Circuit(support=combo, alpha=_circuit_alpha(arrangement, combo)))

    logger.debug(f"Found {len(result)} circuits on a ground set of size {size}")
    return result


def _circuit_alpha(arrangement: ArrangementMatrix, support: Tuple[int, ...]) -> Tuple[Rational, ...]:
    columns = [[row[c] for c in support] for row in arrangement.L]
    basis = kernel(columns, ncols=len(support))
    if len(basis) != 1:
        raise InternalInconsistency(f"circuit {support} has a {len(basis)}-dimensional relation space",
                                    {'support': list(support)})
    vec = basis[0]
    lead = next(v for v in vec if v != 0)
    return tuple(Rational(v) / lead for v in vec)


def flats(arrangement: ArrangementMatrix, matroid: Optional[LinearMatroid] = None) -> List[Flat]:
    """Every flat of M(L), generated rank by rank from closures of covers."""
    matroid = _matroid(arrangement, matroid)
    level = {matroid.closure(0)}
    seen = set(level)
    while level:
        following = set()
        for mask in level:
            for e in range(matroid.size):
                if mask & (1 << e):
                    continue
                cover = matroid.closure(mask | (1 << e))
                if cover not in seen:
                    seen.add(cover)
                    following.add(cover)
        level = following

    result = [matroid.make_flat(mask) for mask in seen]
    result.sort(key=lambda f: (f.rank_L, len(f.support), f.support))
    return result


# Broken circuits

def broken_circuits(circuit_list: Sequence[Circuit], omega: Sequence[int]) -> List[Tuple[int, ...]]:
    """Circuits minus their omega-minimal element, reduced to the inclusion-minimal ones."""
    candidates = set()
    for circuit in circuit_list:
        lowest = min(circuit.support, key=lambda i: omega[i])
        candidates.add(tuple(i for i in circuit.support if i != lowest))

    minimal: List[Tuple[int, ...]] = []
    for candidate in sorted(candidates, key=lambda s: (len(s), s)):
        mask = to_mask(candidate)
        if not any(to_mask(m) & mask == to_mask(m) for m in minimal):
            minimal.append(candidate)
    return sorted(minimal)


def _complex_masks(size: int, broken: Sequence[Tuple[int, ...]]) -> List[int]:
    broken_masks = [to_mask(b) for b in broken]
    faces = [0]
    stack = [(0, -1)]
    while stack:
        mask, top = stack.pop()
        for e in range(top + 1, size):
            grown = mask | (1 << e)
            if any(b & grown == b for b in broken_masks):
                continue
            faces.append(grown)
            stack.append((grown, e))
    return faces


def broken_circuit_complex(arrangement: ArrangementMatrix, omega: Sequence[int],
                           matroid: Optional[LinearMatroid] = None,
                           circuit_list: Optional[Sequence[Circuit]] = None) -> List[Tuple[int, ...]]:
    """All faces (including the empty face) of the broken-circuit complex."""
    omega = validate_omega(omega, arrangement.n + 1)
    if circuit_list is None:
        circuit_list = circuits(arrangement, matroid)
    faces = _complex_masks(arrangement.n + 1, broken_circuits(circuit_list, omega))
    return sorted((from_mask(f) for f in faces), key=lambda s: (len(s), s))


def nbc_bases(arrangement: ArrangementMatrix, omega: Sequence[int],
              matroid: Optional[LinearMatroid] = None,
              circuit_list: Optional[Sequence[Circuit]] = None) -> List[Tuple[int, ...]]:
    """Facets of the broken-circuit complex; each must have d+1 elements."""
    omega = validate_omega(omega, arrangement.n + 1)
    if circuit_list is None:
        circuit_list = circuits(arrangement, matroid)
    size = arrangement.n + 1
    faces = _complex_masks(size, broken_circuits(circuit_list, omega))
    face_set = set(faces)

    facets = []
    for mask in faces:
        if all(mask & (1 << e) or (mask | (1 << e)) not in face_set for e in range(size)):
            facets.append(from_mask(mask))

    sizes = {len(f) for f in facets}
    if sizes != {arrangement.d + 1}:
        raise InternalInconsistency(f"broken-circuit complex has facets of sizes {sorted(sizes)}",
                                    {'sizes': sorted(sizes), 'expected': arrangement.d + 1})
    return sorted(facets)


def reciprocal_degree(arrangement: ArrangementMatrix, omega: Optional[Sequence[int]] = None,
                      rng: Optional[np.random.Generator] = None, checks: int = 3,
                      matroid: Optional[LinearMatroid] = None) -> int:
    """Degree of the reciprocal linear space: the number of nbc bases."""
    matroid = _matroid(arrangement, matroid)
    circuit_list = circuits(arrangement, matroid)
    size = arrangement.n + 1
    if omega is None:
        omega = tuple(range(1, size + 1))
    degree = len(nbc_bases(arrangement, omega, matroid, circuit_list))

    rng = rng if rng is not None else np.random.default_rng(0)
    for _ in range(checks):
        other = random_omega(size, rng)
        count = len(nbc_bases(arrangement, other, matroid, circuit_list))
        if count != degree:
            raise InternalInconsistency(f"nbc basis count depends on omega ({degree} vs {count})",
                                        {'omega': list(other), 'counts': [degree, count]})
    return degree


# Affine intersection lattice

def is_essential(arrangement: ArrangementMatrix, matroid: Optional[LinearMatroid] = None) -> bool:
    matroid = _matroid(arrangement, matroid)
    return matroid.rank_A((1 << matroid.size) - 1) == arrangement.d


def intersection_semilattice(arrangement: ArrangementMatrix,
                             matroid: Optional[LinearMatroid] = None) -> List[AffineFlat]:
    """
    Nonempty intersections of hyperplanes, i.e. the flats with rank_A = rank_L.

    The bottom element is the empty flat (the whole space).  Moebius values are
    computed from the bottom upwards over flats ordered by inclusion.
    """
    matroid = _matroid(arrangement, matroid)
    affine = [f for f in flats(arrangement, matroid) if f.flat_type == TYPE_I]
    affine.sort(key=lambda f: (f.rank_L, f.support))

    mobius: Dict[int, int] = {}
    result = []
    for flat in affine:
        mask = flat.mask
        if mask == 0:
            value = 1
        else:
            value = -sum(mu for other, mu in mobius.items() if other != mask and other & mask == other)
        mobius[mask] = value
        result.append(AffineFlat(flat=flat, dimension=arrangement.d - flat.rank_A, mobius=value))
    return result


def characteristic_polynomial(arrangement: ArrangementMatrix,
                              matroid: Optional[LinearMatroid] = None) -> List[int]:
    """Integer coefficients of chi(t), highest degree (t^d) first."""
    coefficients = [0] * (arrangement.d + 1)
    for element in intersection_semilattice(arrangement, matroid):
        coefficients[arrangement.d - element.dimension] += element.mobius
    return coefficients


def _evaluate(coefficients: Sequence[int], t: int) -> int:
    value = 0
    for c in coefficients:
        value = value * t + c
    return value


def ml_degree(arrangement: ArrangementMatrix, matroid: Optional[LinearMatroid] = None) -> int:
    """(-1)^d chi(X), the number of critical points for generic exponents."""
    matroid = _matroid(arrangement, matroid)
    if not is_essential(arrangement, matroid):
        raise NotEssential(f"rank(A) < d = {arrangement.d}; the arrangement is not essential",
                           {'rank_A': matroid.rank_A((1 << matroid.size) - 1), 'd': arrangement.d})

    lattice = intersection_semilattice(arrangement, matroid)
    if not any(element.dimension == 0 for element in lattice):
        logger.warning("rank(A) = d but no hyperplanes meet in a single point; "
                       "the two readings of essentialness disagree on this instance")

    coefficients = [0] * (arrangement.d + 1)
    for element in lattice:
        coefficients[arrangement.d - element.dimension] += element.mobius
    value = (-1) ** arrangement.d * _evaluate(coefficients, 1)
    if value < 0:
        raise InternalInconsistency(f"signed Euler characteristic is negative ({value})",
                                    {'characteristic_polynomial': coefficients})
    return value


def bounded_chamber_count(arrangement: ArrangementMatrix, matroid: Optional[LinearMatroid] = None) -> int:
    """Bounded regions of the real arrangement, |chi(1)|."""
    return abs(_evaluate(characteristic_polynomial(arrangement, matroid), 1))


def chamber_count(arrangement: ArrangementMatrix, matroid: Optional[LinearMatroid] = None) -> int:
    """All regions of the real arrangement, |chi(-1)|."""
    return abs(_evaluate(characteristic_polynomial(arrangement, matroid), -1))


# Connectivity

def beta_invariant(arrangement: ArrangementMatrix, matroid: Optional[LinearMatroid] = None) -> int:
    """Crapo's beta: (-1)^r sum over all subsets S of (-1)^|S| rank(S)."""
    matroid = _matroid(arrangement, matroid)
    total = 0
    for mask in range(1 << matroid.size):
        sign = -1 if bin(mask).count('1') % 2 else 1
        total += sign * matroid.rank_L(mask)
    return (-1) ** matroid.rank * total


def circuit_components(arrangement: ArrangementMatrix, circuit_list: Optional[Sequence[Circuit]] = None,
                       matroid: Optional[LinearMatroid] = None) -> List[FrozenSet[int]]:
    """Connected components of the relation 'lie in a common circuit'."""
    if circuit_list is None:
        circuit_list = circuits(arrangement, matroid)
    parent = list(range(arrangement.n + 1))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for circuit in circuit_list:
        first = find(circuit.support[0])
        for other in circuit.support[1:]:
            parent[find(other)] = first

    groups: Dict[int, set] = {}
    for i in range(arrangement.n + 1):
        groups.setdefault(find(i), set()).add(i)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def is_connected(arrangement: ArrangementMatrix, matroid: Optional[LinearMatroid] = None) -> bool:
    matroid = _matroid(arrangement, matroid)
    by_beta = beta_invariant(arrangement, matroid) != 0
    by_circuits = len(circuit_components(arrangement, matroid=matroid)) == 1
    if by_beta != by_circuits:
        raise InternalInconsistency("beta invariant and circuit connectivity disagree",
                                    {'beta_nonzero': by_beta, 'circuit_connected': by_circuits})
    return by_beta


def degree_criterion(arrangement: ArrangementMatrix, matroid: Optional[LinearMatroid] = None) -> CriterionResult:
    """ML degree equals reciprocal degree iff no proper flat is of type (ii)."""
    matroid = _matroid(arrangement, matroid)
    full = tuple(range(matroid.size))
    witnesses = [f for f in flats(arrangement, matroid) if f.flat_type == TYPE_II and f.support != full]
    if witnesses:
        return CriterionResult(verdict="strict", witnesses=witnesses)
    return CriterionResult(verdict="equal")
