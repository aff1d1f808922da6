#!/usr/bin/env python3
"""
Scattering equations on the moduli space of m marked points on a line.

After fixing z_1 = 0, z_2 = 1 and z_m = infinity, the remaining points are
the variables x_1, ..., x_{m-3} (x_v = z_{v+2}).  Every minor p_ij with
1 <= i < j <= m - 1 and j >= 3 is an affine linear form in x, giving the
arrangement L_m with d = m - 3 and m(m-3)/2 hyperplanes.

Column order: the block of variable v lists x_v, x_v - 1, x_v - x_1, ...,
x_v - x_{v-1}, labelled (1, v+2), (2, v+2), (3, v+2), ..., (v+1, v+2).
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, factorial
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.core.arrangement import ArrangementMatrix, gradient, phi_inverse
from src.core.errors import (
    BadM,
    CensusMismatch,
    InconsistentPoint,
    DegenerateScale,
    InternalInconsistency,
    MalformedInput,
    OnArrangement,
    SubsystemViolation,
    UnmatchedCluster,
)
from src.core.homotopy import BoundaryCluster, SolutionReport, random_complex, target_matrix
from src.core.matroid import TYPE_II, LinearMatroid, flats, to_mask

logger = logging.getLogger(__name__)

MIN_M = 4
MAX_M = 9
SUBSYSTEM_TOL = 1e-6

Label = Tuple[int, int]


@dataclass
class ChyInstance:
    m: int
    arrangement: ArrangementMatrix
    column_labels: List[Label]
    s: np.ndarray

    @property
    def d(self) -> int:
        return self.m - 3

    def to_dict(self) -> Dict[str, Any]:
        return {
            'm': self.m,
            'arrangement': self.arrangement.to_dict(),
            'column_labels': [list(label) for label in self.column_labels],
            's': [[float(v.real), float(v.imag)] for v in self.s],
        }


@dataclass(frozen=True)
class TypeTwoFlat:
    """The stratum I_r(W): forms involving only x_0 = 1 and x_i for i in W."""
    r: int
    W: Tuple[int, ...]
    support: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {'r': self.r, 'W': list(self.W), 'support': list(self.support)}


@dataclass
class StratumCount:
    stratum: TypeTwoFlat
    expected_points: int
    expected_multiplicity: int
    clusters: List[BoundaryCluster] = field(default_factory=list)

    @property
    def observed_points(self) -> int:
        return len(self.clusters)

    @property
    def observed_multiplicities(self) -> List[int]:
        return sorted(c.multiplicity for c in self.clusters)

    @property
    def deviates(self) -> bool:
        return (self.observed_points != self.expected_points
                or any(mult != self.expected_multiplicity for mult in self.observed_multiplicities))

    def to_dict(self) -> Dict[str, Any]:
        data = self.stratum.to_dict()
        data.update({
            'expected_points': self.expected_points,
            'observed_points': self.observed_points,
            'expected_multiplicity': self.expected_multiplicity,
            'observed_multiplicities': self.observed_multiplicities,
            'deviates': self.deviates,
        })
        return data


@dataclass
class Census:
    m: int
    interior: int
    expected_interior: int
    strata: List[StratumCount]
    paths: int

    @property
    def total_mass(self) -> int:
        return self.interior + sum(sum(s.observed_multiplicities) for s in self.strata)

    @property
    def expected_mass(self) -> int:
        return (self.m - 3) * factorial(self.m - 3)

    @property
    def deviations(self) -> List[StratumCount]:
        return [s for s in self.strata if s.deviates]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'm': self.m,
            'interior': self.interior,
            'expected_interior': self.expected_interior,
            'paths': self.paths,
            'total_mass': self.total_mass,
            'expected_mass': self.expected_mass,
            'deviations': len(self.deviations),
            'strata': [s.to_dict() for s in self.strata],
        }


def _column_specs(m: int) -> List[Tuple[int, Optional[int], Label]]:
    """(variable, subtracted variable or 0 for the constant or None, label) per column."""
    specs = []
    for v in range(1, m - 2):
        specs.append((v, None, (1, v + 2)))
        specs.append((v, 0, (2, v + 2)))
        for i in range(1, v):
            specs.append((v, i, (i + 2, v + 2)))
    return specs


def build_chy(m: int, s: Optional[Sequence[complex]] = None,
              rng: Optional[np.random.Generator] = None) -> ChyInstance:
    """L_m with Mandelstam values s; generic complex s are drawn when s is absent."""
    if not isinstance(m, (int, np.integer)) or not MIN_M <= m <= MAX_M:
        raise BadM(f"m must be an integer in {MIN_M}..{MAX_M}, got {m!r}", {'m': m})
    return _build(int(m), s, rng)


def _build(m: int, s: Optional[Sequence[complex]], rng: Optional[np.random.Generator]) -> ChyInstance:
    specs = _column_specs(m)
    rows = [[0] * len(specs) for _ in range(m - 2)]
    for k, (v, sub, _) in enumerate(specs):
        rows[v][k] = 1
        if sub is not None:
            rows[sub][k] = -1
    arrangement = ArrangementMatrix.from_rows(rows)
    labels = [label for _, _, label in specs]

    if s is None:
        rng = rng if rng is not None else np.random.default_rng()
        values = random_complex(rng, len(labels))
    else:
        values = np.asarray(s, dtype=complex)
        if values.shape != (len(labels),):
            raise MalformedInput(f"s has length {values.size}, expected {len(labels)}",
                                 {'length': int(values.size), 'expected': len(labels)})
    return ChyInstance(m=m, arrangement=arrangement, column_labels=labels, s=values)


def mandelstam_from_labels(labels: Sequence[Label], values: Mapping[Label, complex]) -> np.ndarray:
    """Arrange a {(i, j): s_ij} mapping in column order; (j, i) keys are accepted."""
    out = []
    for i, j in labels:
        if (i, j) in values:
            out.append(values[(i, j)])
        elif (j, i) in values:
            out.append(values[(j, i)])
        else:
            raise MalformedInput(f"missing Mandelstam invariant s_{i}{j}", {'label': [i, j]})
    return np.asarray(out, dtype=complex)


def column_blocks(inst: ChyInstance) -> List[int]:
    """Block (variable) index of every column."""
    return [v for v, _, _ in _column_specs(inst.m)]


def circuits_respect_blocks(inst: ChyInstance, circuit_list) -> bool:
    """True when no circuit takes more than two columns from one block."""
    blocks = column_blocks(inst)
    for circuit in circuit_list:
        counts: Dict[int, int] = {}
        for i in circuit.support:
            counts[blocks[i]] = counts.get(blocks[i], 0) + 1
        if max(counts.values()) > 2:
            return False
    return True


def scaled_target_start(inst: ChyInstance) -> np.ndarray:
    """A^T diag(s) used as the start matrix; its starts are known to be degenerate."""
    return target_matrix(inst.arrangement, inst.s)


# Type (ii) flats

def i_r_support(inst: ChyInstance, W: Sequence[int]) -> Tuple[int, ...]:
    allowed = {0} | set(W)
    return tuple(
        k for k in range(inst.arrangement.n + 1)
        if all(row == 0 or inst.arrangement.L[row][k] == 0
               for row in range(inst.arrangement.d + 1) if row not in allowed)
    )


def _stratum(inst: ChyInstance, W: Sequence[int]) -> TypeTwoFlat:
    W = tuple(sorted(W))
    return TypeTwoFlat(r=inst.d - len(W), W=W, support=i_r_support(inst, W))


def type_two_flats(inst: ChyInstance, matroid: Optional[LinearMatroid] = None) -> List[TypeTwoFlat]:
    """All I_r(W), r = 0..m-4, each confirmed to be a type (ii) flat."""
    matroid = matroid or LinearMatroid(inst.arrangement)
    result = []
    for r in range(inst.d):
        found = [_stratum(inst, W) for W in combinations(range(1, inst.d + 1), inst.d - r)]
        if len(found) != comb(inst.d, r):
            raise CensusMismatch(f"{len(found)} strata for r={r}, expected {comb(inst.d, r)}")
        for stratum in found:
            mask = to_mask(stratum.support)
            if not matroid.is_flat(mask):
                raise CensusMismatch(f"I_{r}({list(stratum.W)}) is not a flat", stratum.to_dict())
            flat = matroid.make_flat(mask)
            if flat.flat_type != TYPE_II or flat.rank_L != len(stratum.W) + 1:
                raise CensusMismatch(f"I_{r}({list(stratum.W)}) has type {flat.flat_type}", stratum.to_dict())
        result.extend(found)
    return result


def extra_type_two_flats(inst: ChyInstance, matroid: Optional[LinearMatroid] = None) -> List[Tuple[int, ...]]:
    """Type (ii) flats of M(L_m) that are not of the form I_r(W)."""
    known = {s.support for s in type_two_flats(inst, matroid)}
    extras = [f.support for f in flats(inst.arrangement, matroid)
              if f.flat_type == TYPE_II and f.support not in known]
    if extras:
        logger.warning(f"Found {len(extras)} type (ii) flats outside the I_r(W) family for m={inst.m}")
    return extras


def lattice_meet(inst: ChyInstance, W: Sequence[int], W_other: Sequence[int]) -> TypeTwoFlat:
    """I_r(W) meet I_r'(W') = I_{m-3-|W & W'|}(W & W'); the empty W gives the empty set."""
    meet = _stratum(inst, set(W) & set(W_other))
    expected = set(i_r_support(inst, W)) & set(i_r_support(inst, W_other))
    if set(meet.support) != expected:
        raise InternalInconsistency(f"meet of {list(W)} and {list(W_other)} is not I_r of the intersection",
                                    {'meet': list(meet.support), 'intersection': sorted(expected)})
    return meet


def mass_identity(m: int) -> int:
    """sum_r C(m-3, r) r! (m-3-r)! over r = 0..m-4."""
    d = m - 3
    return sum(comb(d, r) * factorial(r) * factorial(d - r) for r in range(d))


# Boundary census

def boundary_census(inst: ChyInstance, report: SolutionReport,
                    matroid: Optional[LinearMatroid] = None) -> Census:
    """Assign boundary clusters to the strata I_r(W), r >= 1, and compare with the predicted counts."""
    strata = [s for s in type_two_flats(inst, matroid) if s.r >= 1]
    by_support = {
        s.support: StratumCount(stratum=s, expected_points=factorial(inst.d - s.r),
                                expected_multiplicity=factorial(s.r))
        for s in strata
    }
    for cluster in report.boundary_clusters:
        count = by_support.get(tuple(cluster.support))
        if count is None:
            raise UnmatchedCluster(f"boundary cluster on {list(cluster.support)} matches no I_r(W)",
                                   {'support': list(cluster.support), 'paths': cluster.paths})
        count.clusters.append(cluster)

    census = Census(m=inst.m, interior=len(report.interior), expected_interior=factorial(inst.d),
                    strata=list(by_support.values()), paths=len(report.paths))
    for deviation in census.deviations:
        logger.warning(f"Stratum I_{deviation.stratum.r}({list(deviation.stratum.W)}): "
                       f"{deviation.observed_points} points with multiplicities "
                       f"{deviation.observed_multiplicities}, expected {deviation.expected_points} "
                       f"of multiplicity {deviation.expected_multiplicity}")
    logger.info(f"Census m={inst.m}: interior {census.interior}, mass {census.total_mass}/{census.expected_mass}")
    return census


def sub_instance(inst: ChyInstance, W: Sequence[int]) -> ChyInstance:
    """L_{m-r} on particles 1, 2, m and W, with the Mandelstam values of I_r(W)."""
    stratum = _stratum(inst, W)
    rows = [0] + list(stratum.W)
    restricted = [[inst.arrangement.L[row][k] for k in stratum.support] for row in rows]
    sub = _build(inst.m - stratum.r, inst.s[list(stratum.support)], None)
    if [list(row) for row in sub.arrangement.L] != restricted:
        raise InternalInconsistency(f"restriction to I_{stratum.r}({list(stratum.W)}) is not L_{sub.m}")
    sub.column_labels = [inst.column_labels[k] for k in stratum.support]
    return sub


def sub_scattering_residual(inst: ChyInstance, W: Sequence[int], y: Sequence[complex],
                            tol_verify: float = 1e-5) -> float:
    """Relative scattering residual of the nonzero coordinates of y on the sub-instance."""
    support = list(i_r_support(inst, W))
    sub = sub_instance(inst, W)
    point = phi_inverse(sub.arrangement, np.asarray(y, dtype=complex)[support], tol_verify=tol_verify)
    forms = np.concatenate(([1.0], point.x)) @ sub.arrangement.numeric
    scale = np.abs(sub.arrangement.numeric[1:]) @ np.abs(sub.s / forms)
    g = gradient(sub.arrangement, sub.s, point.x)
    return float(np.max(np.abs(g) / np.maximum(scale, 1e-300)))


def sub_scattering_check(inst: ChyInstance, census: Census, tol: float = SUBSYSTEM_TOL) -> bool:
    """Every boundary point solves the scattering equations of its sub-instance."""
    for count in census.strata:
        for cluster in count.clusters:
            try:
                residual = sub_scattering_residual(inst, count.stratum.W, cluster.representative)
            except (InconsistentPoint, DegenerateScale, OnArrangement) as e:
                raise SubsystemViolation(f"cluster on {list(cluster.support)}: {e.message}",
                                         {'support': list(cluster.support)})
            logger.debug(f"I_{count.stratum.r}({list(count.stratum.W)}): sub-instance residual {residual:.2e}")
            if residual >= tol:
                raise SubsystemViolation(
                    f"cluster on {list(cluster.support)} has sub-instance residual {residual:.3e}",
                    {'support': list(cluster.support), 'residual': residual})
    return True
