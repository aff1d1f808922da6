"""
Tests for circuits, flats, broken circuits and the degree formulas.
"""

from itertools import combinations

import numpy as np
import pytest
from sympy import Rational

from src.core.arrangement import ArrangementMatrix, identity_arrangement
from src.core.errors import GroundSetTooLarge, MalformedInput, NotEssential
from src.core.matroid import (
    TYPE_I,
    TYPE_II,
    LinearMatroid,
    beta_invariant,
    bounded_chamber_count,
    broken_circuit_complex,
    broken_circuits,
    chamber_count,
    characteristic_polynomial,
    circuit_components,
    circuits,
    degree_criterion,
    flats,
    intersection_semilattice,
    is_connected,
    is_essential,
    ml_degree,
    nbc_bases,
    random_omega,
    reciprocal_degree,
    validate_omega,
)


def _random_small(seed: int) -> ArrangementMatrix:
    rng = np.random.default_rng(seed)
    while True:
        d = int(rng.integers(1, 4))
        n = int(rng.integers(d + 1, 8))
        rows = rng.integers(-2, 3, size=(d + 1, n + 1))
        if np.linalg.matrix_rank(rows) == d + 1 and np.all(np.any(rows != 0, axis=0)):
            return ArrangementMatrix.from_rows(rows.tolist())


def _rank(matrix: np.ndarray, subset) -> int:
    subset = list(subset)
    return int(np.linalg.matrix_rank(matrix[:, subset])) if subset else 0


def test_intro_single_circuit(intro):
    found = circuits(intro)
    assert len(found) == 1
    assert found[0].support == (0, 1, 2, 3)
    assert found[0].alpha == (1, -1, -1, 1)


def test_boundary_single_circuit(boundary):
    found = circuits(boundary)
    assert [c.support for c in found] == [(1, 2, 3)]
    assert found[0].alpha == (1, 1, -1)


def test_independent_columns_have_no_circuits():
    assert circuits(identity_arrangement(1)) == []


def test_boundary_flats(boundary):
    supports = {f.support for f in flats(boundary)}
    assert supports == {(), (0,), (1,), (2,), (3,), (0, 1), (0, 2), (0, 3), (1, 2, 3), (0, 1, 2, 3)}
    types = {f.support: f.flat_type for f in flats(boundary)}
    assert types[(0, 1)] == TYPE_II
    assert types[(1, 2, 3)] == TYPE_I


def test_intro_proper_flats_are_affine(intro):
    for flat in flats(intro):
        if 0 < len(flat.support) < 4:
            assert flat.flat_type == TYPE_I
            assert len(flat.support) <= 2


def test_broken_circuits(intro, boundary):
    omega = (1, 2, 3, 4)
    assert broken_circuits(circuits(intro), omega) == [(1, 2, 3)]
    assert broken_circuits(circuits(boundary), omega) == [(2, 3)]


def test_nbc_bases(intro):
    assert nbc_bases(intro, (1, 2, 3, 4)) == [(0, 1, 2), (0, 1, 3), (0, 2, 3)]


def test_broken_circuit_complex_faces(boundary):
    faces = broken_circuit_complex(boundary, (1, 2, 3, 4))
    assert () in faces
    assert (2, 3) not in faces
    assert [len(f) for f in faces].count(3) == 2


def test_degrees_of_running_examples(intro, boundary):
    assert reciprocal_degree(intro) == 3
    assert reciprocal_degree(boundary) == 2
    assert ml_degree(intro) == 3
    assert ml_degree(boundary) == 1


def test_characteristic_polynomials(intro, boundary):
    assert characteristic_polynomial(intro) == [1, -4, 6]
    assert characteristic_polynomial(boundary) == [1, -4, 4]
    assert bounded_chamber_count(intro) == 3
    assert chamber_count(intro) == 11


def test_semilattice_bottom(intro):
    lattice = intersection_semilattice(intro)
    bottom = lattice[0]
    assert bottom.flat.support == () and bottom.mobius == 1 and bottom.dimension == 2
    assert sum(1 for e in lattice if e.dimension == 0) == 6


def test_connectivity(intro, boundary, disconnected):
    assert beta_invariant(intro) != 0
    assert is_connected(intro)
    assert not is_connected(boundary)
    assert beta_invariant(disconnected) == 0
    assert not is_connected(disconnected)
    assert len(circuit_components(disconnected)) == 3


def test_degree_criterion(intro, boundary):
    assert degree_criterion(intro).verdict == "equal"
    result = degree_criterion(boundary)
    assert result.verdict == "strict"
    assert [w.support for w in result.witnesses] == [(0, 1)]


def test_full_rank_input_is_essential(intro, boundary, disconnected):
    # independent rows of L force rank(A) = d
    assert is_essential(intro)
    assert is_essential(boundary)
    assert is_essential(disconnected)


def test_omega_validation():
    assert validate_omega([3, 1, 2], 3) == (3, 1, 2)
    with pytest.raises(MalformedInput):
        validate_omega([1, 1, 2], 3)
    with pytest.raises(MalformedInput):
        validate_omega([1, 2], 3)
    omega = random_omega(5, np.random.default_rng(0))
    assert sorted(omega) == [1, 2, 3, 4, 5]


def test_ground_set_limit():
    rows = [[1] + [0] * 25, [0] + [1] * 25]
    arrangement = ArrangementMatrix.from_rows(rows)
    with pytest.raises(GroundSetTooLarge):
        circuits(arrangement)


@pytest.mark.parametrize("seed", range(200))
def test_circuits_and_flats_against_brute_force(seed):
    arrangement = _random_small(seed)
    matrix = np.array([[float(v) for v in row] for row in arrangement.L])
    size = arrangement.n + 1

    expected_circuits = set()
    for k in range(1, size + 1):
        for subset in combinations(range(size), k):
            if _rank(matrix, subset) == k - 1 and all(
                    _rank(matrix, [i for i in subset if i != j]) == k - 1 for j in subset):
                expected_circuits.add(subset)
    found = circuits(arrangement)
    assert {c.support for c in found} == expected_circuits
    for circuit in found:
        relation = sum(float(a) * matrix[:, i] for a, i in zip(circuit.alpha, circuit.support))
        assert np.allclose(relation, 0)
        assert circuit.alpha[0] == Rational(1)

    expected_flats = set()
    for k in range(size + 1):
        for subset in combinations(range(size), k):
            r = _rank(matrix, subset)
            if all(_rank(matrix, subset + (e,)) > r for e in range(size) if e not in subset):
                expected_flats.add(subset)
    assert {f.support for f in flats(arrangement)} == expected_flats


@pytest.mark.parametrize("seed", range(20))
def test_nbc_count_is_independent_of_omega(seed):
    arrangement = _random_small(1000 + seed)
    rng = np.random.default_rng(seed)
    matroid = LinearMatroid(arrangement)
    counts = {len(nbc_bases(arrangement, random_omega(arrangement.n + 1, rng), matroid)) for _ in range(4)}
    assert len(counts) == 1


@pytest.mark.parametrize("seed", range(20))
def test_criterion_matches_degree_comparison(seed):
    arrangement = _random_small(2000 + seed)
    try:
        ml = ml_degree(arrangement)
    except NotEssential:
        return
    equal = ml == reciprocal_degree(arrangement)
    assert (degree_criterion(arrangement).verdict == "equal") == equal


def test_generic_reciprocal_degree_is_binomial():
    # Vandermonde columns: every 4 are independent, so the circuits are the 5-subsets
    arrangement = ArrangementMatrix.from_rows([[i ** k for i in range(1, 8)] for k in range(4)])
    assert len(circuits(arrangement)) == 21
    assert reciprocal_degree(arrangement) == 20


@pytest.mark.parametrize("seed", range(30))
def test_ml_degree_never_exceeds_reciprocal_degree(seed):
    arrangement = _random_small(3000 + seed)
    try:
        ml = ml_degree(arrangement)
    except NotEssential:
        return
    assert 0 <= ml <= reciprocal_degree(arrangement)
