"""
Tests for Hilbert functions, normal forms and the eliminant.
"""

import numpy as np
import pytest
from sympy import QQ, Rational

from src.core.arrangement import linear_forms_at
from src.core.errors import MalformedInput, MatrixTooLarge
from src.core.hilbert import (
    ambient_monomials,
    circuit_hilbert_function,
    eliminant,
    eliminant_roots,
    face_numbers,
    hilbert_function_RL,
    hilbert_regularity_RL,
    hilbert_series_numerator,
    normal_form,
    parse_form,
    quotient_hilbert_function,
    random_rational_vector,
    standard_monomials,
)
from src.core.homotopy import track_all


def test_face_numbers(intro, boundary):
    assert face_numbers(intro) == [1, 4, 6, 3]
    assert face_numbers(boundary) == [1, 4, 5, 2]


def test_hilbert_function_of_the_cubic_surface(intro):
    assert [hilbert_function_RL(intro, None, q) for q in range(4)] == [1, 4, 10, 19]


def test_hilbert_function_of_the_quadric(boundary):
    assert hilbert_function_RL(boundary, None, 2) == 9
    assert hilbert_function_RL(boundary, None, 3) == 16


def test_hilbert_function_does_not_depend_on_omega(intro, rng):
    for _ in range(3):
        omega = tuple(int(w) for w in rng.permutation(4) + 1)
        assert hilbert_function_RL(intro, omega, 5) == hilbert_function_RL(intro, None, 5)


def test_h_vectors_and_regularity(intro, boundary, disconnected):
    assert hilbert_series_numerator(intro) == [1, 1, 1]
    assert hilbert_regularity_RL(intro) == 0
    assert hilbert_series_numerator(boundary) == [1, 1]
    assert hilbert_regularity_RL(boundary) == -1
    assert hilbert_regularity_RL(disconnected) < 0


def test_leading_coefficient_matches_degree(intro):
    # HF(q) ~ deg * q^d / d!
    estimate = hilbert_function_RL(intro, None, 12) * 2 / 144
    assert estimate == pytest.approx(3, rel=0.2)


@pytest.mark.parametrize("q", range(5))
def test_standard_monomials_count_the_hilbert_function(intro, boundary, q):
    for arrangement in (intro, boundary):
        assert len(standard_monomials(arrangement, None, q)) == hilbert_function_RL(arrangement, None, q)


@pytest.mark.parametrize("q", range(4))
def test_circuits_generate_the_whole_ideal(intro, boundary, q):
    assert circuit_hilbert_function(intro, q) == hilbert_function_RL(intro, None, q)
    assert circuit_hilbert_function(boundary, q) == hilbert_function_RL(boundary, None, q)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_linear_section_has_degree_many_points(intro, boundary, rng, q):
    assert quotient_hilbert_function(intro, q, rng=rng) == 3
    assert quotient_hilbert_function(boundary, q, rng=rng) == 2


def test_quotient_by_a_nonvanishing_form_is_empty(intro):
    u = [Rational(3, 7), Rational(-5, 2), Rational(11, 3), Rational(2, 9)]
    assert quotient_hilbert_function(intro, 1, u) == 2
    assert quotient_hilbert_function(intro, 3, u, h="y2 - 2*y1") == 0


def test_degree_limits():
    with pytest.raises(MatrixTooLarge):
        ambient_monomials(30, 8)


def test_quotient_degree_limit(intro):
    with pytest.raises(MatrixTooLarge):
        quotient_hilbert_function(intro, 9, [1, 2, 3, 4])


def test_normal_form_reduces_broken_circuit(intro):
    reduced = normal_form(intro, "y1*y2*y3", omega=(1, 2, 3, 4))
    assert reduced == {(0, 2, 3): QQ(1), (0, 1, 3): QQ(1), (0, 1, 2): QQ(-1)}
    assert normal_form(intro, "y0*y1*y2", omega=(1, 2, 3, 4)) == {(0, 1, 2): QQ(1)}


@pytest.mark.parametrize("form", ["y0 + y1**2", "y9", "0", "y0 +", "y0 - y0"])
def test_parse_form_errors(form):
    with pytest.raises(MalformedInput):
        parse_form(form, 4)


def test_parse_form_accepts_mappings():
    assert parse_form({(1, 0): 2, (2, 2): "1/3"}, 3) == {(0, 1): QQ(2), (2, 2): QQ(1, 3)}


def test_eliminant_of_a_form_with_itself(intro, rng):
    u = random_rational_vector(4, rng)
    result = eliminant(intro, u, "y0", "y0", rng=rng)
    assert result.degree == 3
    assert result.coefficients == [1, -3, 3, -1]


def test_eliminant_rejects_nonlinear_forms(intro, rng):
    with pytest.raises(MalformedInput):
        eliminant(intro, [1, 2, 3, 4], "y0*y1", "y2*y3", rng=rng)


@pytest.mark.parametrize("seed", range(5))
def test_eliminant_roots_match_tracked_solutions(intro, tracker, seed):
    rng = np.random.default_rng(seed)
    u = random_rational_vector(4, rng)
    roots = list(eliminant_roots(eliminant(intro, u, "y1", "y2", rng=rng)))

    u_numeric = np.array([float(v) for v in u])
    report = track_all(intro, u_numeric, config=tracker, rng=rng)
    ratios = [forms[1] / forms[2] for forms in (linear_forms_at(intro, p.x) for p in report.interior)]

    assert len(roots) == len(ratios) == 3
    for ratio in ratios:
        distances = [abs(root - ratio) for root in roots]
        k = int(np.argmin(distances))
        assert distances[k] < 1e-6 * max(1.0, abs(ratio))
        roots.pop(k)


def test_eliminant_sees_the_boundary_point(boundary, rng):
    u = [Rational(2), Rational(3), Rational(5), Rational(7)]
    result = eliminant(boundary, u, "y0", "y1", rng=rng)
    assert result.degree == 2
    # on the flat {0, 1}: u0 y0 + u1 y1 = 0
    assert result.poly.eval(Rational(-2, 3)) == 0
    # interior point x = (-15/17, 25/68): y1 / y0 = ell_0 / ell_1
    assert result.poly.eval(Rational(-2, 15)) == 0
