"""
Tests for circuit polynomials and the deformed system.
"""

import numpy as np
import pytest
from sympy import Rational

from src.core.arrangement import phi
from src.core.ideal import (
    PolynomialBlock,
    circuit_polynomials,
    deform,
    evaluate,
    evaluate_exact,
    initial_ideal,
    leading_term,
)
from src.core.matroid import random_omega


def test_intro_polynomial_terms(intro):
    (poly,) = circuit_polynomials(intro)
    assert poly.degree == 3
    assert [t.monomial for t in poly.terms] == [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)]
    assert [t.coefficient for t in poly.terms] == [1, -1, -1, 1]
    assert "y1*y2*y3" in str(poly)


def test_polynomials_vanish_on_reciprocal_points(intro, boundary, rng):
    for arrangement in (intro, boundary):
        for _ in range(5):
            y = phi(arrangement, rng.normal(size=arrangement.d) + 1j * rng.normal(size=arrangement.d))
            for poly in circuit_polynomials(arrangement):
                assert abs(evaluate(poly, y)) < 1e-9 * max(1.0, np.abs(y).max() ** poly.degree)


def test_exact_evaluation_at_rational_point(boundary):
    # ell(2, 3) = (3, 2, 3, 5)
    y = [Rational(1, 3), Rational(1, 2), Rational(1, 3), Rational(1, 5)]
    (poly,) = circuit_polynomials(boundary)
    assert evaluate_exact(poly, y) == 0
    assert evaluate_exact(poly, [1, 1, 1, 1]) == 1


def test_deform_exponents(intro, boundary):
    (poly,) = circuit_polynomials(intro)
    deformed = deform(poly, (1, 2, 3, 4))
    assert deformed.t_exponents == (0, 1, 2, 3)
    assert leading_term(poly, (1, 2, 3, 4)).monomial == (1, 2, 3)

    (poly,) = circuit_polynomials(boundary)
    assert deform(poly, (4, 3, 1, 2)).t_exponents == (2, 0, 1)
    assert leading_term(poly, (4, 3, 1, 2)).monomial == (1, 3)


def test_deformation_at_zero_is_the_leading_monomial(intro, rng):
    (poly,) = circuit_polynomials(intro)
    deformed = deform(poly, (1, 2, 3, 4))
    y = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert evaluate(deformed, y, t=0.0) == pytest.approx(y[1] * y[2] * y[3])
    assert evaluate(deformed, y, t=1.0) == pytest.approx(evaluate(poly, y))


def test_initial_ideal(intro, boundary):
    ideal = initial_ideal(intro, (1, 2, 3, 4))
    assert ideal.generators == ((1, 2, 3),)
    assert ideal.minimal_primes == ((3,), (2,), (1,))

    ideal = initial_ideal(boundary, (1, 2, 3, 4))
    assert ideal.generators == ((2, 3),)
    assert ideal.bases == ((0, 1, 2), (0, 1, 3))
    assert ideal.minimal_primes == ((3,), (2,))
    assert ideal.to_dict()['omega'] == [1, 2, 3, 4]


def test_block_matches_term_by_term_evaluation(disconnected, rng):
    omega = (7, 3, 5, 1, 6, 2, 4)
    polys = [deform(p, omega) for p in circuit_polynomials(disconnected)]
    block = PolynomialBlock(polys, nvars=7)
    y = rng.normal(size=7) + 1j * rng.normal(size=7)
    t = 0.3 + 0.2j

    values, jacobian, d_t = block.evaluate(y, t)
    assert np.allclose(values, [evaluate(p, y, t) for p in polys])

    # multilinear: the partial in y_j is f(y_j = 1) - f(y_j = 0)
    for j in range(7):
        hi, lo = y.copy(), y.copy()
        hi[j], lo[j] = 1.0, 0.0
        expected = [evaluate(p, hi, t) - evaluate(p, lo, t) for p in polys]
        assert np.allclose(jacobian[:, j], expected)

    h = 1e-6
    expected_t = [(evaluate(p, y, t + h) - evaluate(p, y, t - h)) / (2 * h) for p in polys]
    assert np.allclose(d_t, expected_t, atol=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_only_the_leading_term_survives_at_zero(disconnected, seed):
    rng = np.random.default_rng(300 + seed)
    omega = random_omega(7, rng)
    y = rng.normal(size=7) + 1j * rng.normal(size=7)
    for poly in circuit_polynomials(disconnected):
        deformed = deform(poly, omega)
        lead = leading_term(poly, omega)
        assert lead.omitted == min(poly.circuit.support, key=lambda i: omega[i])
        zero = [term for term, e in zip(deformed.terms, deformed.t_exponents) if e == 0]
        assert zero == [lead]
        assert all(e > 0 for term, e in zip(deformed.terms, deformed.t_exponents) if term != lead)
        expected = complex(lead.coefficient) * np.prod(y[list(lead.monomial)])
        assert evaluate(deformed, y, t=0.0) == pytest.approx(expected)


def test_block_scales(intro):
    block = PolynomialBlock(circuit_polynomials(intro), nvars=4)
    assert np.allclose(block.scales(np.ones(4)), [4.0])
    assert np.allclose(block.scales(np.array([2.0, 1e-20, 1e-20, 1.0])), [4.0 * 8.0])


def test_empty_block():
    block = PolynomialBlock([], nvars=3)
    values, jacobian, d_t = block.evaluate(np.ones(3), 0.5)
    assert values.shape == (0,)
    assert jacobian.shape == (0, 3)
    assert block.scales(np.ones(3)).shape == (0,)
