"""
Tests for arrangement parsing, evaluation and the reciprocal map.
"""

import json

import numpy as np
import pytest
from sympy import Rational

from src.core.arrangement import (
    ArrangementMatrix,
    gradient,
    hessian,
    hessian_nondegenerate,
    identity_arrangement,
    linear_forms_at,
    load_instance,
    log_likelihood,
    parse_complex_vector,
    parse_instance,
    phi,
    phi_inverse,
    polish,
    probability_scaling,
    random_integer_arrangement,
    scattering_residual,
)
from src.core.errors import (
    InconsistentPoint,
    MalformedInput,
    OnArrangement,
    RankDeficient,
)


def test_intro_matrix_is_accepted(intro):
    assert (intro.d, intro.n) == (2, 3)
    assert intro.A == ((1, 0), (0, 1), (-1, -2), (-2, -1))
    assert intro.b == (0, 0, -2, -2)


def test_identity_instance():
    arrangement = identity_arrangement(2)
    assert (arrangement.d, arrangement.n) == (2, 2)
    assert arrangement.A == ((0, 0), (1, 0), (0, 1))


def test_duplicated_row_is_rank_deficient():
    rows = [[0, 0, 2, 2], [1, 0, -1, -2], [0, 1, -2, -1], [1, 0, -1, -2]]
    with pytest.raises(RankDeficient) as info:
        ArrangementMatrix.from_rows(rows, d=3, n=3)
    assert info.value.details == {'rank': 3, 'expected': 4}


@pytest.mark.parametrize("rows", [
    [[1, 0], [0, 1], [1]],
    [[1, "abc"], [0, 1]],
    [[0, 1], [0, 0]],
    [],
])
def test_malformed_matrices(rows):
    with pytest.raises(MalformedInput):
        ArrangementMatrix.from_rows(rows)


def test_rational_strings_are_exact():
    arrangement = ArrangementMatrix.from_rows([["1/2", 0], [0, "-3/4"]])
    assert arrangement.L[0][0] == Rational(1, 2)
    assert arrangement.L[1][1] == Rational(-3, 4)


def test_linear_forms(intro, boundary):
    assert np.allclose(linear_forms_at(intro, [1, 1]), [1, 1, -1, -1])
    assert np.allclose(linear_forms_at(boundary, [2, 3]), [3, 2, 3, 5])


def test_linear_forms_shape_check(intro):
    with pytest.raises(MalformedInput):
        linear_forms_at(intro, [1, 1, 1])


def test_scattering_residual_by_hand(intro):
    assert scattering_residual(intro, [1, 1, 1, 1], [1, 1]) == pytest.approx(4.0)
    assert np.allclose(gradient(intro, [1, 1, 1, 1], [1, 1]), [4, 4])


def test_point_on_arrangement_is_rejected(intro):
    with pytest.raises(OnArrangement) as info:
        scattering_residual(intro, [1, 1, 1, 1], [0, 1])
    assert info.value.details['hyperplane'] == 0


def test_one_dimensional_hessian():
    arrangement = ArrangementMatrix.from_rows([[0, 1], [1, -1]])
    H = hessian(arrangement, [1, 1], [0.5])
    assert np.allclose(H, [[-8.0]])
    ok, condition = hessian_nondegenerate(arrangement, [1, 1], [0.5])
    assert ok
    assert condition == pytest.approx(1.0)


def test_log_likelihood_is_sum_of_logs(intro):
    value = log_likelihood(intro, [1, 2, 3, 4], [0.25, 0.5])
    forms = linear_forms_at(intro, [0.25, 0.5]).astype(complex)
    assert value == pytest.approx(np.sum(np.array([1, 2, 3, 4]) * np.log(forms)))


def test_phi_round_trip(intro):
    y = phi(intro, [1, 1])
    assert np.allclose(y, [1, 1, -1, -1])
    point = phi_inverse(intro, y)
    assert np.allclose(point.x, [1, 1])
    assert point.membership_residual < 1e-12


def test_phi_inverse_is_scale_free(intro):
    y = phi(intro, [0.3, -1.7]) * (2.0 - 5.0j)
    assert np.allclose(phi_inverse(intro, y).x, [0.3, -1.7])


def test_all_ones_is_in_the_image(intro):
    # (1:1:1:1) = phi(1/2, 1/2) lies on the cubic
    assert np.allclose(phi_inverse(intro, [1, 1, 1, 1]).x, [0.5, 0.5])


def test_point_off_the_cubic_is_inconsistent(intro):
    with pytest.raises(InconsistentPoint):
        phi_inverse(intro, [1, 2, 3, 4])


def test_vanishing_coordinate_is_inconsistent(intro):
    with pytest.raises(InconsistentPoint):
        phi_inverse(intro, [1, 0, 1, 1])


def test_polish_and_column_scaling():
    arrangement = ArrangementMatrix.from_rows([[0, 1], [1, -1]])
    x = polish(arrangement, [1, 1], [0.4], iterations=20)
    assert np.allclose(x, [0.5])
    scaled = arrangement.scaled_column(1, 7)
    assert scattering_residual(scaled, [1, 1], x) < 1e-12


def test_column_scaling_leaves_the_residual_unchanged(intro, rng):
    scaled = intro.scaled_column(2, 7)
    u = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    for _ in range(5):
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        assert np.allclose(gradient(scaled, u, x), gradient(intro, u, x))
        assert scattering_residual(scaled, u, x) == pytest.approx(scattering_residual(intro, u, x))


@pytest.mark.parametrize("x", [[0.25, 0.5], [0.25 + 0.05j, 0.5 - 0.02j], [-0.3 + 0.1j, 0.4]])
def test_gradient_matches_central_differences(intro, x):
    u = np.array([1.0, 2.0 - 1.0j, 0.5j, 3.0])
    x = np.asarray(x, dtype=complex)
    h = 1e-6
    numeric = []
    for j in range(2):
        step = np.zeros(2)
        step[j] = h
        numeric.append((log_likelihood(intro, u, x + step) - log_likelihood(intro, u, x - step)) / (2 * h))
    assert np.allclose(gradient(intro, u, x), numeric, atol=1e-6)


def test_phi_inverse_undoes_phi_on_random_points(intro, rng):
    for _ in range(100):
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        point = phi_inverse(intro, phi(intro, x))
        assert np.allclose(point.x, x, rtol=1e-8, atol=1e-8)


def test_probability_scaling(intro):
    scales = probability_scaling(intro)
    assert scales is not None
    assert all(c != 0 for c in scales)
    total = [sum(c * row[i] for i, c in enumerate(scales)) for row in intro.L]
    assert total == [1, 0, 0]


def test_parse_instance_with_exponents():
    text = json.dumps({"d": 2, "n": 3, "L": [[0, 0, 2, 2], [1, 0, -1, -2], [0, 1, -2, -1]],
                       "u": [[1, 0], [2, 0.5], "1/2", 3]})
    arrangement, u = parse_instance(text)
    assert arrangement.n == 3
    assert np.allclose(u, [1, 2 + 0.5j, 0.5, 3])


@pytest.mark.parametrize("text", [
    "not json",
    "[1, 2]",
    json.dumps({"d": 2, "L": [[1]]}),
    json.dumps({"d": "2", "n": 3, "L": [[1]]}),
])
def test_malformed_documents(text):
    with pytest.raises(MalformedInput):
        parse_instance(text)


def test_complex_vector_rejects_garbage():
    with pytest.raises(MalformedInput):
        parse_complex_vector([[1, "x"]], 1)
    with pytest.raises(MalformedInput):
        parse_complex_vector([1, 2], 3)


def test_load_instance_files(instance_dir):
    arrangement, u = load_instance(instance_dir / "example_intro_positive.json")
    assert arrangement.d == 2
    assert np.allclose(u, [1, 1, 1, 1])
    with pytest.raises(FileNotFoundError):
        load_instance(instance_dir / "missing.json")


def test_random_integer_arrangement_is_valid(rng):
    arrangement = random_integer_arrangement(3, 6, rng)
    assert (arrangement.d, arrangement.n) == (3, 6)
    assert all(-20 <= v <= 20 for row in arrangement.L for v in row)
