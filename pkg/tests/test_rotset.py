from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from torsionlab.errors import InversionFailure, NotFound
from torsionlab.maps import DoubleShear, FunctionMap, TORUS, TranslationIsotopy
from torsionlab.rotset import (
    DISCLAIMER, choose_rational_triple, convex_hull, estimate_rotation_set, hausdorff_distance,
    invert, is_convex_ccw, iterate_identity_check, max_displacement, newton_periodic, polygon_area,
    polygon_distance, rational_candidates, realize_rational_vector, rho_n,
    semiconjugacy_bound_check, signed_margin,
)

SQUARE = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)


def test_rho_translation():
    f = TranslationIsotopy((0.3, -0.2))
    assert np.allclose(rho_n(f, (0.1, 0.4), 10), (0.3, -0.2), atol=1e-14)
    with pytest.raises(ValueError):
        rho_n(f, (0, 0), 0)


def test_rho_fixed_point_of_double_shear():
    assert np.array_equal(rho_n(DoubleShear(1.0, 1.0), (0.0, 0.0), 50), (0.0, 0.0))
    assert np.allclose(rho_n(DoubleShear(1.0, 1.0), (0.0, 0.25), 50), (1.0, 0.0), atol=1e-12)


def test_double_shear_rotation_set_square():
    r = estimate_rotation_set(DoubleShear(1.0, 1.0), 64, 500)
    # corner orbits such as (0.25, 0.25) -> (1.25, 0.25) -> (1.25, 1.25) sit on the grid
    assert r.area == pytest.approx(4.0, abs=1e-9)
    assert hausdorff_distance(r.vertices, 2 * SQUARE - 1) < 1e-9
    assert r.nested_ok
    assert r.disclaimer == DISCLAIMER
    assert is_convex_ccw(r.vertices)


def test_translation_rotation_set_is_point():
    r = estimate_rotation_set(TranslationIsotopy((0.3, 0.1)), 8, 20)
    assert r.vertices.shape == (1, 2)
    assert np.allclose(r.vertices[0], (0.3, 0.1))
    assert r.area == 0.0
    assert not r.is_interior((0.3, 0.1))
    with pytest.raises(ValueError):
        estimate_rotation_set(TranslationIsotopy((0.3, 0.1)), 1, 20)


def test_signed_margin_and_distance():
    assert signed_margin((0.5, 0.5), SQUARE) == pytest.approx(0.5)
    assert signed_margin((2.0, 0.5), SQUARE) == pytest.approx(-1.0)
    assert polygon_distance((0.5, 0.5), SQUARE) == 0.0
    assert polygon_distance((2.0, 2.0), SQUARE) == pytest.approx(math.sqrt(2))
    assert signed_margin((0.5, 0.0), SQUARE[:2]) == 0.0
    assert polygon_area(SQUARE) == 1.0
    assert polygon_area(SQUARE[::-1]) == -1.0


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=3, max_size=40))
def test_hull_contains_inputs(pts):
    v = convex_hull(pts)
    assert is_convex_ccw(v)
    for p in pts:
        assert polygon_distance(p, v) < 1e-9


@given(st.floats(-1, 1), st.floats(-1, 1))
def test_hausdorff_translation(dx, dy):
    assert hausdorff_distance(SQUARE, SQUARE + (dx, dy)) <= math.hypot(dx, dy) + 1e-12
    assert hausdorff_distance(SQUARE, SQUARE) == 0.0


def test_realize_examples():
    f = DoubleShear(1.0, 1.0)
    rec = realize_rational_vector(f, 0, 0, 1)
    assert rec.z == (0.0, 0.0)
    rec = realize_rational_vector(f, 1, 0, 1)
    assert rec.residual < 1e-10
    assert np.allclose(f.iterate(np.array(rec.z), 1) - rec.z, (1, 0), atol=1e-10)
    assert rec.rotation_vector == (Fraction(1), Fraction(0))
    assert 0 <= rec.z[0] < 1 and 0 <= rec.z[1] < 1


def test_realize_triple_for_double_shear():
    f = DoubleShear(1.0, 1.0)
    r = estimate_rotation_set(f, 64, 500, nested=False)
    triple = choose_rational_triple(r)
    assert len(triple) == 3
    for p, p2, q in triple:
        assert r.is_interior((p / q, p2 / q), 1e-3)
        rec = realize_rational_vector(f, p, p2, q)
        assert np.allclose(f.iterate(np.array(rec.z), q) - rec.z, (p, p2), atol=1e-9)


def test_realize_not_found():
    with pytest.raises(NotFound):
        realize_rational_vector(DoubleShear(0.1, 0.1), 1, 0, 1, n_seeds=5)
    with pytest.raises(ValueError):
        realize_rational_vector(DoubleShear(0.1, 0.1), 0, 0, 0)


def test_newton_converges_near_fixed_point():
    z, res = newton_periodic(DoubleShear(1.0, 1.0), (0.02, -0.01), np.zeros(2), 1)
    assert res < 1e-10
    assert np.allclose(z, 0, atol=1e-9)


def test_rational_candidates_sorted():
    r = estimate_rotation_set(DoubleShear(1.0, 1.0), 32, 100, nested=False)
    c = rational_candidates(r, max_denominator=3)
    assert c[0] == (0, 0, 1)
    assert [q for _, _, q in c] == sorted(q for _, _, q in c)
    assert len({(Fraction(p, q), Fraction(p2, q)) for p, p2, q in c}) == len(c)


def _bump(amp):
    def h(z):
        z = np.asarray(z, dtype=float)
        return np.column_stack([z[:, 0] + amp * np.sin(2 * np.pi * z[:, 1]), z[:, 1]])

    def hj(z):
        z = np.asarray(z, dtype=float)
        J = np.tile(np.eye(2), (len(z), 1, 1))
        J[:, 0, 1] = 2 * np.pi * amp * np.cos(2 * np.pi * z[:, 1])
        return J

    return h, hj


def test_semiconjugacy_bound():
    f = DoubleShear(1.0, 1.0)
    h, hj = _bump(0.05)
    assert max_displacement(h) == pytest.approx(0.05, abs=1e-9)
    samples = np.random.default_rng(0).random((50, 2))
    for n in (10, 100):
        rep = semiconjugacy_bound_check(f, h, hj, samples, n)
        assert rep.holds
        assert rep.bound == pytest.approx(0.1 / n, rel=1e-6)
        assert rep.max_orbit_defect < 1e-9


def test_invert_failure():
    h = lambda z: np.zeros_like(np.asarray(z, dtype=float))
    hj = lambda z: np.tile(np.eye(2), (len(np.asarray(z)), 1, 1))
    with pytest.raises(InversionFailure):
        invert(h, hj, [[0.5, 0.5]], max_iter=3)


@pytest.mark.parametrize("q,p,p2", [(1, 0, 0), (2, 1, -1), (3, 0, 2)])
def test_iterate_identity(q, p, p2):
    samples = np.random.default_rng(q).random((40, 2))
    assert iterate_identity_check(DoubleShear(1.0, 1.0), q, p, p2, samples, 20) < 1e-9


def test_rotation_set_outputs(tmp_path):
    r = estimate_rotation_set(DoubleShear(0.5, 0.5), 16, 50)
    r.to_csv(tmp_path / "r.csv", "x=1")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "# torsionlab 0.1.0"
    assert any(DISCLAIMER in l for l in lines)
    assert "vx,vy" in lines
    r.to_svg(tmp_path / "r.svg", extra_points=[(0, 0)])
    assert "<svg" in (tmp_path / "r.svg").read_text()


def test_function_map_rho():
    f = FunctionMap(lambda z: z + np.array([1.0, 0.0]),
                    lambda z: np.tile(np.eye(2), (len(z), 1, 1)), surface=TORUS)
    assert np.allclose(rho_n(f, (0.2, 0.2), 7), (1, 0))
