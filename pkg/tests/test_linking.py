import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from torsionlab.action import cubic_profile, hamiltonian_isotopy
from torsionlab.chains import TriangleTrack
from torsionlab.errors import Collision, ConfigError, GapTooLarge
from torsionlab.linking import (
    SampledCurve, linking_curves, linking_n, linking_n_many, perturbation_bound_check,
)
from torsionlab.maps import DoubleShear, IdentityIsotopy, RotationIsotopy


def circle(t, radius=1.0, speed=1.0, phase=0.0):
    a = 2 * np.pi * (speed * np.asarray(t) + phase)
    return np.column_stack([radius * np.cos(a), radius * np.sin(a)])


@pytest.mark.parametrize("omega", [0.3, -0.7])
def test_rotation_linking(omega):
    iso = RotationIsotopy(omega)
    for n in (1, 9, 50):
        assert linking_n(iso, (0.2, 0.1), (-0.5, 0.4), n) == pytest.approx(omega, abs=1e-12)


def test_identity_linking():
    assert linking_n(IdentityIsotopy(), (0.2, 0.1), (-0.5, 0.4), 10) == 0.0


@pytest.mark.parametrize("r", [0.1, 0.5, 0.9])
def test_radial_linking_with_origin(r):
    iso = hamiltonian_isotopy(cubic_profile())
    expected = -3.0 * (1 - r * r) ** 2 / math.pi
    assert linking_n(iso, (0, 0), (r, 0), 1) == pytest.approx(expected, abs=1e-6)
    fine = linking_n(iso, (0, 0), (r, 0), 1, samples_per_unit=64)
    assert fine == pytest.approx(expected, abs=1e-6)


def test_circle_winding_sampled_and_callable():
    times = np.linspace(0, 10, 401)
    beta = SampledCurve.from_function(circle, times)
    alpha = SampledCurve.constant((0, 0), times)
    est = linking_curves(alpha, beta)
    assert est.value == pytest.approx(1.0, abs=1e-12)
    assert est.min_separation == pytest.approx(1.0)
    est = linking_curves(lambda t: np.zeros((len(t), 2)), circle, T=10.0)
    assert est.value == pytest.approx(1.0, abs=1e-12)


def test_triangle_winding():
    track = TriangleTrack((0.0, 0.0), ((1, 0), (0, 1), (-1, -1)), (1, 1, 1), (1, 1, 1), 1)
    times = np.linspace(0, track.period, 301)
    est = linking_curves(SampledCurve.constant((0.7, 0.3), times),
                         SampledCurve.from_function(track, times))
    assert abs(est.value) == pytest.approx(1 / track.period, abs=1e-12)


def test_sampled_orbits_match_orbit_linking():
    iso = DoubleShear(0.4, 0.3)
    x, y = np.array([0.1, 0.2]), np.array([0.3, 0.25])
    n = 12
    times = np.linspace(0, n, n * 256 + 1)
    ax = iso.eval_many(times, np.tile(x, (len(times), 1)), with_jacobian=False)[0]
    ay = iso.eval_many(times, np.tile(y, (len(times), 1)), with_jacobian=False)[0]
    est = linking_curves(SampledCurve(times, ax), SampledCurve(times, ay))
    assert est.value == pytest.approx(linking_n(iso, x, y, n), abs=1e-8)


def test_gap_and_collision_errors():
    times = np.linspace(0, 1, 3)
    with pytest.raises(GapTooLarge):
        linking_curves(SampledCurve.constant((0, 0), times), SampledCurve.from_function(circle, times))
    with pytest.raises(Collision):
        linking_curves(SampledCurve.constant((1, 0), np.linspace(0, 1, 101)),
                       SampledCurve.from_function(circle, np.linspace(0, 1, 101)))
    with pytest.raises(Collision):
        linking_n(IdentityIsotopy(), (0, 0), (0, 0), 1)


def test_symmetry_and_translation_invariance():
    iso = DoubleShear(1.0, 1.0)
    rng = np.random.default_rng(4)
    for _ in range(5):
        x, y = rng.random(2), rng.random(2)
        a = linking_n(iso, x, y, 10)
        assert linking_n(iso, y, x, 10) == pytest.approx(a, abs=1e-7)
        v = rng.integers(-3, 4, 2)
        assert linking_n(iso, x + v, y + v, 10) == pytest.approx(a, abs=1e-7)


def test_many_matches_single():
    iso = DoubleShear(0.6, 0.6)
    rng = np.random.default_rng(2)
    xs, ys = rng.random((8, 2)), rng.random((8, 2))
    many = linking_n_many(iso, xs, ys, 6)
    assert np.allclose(many, [linking_n(iso, x, y, 6) for x, y in zip(xs, ys)], atol=1e-7)


def test_curve_csv_roundtrip(tmp_path):
    times = np.linspace(0, 2, 9)
    c = SampledCurve.from_function(circle, times)
    path = tmp_path / "c.csv"
    c.to_csv(path, ["note"])
    back = SampledCurve.from_csv(path)
    assert np.array_equal(back.times, c.times)
    assert np.array_equal(back.points, c.points)
    bad = tmp_path / "bad.csv"
    bad.write_text("t,x,y\n0,0,0\n0,1,1\n")
    with pytest.raises(ConfigError):
        SampledCurve.from_csv(bad)
    bad.write_text("time,x,y\n0,0,0\n")
    with pytest.raises(ConfigError):
        SampledCurve.from_csv(bad)


def test_curve_validation():
    with pytest.raises(ValueError):
        SampledCurve(np.array([0.0, 0.0]), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        SampledCurve(np.array([0.0, 1.0]), np.zeros((3, 2)))


def rotation_pair(T, omega=0.3, samples=64):
    times = np.linspace(0, T, int(T * samples) + 1)
    alpha = SampledCurve.constant((0, 0), times)
    beta = SampledCurve.from_function(lambda t: circle(t, 1.0, omega), times)
    return times, alpha, beta


def test_perturbation_identical_curves():
    _, alpha, beta = rotation_pair(10)
    rep = perturbation_bound_check(alpha, beta, alpha, beta)
    assert rep.premise_ok
    assert rep.max_normalized_difference == 0.0
    assert rep.bound_holds


@pytest.mark.parametrize("T", [10, 100])
def test_perturbation_radial_quarter(T):
    times, alpha, beta = rotation_pair(T)
    d = 1.0
    wobble = 1.0 + (d / 4) * np.sin(2 * np.pi * 0.37 * times)
    beta2 = SampledCurve(times, beta.points * wobble[:, None])
    alpha2 = SampledCurve(times, (d / 4) * circle(times, 1.0, -1.3))
    rep = perturbation_bound_check(alpha, beta, alpha2, beta2)
    assert rep.premise_ok
    assert rep.max_angle_difference < 0.25
    assert rep.difference_at_T <= 1 / (2 * T)
    assert rep.bound_holds


def test_perturbation_premise_violated():
    times, alpha, beta = rotation_pair(10)
    beta2 = SampledCurve(times, beta.points * 2.0)
    rep = perturbation_bound_check(alpha, beta, alpha, beta2)
    assert not rep.premise_ok
    assert rep.bound_holds is None


@given(st.floats(0.05, 0.49), st.floats(-2, 2), st.floats(0, 1))
def test_perturbation_property(scale, speed, phase):
    times, alpha, beta = rotation_pair(20, samples=32)
    alpha2 = SampledCurve(times, scale * circle(times, 1.0, speed, phase))
    beta2 = SampledCurve(times, beta.points + scale * circle(times, 1.0, -speed, phase))
    rep = perturbation_bound_check(alpha, beta, alpha2, beta2)
    assert rep.premise_ok
    assert rep.max_normalized_difference <= 0.5
    assert rep.difference_at_T <= 1 / (2 * 20)
