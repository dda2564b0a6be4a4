import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from torsionlab.action import (
    HamiltonianProfile, average_linking, bump_profile, cubic_profile,
    find_nonzero_action_fixed_point, hamiltonian_isotopy, profile_by_name,
    radial_average_linking, ring_profile, symplectic_action, zero_profile,
)
from torsionlab.errors import NoCandidateAboveTol, NotFixed, PreconditionError
from torsionlab.maps import RotationIsotopy


def fd(f, s, h=1e-6):
    return (f(np.array([s + h])) - f(np.array([s - h])))[0] / (2 * h)


@pytest.mark.parametrize("profile", [cubic_profile(), ring_profile(10.0), bump_profile(0.5, 2.0),
                                     cubic_profile(2.5)])
def test_profile_derivatives(profile):
    for s in (0.1, 0.3, 0.45, 0.8):
        assert profile.dh(np.array([s]))[0] == pytest.approx(fd(profile.h, s), abs=1e-6)
        assert profile.d2h(np.array([s]))[0] == pytest.approx(fd(profile.dh, s), abs=1e-5)


def test_profile_boundary_condition():
    with pytest.raises(PreconditionError):
        HamiltonianProfile(lambda s: 1 - s, lambda s: -np.ones_like(s), np.zeros_like)
    with pytest.raises(PreconditionError):
        profile_by_name("quartic")
    assert profile_by_name("cubic", 2.0).h(np.array([0.0]))[0] == 2.0
    s = (cubic_profile() + ring_profile())
    assert s.name == "cubic+ring"


def test_angular_speed():
    p = cubic_profile()
    assert p.angular_speed(0.0) == pytest.approx(-3 / math.pi)
    iso = hamiltonian_isotopy(p)
    # the circle of radius 0.5 turns by its angular speed in unit time
    w = float(p.angular_speed(0.5))
    q = iso.eval(1.0, (0.5, 0.0))
    assert math.atan2(q[1], q[0]) / (2 * math.pi) == pytest.approx(w - round(w), abs=1e-12)


def test_cubic_origin_action():
    iso = hamiltonian_isotopy(cubic_profile())
    a = symplectic_action(iso, (0, 0))
    assert a.value == pytest.approx(-1.0, abs=1e-9)
    assert a.loop_term == 0.0


@pytest.mark.parametrize("lam", [0.5, 2.0, -1.5])
def test_scaled_action(lam):
    iso = hamiltonian_isotopy(cubic_profile(lam))
    assert symplectic_action(iso, (0, 0)).value == pytest.approx(-lam, abs=1e-9)


def test_ring_circle_fixed_point_action():
    iso = hamiltonian_isotopy(ring_profile(10.0))
    r = math.sqrt(0.4)
    a = symplectic_action(iso, (0.0, r))
    assert a.value == pytest.approx(-10 * 0.16 * 0.6 ** 3, abs=1e-9)
    assert abs(a.loop_term) < 1e-12
    assert symplectic_action(iso, (0, 0)).value == pytest.approx(0.0, abs=1e-12)


def test_action_requires_fixed_point():
    with pytest.raises(NotFixed):
        symplectic_action(hamiltonian_isotopy(cubic_profile()), (0.5, 0.0))


def test_radial_average_closed_form():
    # integral of 2 r h'(r^2) over [0, 1] is h(1) - h(0)
    assert radial_average_linking(cubic_profile()) == pytest.approx(-1.0, abs=1e-10)
    assert radial_average_linking(ring_profile(10.0)) == pytest.approx(0.0, abs=1e-10)
    assert radial_average_linking(bump_profile(0.3, 2.0)) == pytest.approx(-2.0, abs=1e-9)


def test_average_linking_matches_action():
    iso = hamiltonian_isotopy(cubic_profile())
    avg = average_linking(iso, (0, 0), 8, 20000, seed=3)
    assert abs(avg.mean_n + 1.0) <= 4 * avg.stderr_n
    assert abs(avg.mean_1 + 1.0) <= 4 * avg.stderr_1
    # radial twists are autonomous, so the n-step and one-step averages agree sample by sample
    assert avg.mean_n == pytest.approx(avg.mean_1, abs=1e-9)
    assert avg.resampled == 0


def test_average_linking_deterministic_and_guarded():
    iso = hamiltonian_isotopy(cubic_profile())
    a = average_linking(iso, (0, 0), 2, 500, seed=5)
    b = average_linking(iso, (0, 0), 2, 500, seed=5)
    assert np.array_equal(a.values_n, b.values_n)
    with pytest.raises(ValueError):
        average_linking(iso, (0, 0), 2, 50)
    with pytest.raises(NotFixed):
        average_linking(iso, (0.5, 0), 2, 500)


def test_rotation_average_linking():
    avg = average_linking(RotationIsotopy(0.3), (0, 0), 4, 1000, seed=0)
    assert avg.mean_n == pytest.approx(0.3 * math.pi, abs=1e-12)


def test_find_nonzero_action():
    iso = hamiltonian_isotopy(ring_profile(10.0))
    pt, act, allv = find_nonzero_action_fixed_point(iso, [(0, 0), (math.sqrt(0.4), 0)])
    assert pt == pytest.approx((math.sqrt(0.4), 0.0))
    assert len(allv) == 2
    iso0 = hamiltonian_isotopy(zero_profile())
    with pytest.raises(NoCandidateAboveTol):
        find_nonzero_action_fixed_point(iso0, [(0, 0), (0.3, 0.2)])
    with pytest.raises(ValueError):
        find_nonzero_action_fixed_point(iso0, [])


@given(st.floats(0.2, 3.0), st.floats(0.1, 1.0))
def test_bump_sum_action(lam, w):
    profile = cubic_profile(lam) + bump_profile(w, 1.0)
    iso = hamiltonian_isotopy(profile)
    assert symplectic_action(iso, (0, 0)).value == pytest.approx(-(lam + 1.0), abs=1e-8)
    assert radial_average_linking(profile) == pytest.approx(-(lam + 1.0), abs=1e-8)
