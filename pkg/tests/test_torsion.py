import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import ZOO
from torsionlab.action import cubic_profile, hamiltonian_isotopy
from torsionlab.maps import (
    DoubleShear, IdentityIsotopy, RotationIsotopy, build_map, iterate_extension, linear_shear,
)
from torsionlab.sampling import uniform_disc
from torsionlab.torsion import (
    TORSION_CSV_HEADER, pushforward, torsion_measure, torsion_n, torsion_n_many, torsion_orbit,
    xi_spread,
)


def test_annulus_rotation_has_zero_torsion():
    iso = build_map("annulus_rotation", {"alpha": 0.37})
    for n in (1, 5, 40):
        assert torsion_n(iso, (0.2, 0.5), (0.3, 1.0), n) == pytest.approx(0.0, abs=1e-12)


def test_disc_rotation_torsion():
    iso = RotationIsotopy(0.3)
    for n in (1, 7, 100):
        assert torsion_n(iso, (0.4, -0.2), (1.0, 2.0), n) == pytest.approx(0.3, abs=1e-12)


def test_shear_torsion_one_step():
    assert torsion_n(linear_shear(1.0), (0, 0), (0, 1), 1) == pytest.approx(-1 / 8, abs=1e-12)


def test_shear_torsion_closed_form():
    est = torsion_orbit(linear_shear(1.0), (0.3, 0.1), (0, 1), schedule=(4, 16, 64, 256))
    for n, v in zip(est.schedule, est.values):
        # the direction goes from (0,1) to (n,1)
        ref = (math.atan2(1.0, n) / (2 * math.pi) - 0.25) / n
        assert v == pytest.approx(ref, abs=1e-12)
        assert abs(v) <= 1 / (4 * n)


def test_torsion_orbit_rotation_converged():
    est = torsion_orbit(RotationIsotopy(-0.7), (0.1, 0.1), schedule=(8, 16, 32))
    assert est.value == pytest.approx(-0.7, abs=1e-12)
    assert est.converged
    assert est.xi_spread <= 2 / 32 + 1e-9


def test_torsion_orbit_chaotic_reports_values():
    iso = DoubleShear(1.0, 1.0)
    est = torsion_orbit(iso, (0.3, 0.7), schedule=(16, 32, 64))
    assert est.diagnostic in ("converged", "not-converged")
    for n, v in zip(est.schedule, est.values):
        assert v == pytest.approx(torsion_n(iso, (0.3, 0.7), (1, 0), n), abs=1e-6)
    row = est.csv_row()
    assert len(row) == len(TORSION_CSV_HEADER)
    assert row[3] == 64


def test_torsion_orbit_rejects_bad_schedule():
    with pytest.raises(ValueError):
        torsion_orbit(IdentityIsotopy(), (0, 0), schedule=())
    with pytest.raises(ValueError):
        torsion_orbit(IdentityIsotopy(), (0, 0), schedule=(8, 4))
    with pytest.raises(ValueError):
        torsion_n(IdentityIsotopy(), (0, 0), (1, 0), 0)


def test_measure_identity_and_rotation():
    sampler = lambda rng, N: uniform_disc(rng, N)
    m = torsion_measure(IdentityIsotopy(), sampler, 8, 200, seed=1)
    assert m.mean == 0.0 and m.stderr == 0.0
    m = torsion_measure(RotationIsotopy(0.3), sampler, 8, 200, seed=1)
    assert m.mean == pytest.approx(0.3, abs=1e-12)
    assert m.stderr < 1e-12


def test_measure_radial_cubic():
    iso = hamiltonian_isotopy(cubic_profile())
    m = torsion_measure(iso, lambda rng, N: uniform_disc(rng, N), 64, 4000, seed=2,
                        mass=math.pi)
    # closed form: integral of h'(r^2)/pi over the disc area is h(1) - h(0) = -1
    assert abs(m.mean + 1.0) <= 3 * m.stderr + m.xi_budget
    assert m.xi_budget == pytest.approx(2 * math.pi / 64)


def test_measure_is_deterministic():
    iso = DoubleShear(0.3, 0.3)
    sampler = lambda rng, N: rng.random((N, 2))
    a = torsion_measure(iso, sampler, 8, 50, seed=9)
    b = torsion_measure(iso, sampler, 8, 50, seed=9)
    assert np.array_equal(a.values, b.values)


@given(st.sampled_from(sorted(ZOO)), st.floats(-0.8, 0.8), st.floats(-0.6, 0.6),
       st.floats(0, 1), st.floats(0, 1), st.sampled_from([1, 2, 3, 8, 33]))
def test_xi_independence(name, x, y, a, b, n):
    iso = ZOO[name]()
    xi = (math.cos(2 * math.pi * a), math.sin(2 * math.pi * a))
    xi2 = (math.cos(2 * math.pi * b), math.sin(2 * math.pi * b))
    t1 = torsion_n(iso, (x, y), xi, n)
    t2 = torsion_n(iso, (x, y), xi2, n)
    assert abs(t1 - t2) <= 2 / n + 1e-9


def test_xi_spread_bound():
    for name in sorted(ZOO):
        assert xi_spread(ZOO[name](), (0.3, 0.2), 16, directions=8) <= 2 / 16 + 1e-9


@given(st.floats(0, 1), st.floats(0, 1), st.integers(1, 6), st.integers(1, 6))
def test_cocycle_additivity(x, y, m, n):
    iso = DoubleShear(0.7, 0.5)
    xi = (1.0, 0.3)
    whole = (m + n) * torsion_n(iso, (x, y), xi, m + n)
    first = m * torsion_n(iso, (x, y), xi, m)
    px, pxi = pushforward(iso, (x, y), xi, m)
    second = n * torsion_n(iso, px, pxi, n)
    assert whole == pytest.approx(first + second, abs=1e-6)


@pytest.mark.parametrize("q,shift", [(2, (0, 0)), (3, (1, -1))])
def test_iterate_scaling(q, shift):
    f = DoubleShear(1.0, 1.0)
    g = iterate_extension(f, q, shift)
    rng = np.random.default_rng(q)
    for x in rng.random((5, 2)):
        for n in (1, 4):
            lhs = torsion_n(g, x, (0.2, 1.0), n)
            rhs = q * torsion_n(f, x, (0.2, 1.0), q * n)
            assert lhs == pytest.approx(rhs, abs=1e-6)


@given(st.floats(0, 1), st.floats(0, 1), st.integers(-3, 3), st.integers(-3, 3))
def test_lift_project_correspondence(x, y, i, j):
    iso = DoubleShear(1.0, 1.0)
    a = torsion_n(iso, (x, y), (1, 0), 6)
    b = torsion_n(iso, (x + i, y + j), (1, 0), 6)
    assert a == pytest.approx(b, abs=1e-7)


def test_many_matches_single():
    iso = DoubleShear(0.5, 0.5)
    xs = np.random.default_rng(0).random((10, 2))
    many = torsion_n_many(iso, xs, (1, 1), 10)
    single = [torsion_n(iso, x, (1, 1), 10) for x in xs]
    assert np.allclose(many, single, atol=1e-7)
