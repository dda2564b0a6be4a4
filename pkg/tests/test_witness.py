import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.optimize import brentq

from torsionlab.action import cubic_profile, hamiltonian_isotopy, ring_profile
from torsionlab.errors import AllPairsZeroLinking, Collision, ZeroLinking
from torsionlab.linking import linking_n
from torsionlab.maps import DoubleShear, IdentityIsotopy, RotationIsotopy, reflected
from torsionlab.torsion import torsion_n
from torsionlab.witness import (
    CERTIFICATE_HEADER, existence_pipeline, find_witness, s0_minimality_gap,
    verify_certificate, write_certificates,
)


@pytest.mark.parametrize("omega", [0.3, -0.3])
def test_rotation_witness_at_start(omega):
    cert = find_witness(RotationIsotopy(omega), (0.1, 0.0), (0.5, 0.2), 20)
    assert cert.epsilon == pytest.approx(omega, abs=1e-12)
    assert cert.s0 == 0.0
    assert cert.z == cert.x
    assert cert.torsion_value == pytest.approx(omega, abs=1e-12)
    assert cert.bound == pytest.approx(abs(omega) / 3 - 1 / 20)
    assert cert.verified and cert.minimal and cert.holds


def ring_s0(lam, r):
    """First s with |h'((s r)^2)| = 2 |h'(r^2)| / 3, from the closed-form angular speed."""
    dh = ring_profile(lam).dh
    w = lambda s: abs(float(dh(np.array([(s * r) ** 2]))[0]))
    target = 2 * w(1.0) / 3
    grid = np.linspace(0, 1, 20001)
    vals = np.array([w(s) for s in grid]) - target
    k = int(np.argmax(vals >= 0))
    return brentq(lambda s: w(s) - target, grid[k - 1], grid[k], xtol=1e-13)


@pytest.mark.parametrize("r", [0.3, 0.45, 0.6])
def test_ring_witness_interior_s0(r):
    iso = hamiltonian_isotopy(ring_profile(10.0))
    cert = find_witness(iso, (0, 0), (r, 0), 20)
    ref = ring_s0(10.0, r)
    assert cert.s0 > 0.1
    assert cert.s0 == pytest.approx(ref, abs=1e-6)
    assert cert.verified and cert.minimal
    assert s0_minimality_gap(iso, cert) < 0


def test_opposite_sign_start_uses_higher_level():
    # torsion at x is large with the sign opposite to the linking
    iso = hamiltonian_isotopy(ring_profile(10.0))
    x, y, n = (0.15919276, 0.05381476), (-0.44633781, 0.48570405), 12
    cert = find_witness(iso, x, y, n)
    t0 = torsion_n(iso, x, np.subtract(y, x), n)
    assert np.sign(t0) == -np.sign(cert.epsilon)
    assert abs(t0) > abs(cert.epsilon) / 3
    assert cert.threshold == pytest.approx(n * (abs(cert.epsilon) / 3 + abs(t0)), rel=1e-9)
    assert cert.threshold > 2 * n * abs(cert.epsilon) / 3
    assert cert.verified and cert.minimal and cert.holds
    assert s0_minimality_gap(iso, cert) < 0


def test_ring_linking_closed_form():
    iso = hamiltonian_isotopy(ring_profile(10.0))
    r = 0.45
    expected = abs(float(ring_profile(10.0).dh(np.array([r * r]))[0])) / math.pi
    assert abs(linking_n(iso, (0, 0), (r, 0), 20)) == pytest.approx(expected, abs=1e-7)
    assert torsion_n(iso, (0, 0), (1, 0), 20) == pytest.approx(0.0, abs=1e-9)


def test_reflection_mirrors_sign():
    iso = hamiltonian_isotopy(ring_profile(10.0))
    a = find_witness(iso, (0, 0), (0.45, 0), 20)
    b = find_witness(reflected(iso), (0, 0), (0.45, 0), 20)
    assert b.epsilon == pytest.approx(-a.epsilon, abs=1e-9)
    assert b.s0 == pytest.approx(a.s0, abs=1e-6)
    assert b.torsion_value == pytest.approx(-a.torsion_value, abs=1e-6)


def test_double_shear_witness():
    iso = DoubleShear(1.0, 1.0)
    x, y = np.array([0.41, 0.73]), np.array([0.38, 0.71])
    n = 20
    assert linking_n(iso, x, y, n) == pytest.approx(-0.1171, abs=1e-4)
    cert = find_witness(iso, x, y, n)
    assert cert.verified
    sigma = math.copysign(1.0, cert.epsilon)
    assert sigma * cert.torsion_value >= cert.bound - 1e-6
    # z lies on the segment at parameter s0
    assert np.allclose(cert.z, x + cert.s0 * (y - x), atol=1e-12)


def test_random_close_pairs_all_verified():
    iso = DoubleShear(0.6, 0.6)
    rng = np.random.default_rng(7)
    done = 0
    for _ in range(60):
        x = rng.random(2)
        y = x + 0.08 * rng.normal(size=2)
        if abs(linking_n(iso, x, y, 20)) < 0.05:
            continue
        cert = find_witness(iso, x, y, 20)
        assert cert.verified, cert
        done += 1
        if done == 5:
            break
    assert done == 5


def test_zero_linking_and_collision():
    with pytest.raises(ZeroLinking):
        find_witness(IdentityIsotopy(), (0, 0), (0.5, 0), 10)
    with pytest.raises(Collision):
        find_witness(RotationIsotopy(0.3), (0.2, 0), (0.2, 0), 10)


def test_verify_detects_tampering():
    iso = RotationIsotopy(0.3)
    cert = find_witness(iso, (0.1, 0.0), (0.5, 0.2), 20)
    bad = replace(cert, z=(0.1, 0.0), xi=(1.0, 0.0), n=1)
    assert verify_certificate(iso, bad).verified  # rotation torsion is 0.3 everywhere
    bad = replace(cert, epsilon=0.9)
    assert verify_certificate(iso, bad).verify_epsilon == pytest.approx(0.3)


def test_existence_pipeline_picks_largest():
    iso = hamiltonian_isotopy(cubic_profile())
    pairs = [((0, 0), (0.9, 0)), ((0, 0), (0.2, 0)), ((0.1, 0.1), (0.5, 0.0))]
    cert, values = existence_pipeline(iso, pairs, 20)
    assert len(values) == 3
    best = int(np.argmax(np.abs(values)))
    assert cert.x == tuple(map(float, pairs[best][0]))
    assert cert.verified
    with pytest.raises(AllPairsZeroLinking):
        existence_pipeline(IdentityIsotopy(), pairs, 20)
    with pytest.raises(ValueError):
        existence_pipeline(iso, [], 20)


def test_write_certificates(tmp_path):
    cert = find_witness(RotationIsotopy(0.3), (0.1, 0.0), (0.5, 0.2), 20)
    path = tmp_path / "w.csv"
    write_certificates(path, [cert], ["torsionlab test"])
    lines = path.read_text().splitlines()
    assert lines[0] == "# torsionlab test"
    assert lines[1] == ",".join(CERTIFICATE_HEADER)
    assert len(lines) == 3
