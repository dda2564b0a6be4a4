"""End-to-end pipelines producing torsion witnesses from first principles.

``disc_demo``: radial Hamiltonian on the disc -> fixed point with nonzero
action -> area-averaged linking with that point -> a pair with nonzero
linking -> witness certificate.

``torus_demo``: double shear on the torus -> rotation set with the origin in
its interior -> periodic orbits realizing rational rotation vectors (and
zero-rotation orbits) -> pairs with nonzero linking -> witness certificate.
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .action import average_linking, find_nonzero_action_fixed_point
from .errors import NotFound, PreconditionError
from .linking import linking_n_many
from .rotset import choose_rational_triple, estimate_rotation_set, newton_periodic, \
    realize_rational_vector
from .sampling import halton_points
from .witness import EPS_MIN, existence_pipeline, find_witness
from .errors import AllPairsZeroLinking


def radial_fixed_points(profile, grid=4096):
    """Origin plus one point on each circle where ``h'`` changes sign (those circles are fixed)."""
    s = np.linspace(0.0, 1.0, grid + 1)[1:-1]
    d = profile.dh(s)
    out = [(0.0, 0.0)]
    for i in np.flatnonzero(np.sign(d[1:]) != np.sign(d[:-1])):
        lo, hi = s[i], s[i + 1]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if np.sign(profile.dh(np.array([mid]))[0]) == np.sign(d[i]):
                lo = mid
            else:
                hi = mid
        out.append((math.sqrt(0.5 * (lo + hi)), 0.0))
    return out


@dataclass
class DiscDemoResult:
    fixed_point: tuple
    action: float
    mean_n: float
    mean_1: float
    stderr_n: float
    stderr_1: float
    certificate: object
    linking_values: list = field(default_factory=list)


def disc_demo(isotopy, profile, n=100, radii=(0.05,), directions=1, samples=20000,
              average_n=8, seed=0, eps_min=EPS_MIN):
    """Fixed point of maximal action, its average linking, and a witness from a nearby pair."""
    candidates = radial_fixed_points(profile)
    x0, action, _ = find_nonzero_action_fixed_point(isotopy, candidates, profile=profile)
    avg = average_linking(isotopy, x0, average_n, samples, seed)
    x0 = np.array(x0)
    pairs = []
    for r in radii:
        for k in range(directions):
            theta = 2 * math.pi * k / directions
            y = x0 + r * np.array([math.cos(theta), math.sin(theta)])
            if np.dot(y, y) < 1.0:
                pairs.append((x0, y))
    if not pairs:
        raise PreconditionError("no candidate pair inside the disc")
    cert, values = existence_pipeline(isotopy, pairs, n, eps_min)
    return DiscDemoResult(tuple(map(float, x0)), action.value, avg.mean_n, avg.mean_1,
                          avg.stderr_n, avg.stderr_1, cert, values)


def zero_rotation_orbits(fmap, max_period=2, seeds=60):
    """Distinct periodic orbits (reduced mod 1) with zero rotation vector, periods up to ``max_period``."""
    orbits = []
    for q in range(1, max_period + 1):
        for s in halton_points(seeds):
            z, res = newton_periodic(fmap, s, np.zeros(2), q)
            if not res < 1e-10:
                continue
            z = z - np.floor(z)
            orb = fmap.orbit(z, q)[:-1]
            orb = orb - np.floor(orb)
            if _minimal_period(orb) != q:
                continue
            if any(_torus_gap(o, orb[0]) < 1e-6 for o in orbits):
                continue
            orbits.append(orb)
    return orbits


def _torus_gap(orbit, p):
    d = (np.asarray(orbit) - p + 0.5) % 1.0 - 0.5
    return float(np.min(np.linalg.norm(d, axis=1)))


def _minimal_period(orbit):
    for k in range(1, len(orbit)):
        if _torus_gap(orbit[k:k + 1], orbit[0]) < 1e-8:
            return k
    return len(orbit)


def orbit_pairs(orbits):
    """One lifted pair ``(x, y)`` per point ``y`` of another orbit, ``y`` the copy nearest ``x``."""
    xs, ys = [], []
    for a, b in itertools.combinations(range(len(orbits)), 2):
        x = orbits[a][0]
        for y in orbits[b]:
            xs.append(x)
            ys.append(x + (y - x + 0.5) % 1.0 - 0.5)
    return np.array(xs), np.array(ys)


@dataclass
class TorusDemoResult:
    vertices: np.ndarray
    area: float
    origin_margin: float
    realized: list
    orbits: list
    n: int
    certificate: object
    max_linking: float
    rotation_set: object = field(repr=False, default=None)


def torus_demo(isotopy, grid=64, rot_n=500, max_period=2, seeds=60, n=20, eps_min=EPS_MIN):
    """Rotation set, realized periodic orbits and a witness from the best-linked orbit pair.

    ``n`` is rounded up to a multiple of the least common multiple of the
    periods so that every pair is compared over whole periods.
    """
    rset = estimate_rotation_set(isotopy, grid, rot_n, nested=False)
    margin = rset.margin((0.0, 0.0))
    if margin <= 0:
        raise PreconditionError("origin is not interior to the estimated rotation set")
    realized = []
    for p, p2, q in choose_rational_triple(rset):
        try:
            realized.append(realize_rational_vector(isotopy, p, p2, q))
        except NotFound:
            continue
    orbits = zero_rotation_orbits(isotopy, max_period, seeds)
    if len(orbits) < 2:
        raise AllPairsZeroLinking("fewer than two zero-rotation periodic orbits found")
    period = math.lcm(*(len(o) for o in orbits))
    n = period * max(1, math.ceil(n / period))
    xs, ys = orbit_pairs(orbits)
    values = linking_n_many(isotopy, xs, ys, n)
    best = int(np.argmax(np.abs(values)))
    if abs(values[best]) < eps_min:
        raise AllPairsZeroLinking(f"all {len(xs)} orbit pairs have |Linking_{n}| < {eps_min:g}")
    cert = find_witness(isotopy, xs[best], ys[best], n, eps_min)
    return TorusDemoResult(rset.vertices, rset.area, margin, realized, orbits, n, cert,
                           float(values[best]), rset)
