"""Turn a pair of orbits with nonzero linking into a point with large torsion.

Given ``x``, ``y`` with ``eps = Linking_n(x, y) != 0`` and ``xi`` the unit
vector from ``x`` to ``y``, some point ``z`` of the segment ``[x, y]``
satisfies ``|Torsion_n(z, xi)| >= |eps|/3 - 1/n``.

The search follows the angle function ``g(s) = u(s, n) - u(0, n)``, where
``u(s, t)`` is the lifted direction from ``f_t(x)`` to ``f_t(z(s))``
(continued at ``s = 0`` by the direction of ``df_t(x) xi``).  Since
``u(s, 0)`` does not depend on ``s``,

    g(s) = n * (Linking_n(x, z(s)) - Torsion_n(x, xi)),

and ``z = z(s0)`` for the first ``s0`` where ``g`` reaches ``2 n eps / 3``.
The tangent direction turns by ``g(s0)`` up to ``3/4`` of a turn along the
image arc, so ``Torsion_n(z) >= Torsion_n(x) + g(s0)/n - 3/(4n)``.  When
``Torsion_n(x)`` has the opposite sign and exceeds ``|eps|/3`` in size, the
level ``2 n eps / 3`` is too low for this to reach the bound, and the level
``n (eps/3 - Torsion_n(x))`` is used instead (it is still below ``g(1)``).
When the profile cannot be resolved near ``s = 0`` (strong mixing) and the
first crossing misses the bound, later crossings are tried and the
certificate is marked ``minimal=False``.
"""

from dataclasses import dataclass, replace
import csv
import math

import numpy as np

from .errors import AllPairsZeroLinking, Collision, S0NotFound, ZeroLinking
from .lift import DEFAULT_SAMPLES, DEFAULT_TOL
from .linking import linking_n, linking_n_many
from .maps import as_points
from .torsion import torsion_n

EPS_MIN = 1e-3
GRID_POINTS = 1000
GRID_START = 1e-6
BISECT_TOL = 1e-9
SLACK = 1e-6
_JUMP = 0.25
_MAX_JUMP_REFINE = 12
_MAX_CANDIDATES = 25

CERTIFICATE_HEADER = ["xx", "xy", "yx", "yy", "n", "epsilon", "s0", "zx", "zy", "torsion", "bound"]


@dataclass(frozen=True)
class WitnessCertificate:
    """A point ``z`` on ``[x, y]`` whose torsion satisfies the linking bound."""

    x: tuple
    y: tuple
    z: tuple
    s0: float
    xi: tuple
    epsilon: float
    torsion_value: float
    n: int
    bound: float
    threshold: float = float("nan")
    minimal: bool = True
    verified: bool = False
    verify_epsilon: float = float("nan")
    verify_torsion: float = float("nan")

    @property
    def holds(self):
        return abs(self.torsion_value) >= self.bound - SLACK

    def csv_row(self):
        return [self.x[0], self.x[1], self.y[0], self.y[1], self.n, self.epsilon, self.s0,
                self.z[0], self.z[1], self.torsion_value, self.bound]


def write_certificates(path, certificates, metadata=None):
    with open(path, "w", newline="") as fh:
        for line in metadata or ():
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CERTIFICATE_HEADER)
        for c in certificates:
            w.writerow([repr(float(v)) if not isinstance(v, int) else v for v in c.csv_row()])


def _tup(p):
    return tuple(float(c) for c in p)


class _AngleProfile:
    """Evaluates ``sigma * g(s)`` on batches of ``s`` values."""

    def __init__(self, isotopy, x, y, n, torsion0, sigma, tol, samples_per_unit):
        self.isotopy = isotopy
        self.x = x
        self.y = y
        self.n = n
        self.torsion0 = torsion0
        self.sigma = sigma
        self.tol = tol
        self.spu = samples_per_unit

    def __call__(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        z = (1.0 - s)[:, None] * self.x + s[:, None] * self.y
        xs = np.broadcast_to(self.x, z.shape)
        try:
            link = linking_n_many(self.isotopy, xs, z, self.n, self.tol, self.spu)
        except Collision:
            link = np.array([self._single(zz) for zz in z])
        return self.sigma * self.n * (link - self.torsion0)

    def _single(self, z):
        try:
            return linking_n_many(self.isotopy, self.x[None], z[None], self.n, self.tol,
                                  self.spu)[0]
        except Collision:
            return np.nan


def _refine_jumps(profile, s, g, target):
    """Insert midpoints where ``g`` jumps by a quarter turn or more before the first crossing."""
    for _ in range(_MAX_JUMP_REFINE):
        hit = np.flatnonzero(g >= target)
        if hit.size == 0:
            return s, g
        j = int(hit[0])
        # large steps before the first crossing may hide an earlier one
        steps = np.abs(np.diff(g[: j + 1]))
        wide = np.diff(s[: j + 1]) > BISECT_TOL
        jumps = np.flatnonzero((steps >= _JUMP) & wide)
        jumps = jumps[jumps > 0]  # [0, GRID_START] is covered by the analytic value at 0
        if jumps.size == 0:
            break
        mids = 0.5 * (s[jumps] + s[jumps + 1])
        gm = profile(mids)
        keep = np.isfinite(gm)
        if not keep.any():
            break
        s = np.insert(s, jumps[keep] + 1, mids[keep])
        g = np.insert(g, jumps[keep] + 1, gm[keep])
    return s, g


def _crossings(s, g, target, limit):
    """Brackets ``(lo, hi)`` of the up-crossings of ``target``, first crossing first."""
    above = g >= target
    if not above.any():
        return []
    up = np.flatnonzero(above[1:] & ~above[:-1]) + 1
    first = int(np.flatnonzero(above)[0])
    idx = [first] + [int(i) for i in up if i != first]
    return [(s[i - 1] if i > 0 else 0.0, s[i]) for i in idx[:limit]]


def _bisect(profile, lo, hi, target):
    while hi - lo >= BISECT_TOL:
        mid = 0.5 * (lo + hi)
        val = profile(mid)[0]
        if np.isnan(val):
            break
        if val >= target:
            hi = mid
        else:
            lo = mid
    return hi


def crossing_level(eps, torsion0, n):
    """Level of ``sigma * g`` defining ``s0``; guarantees the bound up to ``3/(4n)``."""
    sigma = 1.0 if eps > 0 else -1.0
    return max(2.0 * n * abs(eps) / 3.0, n * (abs(eps) / 3.0 - sigma * torsion0))


def _locate(isotopy, x, y, n, eps, torsion0, grid_points, tol, spu, bound):
    """Grid-then-bisection search for ``s0``.

    Returns ``(s0, z, torsion at z, minimal)`` or ``None``.  The first crossing
    is tried first; when the torsion there misses the bound (the profile can
    be unresolvable near ``s = 0`` for strongly mixing maps), later
    up-crossings are tried in order and the result is flagged non-minimal.
    """
    sigma = 1.0 if eps > 0 else -1.0
    target = crossing_level(eps, torsion0, n)
    profile = _AngleProfile(isotopy, x, y, n, torsion0, sigma, tol, spu)
    s = np.concatenate([[0.0], np.geomspace(GRID_START, 1.0 / grid_points, 8)[:-1],
                        np.linspace(1.0 / grid_points, 1.0, grid_points)])
    g = np.concatenate([[0.0], profile(s[1:])])
    keep = np.isfinite(g)
    s, g = s[keep], g[keep]
    s, g = _refine_jumps(profile, s, g, target)
    for k, (lo, hi) in enumerate(_crossings(s, g, target, _MAX_CANDIDATES)):
        s0 = _bisect(profile, lo, hi, target)
        z = (1.0 - s0) * x + s0 * y
        tz = torsion_n(isotopy, z, y - x, n, tol, spu)
        if sigma * tz >= bound - SLACK:
            return s0, z, tz, k == 0
    return None


def find_witness(isotopy, x, y, n, eps_min=EPS_MIN, tol=DEFAULT_TOL,
                 samples_per_unit=DEFAULT_SAMPLES, verify=True):
    """Locate ``z`` on ``[x, y]`` with ``|Torsion_n(z, xi)| >= |eps|/3 - 1/n``.

    Raises :class:`ZeroLinking` when ``|eps| < eps_min`` and
    :class:`S0NotFound` when neither the default nor a ten times denser grid
    produces a point satisfying the bound (a numerical failure, not a
    counterexample).  With ``verify`` both sides are recomputed on a lift grid
    twice as dense.
    """
    x = as_points(x)[0][0].copy()
    y = as_points(y)[0][0].copy()
    n = int(n)
    if np.linalg.norm(y - x) == 0:
        raise Collision("x and y coincide", 0.0)
    xi = (y - x) / np.linalg.norm(y - x)
    eps = linking_n(isotopy, x, y, n, tol, samples_per_unit)
    if abs(eps) < eps_min:
        raise ZeroLinking(f"|Linking_{n}| = {abs(eps):.3g} is below {eps_min:g}")
    sigma = 1.0 if eps > 0 else -1.0
    bound = abs(eps) / 3.0 - 1.0 / n
    torsion0 = torsion_n(isotopy, x, xi, n, tol, samples_per_unit)

    if sigma * torsion0 >= abs(eps) / 3.0:
        s0, z, tz, minimal = 0.0, x, torsion0, True
    else:
        result = None
        for grid in (GRID_POINTS, 10 * GRID_POINTS):
            result = _locate(isotopy, x, y, n, eps, torsion0, grid, tol, samples_per_unit,
                             bound)
            if result is not None:
                break
        if result is None:
            raise S0NotFound(f"no s0 satisfying the bound found for n={n}, eps={eps:.4g}")
        s0, z, tz, minimal = result

    cert = WitnessCertificate(_tup(x), _tup(y), _tup(z), float(s0), _tup(xi), float(eps),
                              float(tz), n, float(bound),
                              threshold=float(crossing_level(eps, torsion0, n)),
                              minimal=bool(minimal))
    if verify:
        cert = verify_certificate(isotopy, cert, tol, 2 * samples_per_unit)
    return cert


def verify_certificate(isotopy, cert, tol=DEFAULT_TOL, samples_per_unit=2 * DEFAULT_SAMPLES):
    """Recompute ``eps`` and the torsion at ``z`` independently and re-check the bound."""
    eps = linking_n(isotopy, cert.x, cert.y, cert.n, tol, samples_per_unit)
    tz = torsion_n(isotopy, cert.z, cert.xi, cert.n, tol, samples_per_unit)
    sigma = 1.0 if eps > 0 else -1.0
    ok = sigma * tz >= abs(eps) / 3.0 - 1.0 / cert.n - SLACK
    return replace(cert, verified=bool(ok), verify_epsilon=float(eps), verify_torsion=float(tz))


def s0_minimality_gap(isotopy, cert, spacing=1e-3, tol=DEFAULT_TOL,
                      samples_per_unit=DEFAULT_SAMPLES):
    """Largest ``sigma * g(s)`` minus the crossing level over a grid of ``s < s0``.

    Negative when ``s0`` is the first crossing.
    """
    if cert.s0 == 0.0:
        return -math.inf
    x, y = np.array(cert.x), np.array(cert.y)
    sigma = 1.0 if cert.epsilon > 0 else -1.0
    torsion0 = torsion_n(isotopy, x, y - x, cert.n, tol, samples_per_unit)
    profile = _AngleProfile(isotopy, x, y, cert.n, torsion0, sigma, tol, samples_per_unit)
    s = np.arange(spacing, cert.s0, spacing)
    if s.size == 0:
        return -math.inf
    return float(np.max(profile(s)) - crossing_level(cert.epsilon, torsion0, cert.n))


def existence_pipeline(isotopy, pairs, n, eps_min=EPS_MIN, tol=DEFAULT_TOL):
    """Run :func:`find_witness` on the candidate pair with the largest ``|Linking_n|``.

    Ties go to the earliest pair.  Returns ``(certificate, linking values)``.
    """
    pairs = [(as_points(a)[0][0], as_points(b)[0][0]) for a, b in pairs]
    if not pairs:
        raise ValueError("no candidate pairs")
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    values = linking_n_many(isotopy, xs, ys, n, tol)
    mags = np.abs(values)
    best = int(np.argmax(mags))
    if mags[best] < eps_min:
        raise AllPairsZeroLinking(f"all {len(pairs)} pairs have |Linking_{n}| < {eps_min:g}")
    x, y = pairs[best]
    return find_witness(isotopy, x, y, n, eps_min, tol), list(map(float, values))
