"""Rotation vectors and rotation sets of lifted torus maps.

``rho_n(f, z) = (f^n(z) - z) / n`` in cover coordinates.  The rotation set is
approximated by the convex hull of ``rho_n`` over a grid of base points; this
is a sampled proxy and carries no certification.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import InversionFailure, NotFound
from .io import SvgCanvas, provenance, write_csv
from .maps import as_points, iterate_extension
from .sampling import chunked, halton_points, parallel_map

DISCLAIMER = "sampled outer proxy of the rotation set; not certified"
RESIDUAL_TOL = 1e-10
GRID_CHUNK = 16384


def rho_n(fmap, z, n):
    """Displacement average ``(f^n(z) - z) / n`` (one point or a batch)."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    pts, single = as_points(z)
    out = (fmap.iterate(pts, int(n)) - pts) / int(n)
    return out[0] if single else out


# Convex geometry ---------------------------------------------------------------

def convex_hull(points, tol=1e-12):
    """Counterclockwise hull vertices; degenerate inputs give one or two points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("no points")
    center = pts.mean(axis=0)
    spread = pts - center
    scale = float(np.max(np.abs(spread))) if len(pts) else 0.0
    if scale <= tol:
        return center.reshape(1, 2)
    _, sv, vt = np.linalg.svd(spread, full_matrices=False)
    if len(sv) < 2 or sv[1] <= tol * max(1.0, sv[0]) * math.sqrt(len(pts)):
        proj = spread @ vt[0]
        return pts[[int(np.argmin(proj)), int(np.argmax(proj))]]
    try:
        hull = ConvexHull(pts)
    except QhullError:
        proj = spread @ vt[0]
        return pts[[int(np.argmin(proj)), int(np.argmax(proj))]]
    return pts[hull.vertices]


def _segment_distance(p, a, b):
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.linalg.norm(p - (a + t * ab)))


def signed_margin(p, vertices):
    """Distance from ``p`` to the polygon boundary, negative outside.

    Degenerate polygons (a point or a segment) have no interior, so the
    result is minus the distance to them.
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(vertices, dtype=float)
    if len(v) == 1:
        return -float(np.linalg.norm(p - v[0]))
    if len(v) == 2:
        return -_segment_distance(p, v[0], v[1])
    edges = np.roll(v, -1, axis=0) - v
    cross = edges[:, 0] * (p[1] - v[:, 1]) - edges[:, 1] * (p[0] - v[:, 0])
    dist = min(_segment_distance(p, v[i], v[(i + 1) % len(v)]) for i in range(len(v)))
    return dist if np.all(cross >= 0) else -dist


def polygon_distance(p, vertices):
    """Distance from ``p`` to the closed convex polygon (0 inside)."""
    return max(0.0, -signed_margin(p, vertices))


def polygon_area(vertices):
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def is_convex_ccw(vertices, tol=1e-12):
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return True
    e = np.roll(v, -1, axis=0) - v
    f = np.roll(e, -1, axis=0)
    return bool(np.all(e[:, 0] * f[:, 1] - e[:, 1] * f[:, 0] > -tol))


def hausdorff_distance(P, Q):
    """Hausdorff distance between two convex polygons given by their vertices.

    The distance to a convex set is a convex function, so its maximum over a
    polygon is attained at a vertex.
    """
    a = max(polygon_distance(p, Q) for p in np.asarray(P, dtype=float))
    b = max(polygon_distance(q, P) for q in np.asarray(Q, dtype=float))
    return max(a, b)


# Rotation set ------------------------------------------------------------------

def grid_points(N):
    """The ``N x N`` grid ``{(i/N, j/N)}`` of base points in ``[0, 1)^2``."""
    k = np.arange(N) / N
    gx, gy = np.meshgrid(k, k, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


@dataclass
class RotationSetApprox:
    """Convex hull of sampled rotation vectors, with sampling metadata."""

    vertices: np.ndarray
    n: int
    grid: int
    samples: int
    rho: np.ndarray = field(repr=False, default=None)
    max_step: float = 0.0
    nested_excess: float = float("nan")
    nested_radius: float = float("nan")
    disclaimer: str = DISCLAIMER

    @property
    def area(self):
        return polygon_area(self.vertices)

    @property
    def nested_ok(self):
        return bool(self.nested_excess <= self.nested_radius + 1e-12)

    def margin(self, p):
        return signed_margin(p, self.vertices)

    def contains(self, p, tol=1e-12):
        return self.margin(p) >= -tol

    def is_interior(self, p, margin=0.0):
        return self.margin(p) > margin

    def to_csv(self, path, config_text=""):
        meta = provenance(config_text, [self.disclaimer, f"n {self.n}", f"grid {self.grid}",
                                        f"samples {self.samples}", f"area {self.area!r}"])
        write_csv(path, ["vx", "vy"], self.vertices.tolist(), meta)

    def to_svg(self, path, extra_points=(), config_text=""):
        v = np.asarray(self.vertices)
        cloud = self.rho if self.rho is not None else v
        lo = np.minimum(cloud.min(axis=0), v.min(axis=0)) - 0.1
        hi = np.maximum(cloud.max(axis=0), v.max(axis=0)) + 0.1
        canvas = SvgCanvas(lo[0], hi[0], lo[1], hi[1])
        step = max(1, len(cloud) // 4000)
        canvas.points(cloud[::step], radius=0.8)
        canvas.polygon(v.tolist(), stroke="crimson")
        if len(extra_points):
            canvas.points(np.asarray(extra_points).reshape(-1, 2), color="black", radius=3)
        canvas.save(path, provenance(config_text, [self.disclaimer]))


def estimate_rotation_set(fmap, N, n, nested=True):
    """Hull of ``rho_n`` over the ``N x N`` grid, plus the nested diagnostic.

    With ``nested`` the orbits are continued to ``2n`` and the report records
    how far the ``2n`` hull sticks out of the ``n`` hull (``nested_excess``)
    against the allowance ``2 * max_step / n``, where ``max_step`` is the
    largest single-step displacement seen along the sampled orbits.
    """
    if N < 2:
        raise ValueError("grid size must be at least 2")
    n = int(n)
    z = grid_points(int(N))
    chunks = chunked(len(z), GRID_CHUNK)
    runs = parallel_map(lambda rows: _advance(fmap, z[rows], n, 2 if nested else 1), chunks)
    ends = np.concatenate([r[0] for r in runs], axis=1)
    steps = np.array([r[1] for r in runs])
    rho = (ends[0] - z) / n
    verts = convex_hull(rho)
    out = RotationSetApprox(verts, n, int(N), len(z), rho, float(steps[:, 0].max()))
    if nested:
        rho2 = (ends[1] - z) / (2 * n)
        v2 = convex_hull(rho2)
        out.max_step = float(steps.max())
        out.nested_excess = max(polygon_distance(p, verts) for p in v2)
        out.nested_radius = 2.0 * out.max_step / n
    return out


def _advance(fmap, z, n, rounds):
    """Positions after ``n, 2n, ...`` steps and the largest step within each round."""
    cur = z.copy()
    ends, steps = [], []
    for _ in range(rounds):
        max_step = 0.0
        for _ in range(n):
            nxt = fmap.apply(cur)
            max_step = max(max_step, float(np.max(np.linalg.norm(nxt - cur, axis=1))))
            cur = nxt
        ends.append(cur)
        steps.append(max_step)
    return np.array(ends), steps


# Periodic orbits -----------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicOrbitRecord:
    z: tuple
    q: int
    v: tuple
    residual: float

    @property
    def rotation_vector(self):
        """Exact rotation vector ``v / q``."""
        return (Fraction(self.v[0], self.q), Fraction(self.v[1], self.q))


def _power(fmap, z, q):
    """``f^q(z)`` and its differential for one point."""
    cur = np.asarray(z, dtype=float).reshape(1, 2)
    jac = np.eye(2)
    for _ in range(q):
        cur, d = fmap.step(cur)
        jac = d[0] @ jac
    return cur[0], jac


def newton_periodic(fmap, z, v, q, max_iter=60, tol=RESIDUAL_TOL):
    """Damped Newton on ``G(z) = f^q(z) - z - v``; returns ``(z, |G(z)|)``."""
    z = np.asarray(z, dtype=float).copy()
    fz, jac = _power(fmap, z, q)
    g = fz - z - v
    res = float(np.linalg.norm(g))
    for _ in range(max_iter):
        if res < tol:
            break
        delta = np.linalg.lstsq(jac - np.eye(2), -g, rcond=None)[0]
        lam = 1.0
        while lam > 1e-12:
            trial = z + lam * delta
            f_trial, j_trial = _power(fmap, trial, q)
            g_trial = f_trial - trial - v
            r_trial = float(np.linalg.norm(g_trial))
            if r_trial < res:
                z, g, jac, res = trial, g_trial, j_trial, r_trial
                break
            lam *= 0.5
        else:
            break
        if not np.all(np.isfinite(z)):
            break
    return z, res


def realize_rational_vector(fmap, p, p2, q, seeds=None, max_iter=60, n_seeds=40,
                            tol=RESIDUAL_TOL):
    """Find ``z`` with ``f^q(z) = z + (p, p2)`` by damped Newton from several seeds.

    Seeds default to the origin followed by Halton points of the unit square.
    Raises :class:`NotFound` when no seed converges, which says nothing
    about whether such a point exists.
    """
    q = int(q)
    if q < 1:
        raise ValueError("q must be positive")
    v = np.array([p, p2], dtype=float)
    if seeds is None:
        seeds = np.vstack([[0.0, 0.0], halton_points(n_seeds - 1)])
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 2)
    best = math.inf
    for seed in seeds:
        z, res = newton_periodic(fmap, seed, v, q, max_iter, tol)
        if res < tol:
            if fmap.surface.kind == "torus":
                # deck translations commute with the lift, so reduce to the unit square
                z = z - np.floor(z)
                res = float(np.linalg.norm(_power(fmap, z, q)[0] - z - v))
            return PeriodicOrbitRecord(tuple(map(float, z)), q, (int(p), int(p2)), res)
        best = min(best, res)
    raise NotFound(f"no periodic point with q={q}, v=({p},{p2}) from {len(seeds)} seeds "
                   f"(best residual {best:.3g})")


def rational_candidates(rset, max_denominator=8, margin=1e-3):
    """Lattice fractions ``(p/q, p'/q)`` strictly inside the polygon, smallest ``q`` first."""
    v = np.asarray(rset.vertices)
    lo, hi = v.min(axis=0), v.max(axis=0)
    seen, out = set(), []
    for q in range(1, max_denominator + 1):
        for p in range(math.floor(lo[0] * q), math.ceil(hi[0] * q) + 1):
            for p2 in range(math.floor(lo[1] * q), math.ceil(hi[1] * q) + 1):
                key = (Fraction(p, q), Fraction(p2, q))
                if key in seen:
                    continue
                if rset.is_interior((p / q, p2 / q), margin):
                    seen.add(key)
                    out.append((p, p2, q))
    out.sort(key=lambda c: (c[2], c[0] ** 2 + c[1] ** 2))
    return out


def _triangle_area2(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def choose_rational_triple(rset, max_denominator=8, margin=1e-3, pool=40):
    """Three affinely independent interior rational vectors, preferably around the origin.

    Returns triples ``(p, p', q)``.  A triple whose triangle has the origin
    strictly inside is preferred; otherwise any independent triple is used.
    """
    cands = rational_candidates(rset, max_denominator, margin)[:pool]
    vecs = [(p / q, p2 / q) for p, p2, q in cands]
    fallback = None
    for i, j, k in itertools.combinations(range(len(cands)), 3):
        a, b, c = vecs[i], vecs[j], vecs[k]
        area = _triangle_area2(a, b, c)
        if abs(area) < 1e-12:
            continue
        if fallback is None:
            fallback = (cands[i], cands[j], cands[k])
        o = (0.0, 0.0)
        s = [_triangle_area2(a, b, o), _triangle_area2(b, c, o), _triangle_area2(c, a, o)]
        if all(x * area > 0 for x in s):
            return cands[i], cands[j], cands[k]
    if fallback is None:
        raise NotFound("fewer than three affinely independent interior rational vectors")
    return fallback


# Displacement identities -----------------------------------------------------

def max_displacement(hfunc, grid=512):
    """``max |h(z) - z|`` over a dense grid of the unit square."""
    z = grid_points(grid)
    return float(np.max(np.linalg.norm(hfunc(z) - z, axis=1)))


def invert(hfunc, hjac, w, seed=None, tol=1e-13, max_iter=50):
    """Solve ``h(u) = w`` row by row with Newton's method seeded at ``seed`` (default ``w``)."""
    w = np.asarray(w, dtype=float).reshape(-1, 2)
    u = w.copy() if seed is None else np.asarray(seed, dtype=float).reshape(-1, 2).copy()
    for _ in range(max_iter):
        r = hfunc(u) - w
        if np.max(np.linalg.norm(r, axis=1)) < tol:
            return u
        u = u - np.linalg.solve(hjac(u), r[..., None])[..., 0]
    r = hfunc(u) - w
    if not np.max(np.linalg.norm(r, axis=1)) < 1e3 * tol:
        raise InversionFailure(f"h could not be inverted (residual {np.max(np.abs(r)):.3g})")
    return u


@dataclass(frozen=True)
class SemiconjugacyReport:
    max_deviation: float
    bound: float
    d1: float
    n: int
    max_orbit_defect: float

    @property
    def holds(self):
        return self.max_deviation <= self.bound + 1e-9


def semiconjugacy_bound_check(fmap, hfunc, hjac, samples, n, d1=None, check_tol=1e-9):
    """Compare rotation vectors of ``f`` and of ``phi = h o f o h^{-1}``.

    The ``phi``-orbit of ``h(z)`` is taken as ``w_k = h(f^k(z))``; each step
    is confirmed by inverting ``h`` at ``w_k`` (seeded at ``w_k`` itself) and
    applying ``h o f``, which must reproduce ``w_{k+1}`` within ``check_tol``.
    """
    z = np.asarray(samples, dtype=float).reshape(-1, 2)
    n = int(n)
    if d1 is None:
        d1 = max_displacement(hfunc)
    u = z.copy()
    w = hfunc(u)
    defect = 0.0
    for _ in range(n):
        u_next = fmap.apply(u)
        w_next = hfunc(u_next)
        phi_w = hfunc(fmap.apply(invert(hfunc, hjac, w)))
        defect = max(defect, float(np.max(np.linalg.norm(phi_w - w_next, axis=1))))
        u, w = u_next, w_next
    if defect > check_tol:
        raise InversionFailure(f"conjugated orbit check failed (defect {defect:.3g})")
    rho_phi = (w - hfunc(z)) / n
    rho_f = (u - z) / n
    dev = float(np.max(np.linalg.norm(rho_phi - rho_f, axis=1)))
    return SemiconjugacyReport(dev, 2.0 * d1 / n, float(d1), n, defect)


def iterate_identity_check(fmap, q, p, p2, samples, n):
    """Max over samples of ``|rho_n(g, z) - (q rho_{qn}(f, z) - (p, p2))|`` with ``g = f^q - (p, p2)``."""
    g = iterate_extension(fmap, q, (p, p2))
    z = np.asarray(samples, dtype=float).reshape(-1, 2)
    lhs = rho_n(g, z, n)
    rhs = q * rho_n(fmap, z, q * n) - np.array([p, p2], dtype=float)
    return float(np.max(np.abs(lhs - rhs)))
