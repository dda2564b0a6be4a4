"""Markov partition of a linear Anosov torus map, chains of rectangles, and triangle tracks.

Rectangles are boxes in eigen-coordinates: a point ``P`` of the plane is
written ``P = a u + b s`` with ``u`` the expanding and ``s`` the contracting
eigenvector of ``A``.  For ``A = [[2, 1], [1, 1]]`` (and its powers) the
eigenvectors have entries in Q(sqrt 5), so every comparison below is exact.

Chains use tag bookkeeping: rectangle ``R_j + t`` may follow ``R_i`` when
``A(R_i)`` meets the interior of ``R_j + t``, and a chain is stored as nodes
``(id_k, v_k)`` with ``v_{k+1} = v_k + t_k``.  A point whose orbit follows the
chain satisfies ``x_{k+1} = A x_k - t_k`` with ``x_k`` in ``R_{id_k}``.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import math
import random

import numpy as np

from .errors import (HullConditionFailed, ItineraryMismatch, NoIntegerSolution, NotFound,
                     PointNotInterior, PreconditionError, VerificationFailure)
from .io import SvgCanvas
from .linking import linking_curves
from .qsqrt5 import QSqrt5, qmax, qmin

MODEL_NOTE = ("chains run on the linear automorphism [[2,1],[1,1]]; "
              "triangle tracks use double-shear periodic orbits")


def _q(v):
    return QSqrt5.coerce(Fraction(v) if not isinstance(v, QSqrt5) else v)


@dataclass(frozen=True)
class Box:
    """Axis-parallel box ``[a0, a1] x [b0, b1]`` in eigen-coordinates (exact)."""

    a0: QSqrt5
    a1: QSqrt5
    b0: QSqrt5
    b1: QSqrt5

    def shifted(self, da, db):
        return Box(self.a0 + da, self.a1 + da, self.b0 + db, self.b1 + db)

    def scaled(self, la, lb):
        a = (self.a0 * la, self.a1 * la)
        b = (self.b0 * lb, self.b1 * lb)
        return Box(qmin(*a), qmax(*a), qmin(*b), qmax(*b))

    def area(self):
        return (self.a1 - self.a0) * (self.b1 - self.b0)

    def open_overlap(self, other):
        return (qmax(self.a0, other.a0) < qmin(self.a1, other.a1)
                and qmax(self.b0, other.b0) < qmin(self.b1, other.b1))

    def intersection(self, other):
        return Box(qmax(self.a0, other.a0), qmin(self.a1, other.a1),
                   qmax(self.b0, other.b0), qmin(self.b1, other.b1))

    def locate(self, a, b):
        """``"interior"``, ``"boundary"`` or ``"outside"`` for the point ``(a, b)``."""
        if a < self.a0 or a > self.a1 or b < self.b0 or b > self.b1:
            return "outside"
        if a == self.a0 or a == self.a1 or b == self.b0 or b == self.b1:
            return "boundary"
        return "interior"


class EigenFrame:
    """Exact eigen-coordinates for a hyperbolic matrix with eigenvalues in Q(sqrt 5)."""

    def __init__(self, matrix):
        A = np.asarray(matrix)
        if A.shape != (2, 2) or not np.all(A == np.round(A)):
            raise PreconditionError("matrix must be a 2x2 integer matrix")
        A = [[int(A[0, 0]), int(A[0, 1])], [int(A[1, 0]), int(A[1, 1])]]
        det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
        tr = A[0][0] + A[1][1]
        if abs(det) != 1:
            raise PreconditionError("matrix must be unimodular")
        if abs(tr) <= 2 or det != 1:
            raise PreconditionError("matrix must be hyperbolic with determinant 1")
        disc = tr * tr - 4 * det
        k2, rem = divmod(disc, 5)
        k = math.isqrt(k2) if rem == 0 else -1
        if rem != 0 or k * k != k2:
            raise PreconditionError("eigenvalues outside Q(sqrt 5) are not supported")
        self.A = A
        big = QSqrt5(Fraction(tr, 2), Fraction(k, 2) if tr > 0 else Fraction(-k, 2))
        small = QSqrt5(Fraction(tr, 2), -big.b)
        self.lam_u, self.lam_s = big, small
        self.u = self._eigvec(big)
        self.s = self._eigvec(small)
        m = [[self.u[0], self.s[0]], [self.u[1], self.s[1]]]
        d = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        self.inv = [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]

    def _eigvec(self, lam):
        A = self.A
        if A[0][1] != 0:
            return (_q(A[0][1]), lam - A[0][0])
        return (lam - A[1][1], _q(A[1][0]))

    def coords(self, x, y):
        """Exact eigen-coordinates ``(a, b)`` of a rational point."""
        x, y = _q(x), _q(y)
        return (self.inv[0][0] * x + self.inv[0][1] * y, self.inv[1][0] * x + self.inv[1][1] * y)

    def point(self, a, b):
        """Plane point (floats) with eigen-coordinates ``(a, b)``."""
        return (float(a * self.u[0] + b * self.s[0]), float(a * self.u[1] + b * self.s[1]))

    def slopes(self):
        return float(self.u[1] / self.u[0]), float(self.s[1] / self.s[0])


@dataclass(frozen=True)
class Rectangle:
    id: int
    box: Box
    frame: EigenFrame = field(repr=False, compare=False)

    @property
    def vertices(self):
        b = self.box
        return [self.frame.point(b.a0, b.b0), self.frame.point(b.a1, b.b0),
                self.frame.point(b.a1, b.b1), self.frame.point(b.a0, b.b1)]

    def translate_box(self, t):
        da, db = self.frame.coords(t[0], t[1])
        return self.box.shifted(da, db)

    def area(self):
        m = self.frame
        jac = abs(float(m.u[0] * m.s[1] - m.u[1] * m.s[0]))
        return float(self.box.area()) * jac


@dataclass
class MarkovPartition:
    rectangles: list
    matrix: list
    frame: EigenFrame = field(repr=False)
    note: str = MODEL_NOTE

    def to_svg(self, path, translates=1, comments=()):
        canvas = SvgCanvas(-translates - 0.5, translates + 1.5, -translates - 0.5, translates + 1.5)
        colors = ["#4c72b0", "#dd8452", "#55a868", "#c44e52"]
        for t in itertools.product(range(-translates, translates + 1), repeat=2):
            for r in self.rectangles:
                pts = [(x + t[0], y + t[1]) for x, y in r.vertices]
                canvas.polygon(pts, stroke=colors[r.id % len(colors)], width=1.0)
        canvas.polygon([(0, 0), (1, 0), (1, 1), (0, 1)], stroke="black", width=2.0)
        canvas.save(path, [self.note, *comments])


def _small_vectors(limit=2):
    vecs = [v for v in itertools.product(range(-limit, limit + 1), repeat=2) if v != (0, 0)]
    return sorted(vecs, key=lambda v: (abs(v[0]) + abs(v[1]), v))


def adler_weiss_partition(matrix=((2, 1), (1, 1))):
    """Two-rectangle Markov partition with edges on eigen-lines through lattice points.

    A lattice basis ``w1, w2`` is chosen with ``w1`` in the first and ``w2``
    in the second quadrant of eigen-coordinates; the rectangles are
    ``[0, a1] x [0, b2]`` and ``[a2, 0] x [b2 - b1, b2]``.  Tiling (disjoint
    interiors of all translates plus total area 1) and the Markov property
    are verified exactly.
    """
    frame = EigenFrame(matrix)
    zero = QSqrt5(0)
    for w1, w2 in itertools.permutations(_small_vectors(), 2):
        if w1[0] * w2[1] - w1[1] * w2[0] not in (1, -1):
            continue
        a1, b1 = frame.coords(*w1)
        a2, b2 = frame.coords(*w2)
        if a1 > 0 and b1 > 0 and a2 < 0 and b2 > 0 and b1 < b2:
            rects = [Rectangle(0, Box(zero, a1, zero, b2), frame),
                     Rectangle(1, Box(a2, zero, b2 - b1, b2), frame)]
            break
    else:
        raise VerificationFailure("no suitable lattice basis for the two-rectangle partition")
    part = MarkovPartition(rects, frame.A, frame)
    verify_tiling(part)
    transition_relation(part)  # raises if the Markov property fails
    return part


def _tag_window(frame, box, target):
    """Integer translations ``t`` for which ``target + t`` may meet ``box``."""
    corners = [frame.point(a, b) for a in (box.a0, box.a1) for b in (box.b0, box.b1)]
    tc = [frame.point(a, b) for a in (target.a0, target.a1) for b in (target.b0, target.b1)]
    xs, ys = [c[0] for c in corners], [c[1] for c in corners]
    txs, tys = [c[0] for c in tc], [c[1] for c in tc]
    xr = range(math.floor(min(xs) - max(txs)) - 1, math.ceil(max(xs) - min(txs)) + 2)
    yr = range(math.floor(min(ys) - max(tys)) - 1, math.ceil(max(ys) - min(tys)) + 2)
    return itertools.product(xr, yr)


def verify_tiling(part):
    """Exact check that translates of the rectangles tile the plane."""
    frame = part.frame
    total = QSqrt5(0)
    jac = frame.u[0] * frame.s[1] - frame.u[1] * frame.s[0]
    for r in part.rectangles:
        total = total + r.box.area() * jac
    if not (total == 1 or total == -1):
        raise VerificationFailure(f"rectangle areas sum to {float(total)}, not 1")
    for r, s in itertools.product(part.rectangles, repeat=2):
        for t in _tag_window(frame, r.box, s.box):
            if r.id == s.id and t == (0, 0):
                continue
            if r.box.open_overlap(s.translate_box(t)):
                raise VerificationFailure(f"rectangles {r.id} and {s.id}+{t} overlap")
    return True


@dataclass(frozen=True)
class Transition:
    source: int
    target: int
    tag: tuple


def image_box(part, rect, matrix=None):
    """Eigen-coordinate box of ``M(R)`` for ``M = A`` (default) or ``A^{-1}``."""
    frame = part.frame
    if matrix is None or np.array_equal(np.asarray(matrix), np.asarray(part.matrix)):
        return rect.box.scaled(frame.lam_u, frame.lam_s)
    inv = np.round(np.linalg.inv(np.asarray(part.matrix, dtype=float))).astype(int)
    if np.array_equal(np.asarray(matrix), inv):
        return rect.box.scaled(1 / frame.lam_u, 1 / frame.lam_s)
    raise PreconditionError("only A and its inverse act on the partition")


def transition_relation(part, matrix=None, check_markov=True):
    """All ``(i, j, t)`` with ``M(R_i)`` meeting the interior of ``R_j + t``.

    With ``check_markov`` every intersection must cross ``R_j + t`` fully in
    the expanding direction and ``M(R_i)`` fully in the contracting one.
    """
    forward = matrix is None or np.array_equal(np.asarray(matrix), np.asarray(part.matrix))
    out = []
    for r in part.rectangles:
        img = image_box(part, r, matrix)
        for s in part.rectangles:
            for t in _tag_window(part.frame, img, s.box):
                tgt = s.translate_box(t)
                if not img.open_overlap(tgt):
                    continue
                if check_markov:
                    cut = img.intersection(tgt)
                    if forward:
                        ok = cut.a0 == tgt.a0 and cut.a1 == tgt.a1 and cut.b0 == img.b0 and cut.b1 == img.b1
                    else:
                        ok = cut.b0 == tgt.b0 and cut.b1 == tgt.b1 and cut.a0 == img.a0 and cut.a1 == img.a1
                    if not ok:
                        raise VerificationFailure(
                            f"image of R{r.id} does not cross R{s.id}+{t} properly")
                out.append(Transition(r.id, s.id, tuple(int(c) for c in t)))
    return out


def successors(relation):
    table = {}
    for tr in relation:
        table.setdefault(tr.source, []).append((tr.target, tr.tag))
    return table


@dataclass(frozen=True)
class Chain:
    """Nodes ``(id, (vx, vy))``; consecutive tags are ``v_{k+1} - v_k``."""

    nodes: tuple

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple((int(i), (int(v[0]), int(v[1])))
                                                for i, v in self.nodes))

    def __len__(self):
        return len(self.nodes) - 1

    @property
    def length(self):
        return len(self.nodes) - 1

    @property
    def translation(self):
        (_, v0), (_, v1) = self.nodes[0], self.nodes[-1]
        return (v1[0] - v0[0], v1[1] - v0[1])

    @property
    def tags(self):
        return [(b[1][0] - a[1][0], b[1][1] - a[1][1]) for a, b in zip(self.nodes, self.nodes[1:])]

    @property
    def ids(self):
        return [i for i, _ in self.nodes]

    @property
    def is_closed(self):
        return self.nodes[0][0] == self.nodes[-1][0]

    def shifted(self, v):
        return Chain([(i, (w[0] + v[0], w[1] + v[1])) for i, w in self.nodes])

    def then(self, other):
        """Concatenate ``other`` translated so that it starts at this chain's end."""
        end_id, end_v = self.nodes[-1]
        start_id, start_v = other.nodes[0]
        if end_id != start_id:
            raise ValueError("chains do not join")
        moved = other.shifted((end_v[0] - start_v[0], end_v[1] - start_v[1]))
        return Chain(self.nodes + moved.nodes[1:])

    def serialize(self):
        return "\n".join(f"{i}:{v[0]},{v[1]}" for i, v in self.nodes)

    @classmethod
    def parse(cls, text):
        nodes = []
        for line in text.strip().splitlines():
            ident, vec = line.split(":")
            vx, vy = vec.split(",")
            nodes.append((int(ident), (int(vx), int(vy))))
        return cls(nodes)


def chain_is_valid(chain, relation):
    allowed = {(t.source, t.target, t.tag) for t in relation}
    return all((a[0], b[0], tag) in allowed
               for a, b, tag in zip(chain.nodes, chain.nodes[1:], chain.tags))


def connecting_chain(relation, start, target, max_len=8, exact=False):
    """Shortest chain from ``start = (id, v)`` to a translate of ``target``.

    With ``exact`` the chain must end at ``target`` itself.  Raises
    :class:`NotFound` when nothing is reached within ``max_len`` steps.
    """
    succ = successors(relation)
    start = (int(start[0]), tuple(start[1]))
    goal_id, goal_v = int(target[0]), tuple(target[1])

    def reached(node):
        return node[0] == goal_id and (not exact or node[1] == goal_v)

    if reached(start):
        return Chain([start])
    prev = {start: None}
    frontier = deque([(start, 0)])
    while frontier:
        node, depth = frontier.popleft()
        if depth >= max_len:
            continue
        for j, tag in succ.get(node[0], ()):
            nxt = (j, (node[1][0] + tag[0], node[1][1] + tag[1]))
            if nxt in prev:
                continue
            prev[nxt] = node
            if reached(nxt):
                path = [nxt]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return Chain(path[::-1])
            frontier.append((nxt, depth + 1))
    raise NotFound(f"no chain of length <= {max_len} from {start} to {target}")


def _strictly_inside_hull(vectors):
    a, b, c = vectors
    area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if area == 0:
        return False
    s = [(q[0] * r[1] - q[1] * r[0]) for q, r in ((a, b), (b, c), (c, a))]
    return all(x * area > 0 for x in s)


def integer_weights(vectors, bound=64):
    """Smallest positive ``(l1, l2, l3)`` (by sum, then lexicographic) with ``sum l_i P_i = 0``."""
    if not _strictly_inside_hull(vectors):
        raise HullConditionFailed("(0,0) is not interior to the hull of the three vectors")
    P = np.asarray(vectors, dtype=np.int64)
    l = np.arange(1, bound + 1)
    l1, l2, l3 = np.meshgrid(l, l, l, indexing="ij")
    sx = l1 * P[0, 0] + l2 * P[1, 0] + l3 * P[2, 0]
    sy = l1 * P[0, 1] + l2 * P[1, 1] + l3 * P[2, 1]
    hits = np.argwhere((sx == 0) & (sy == 0))
    if hits.size == 0:
        raise NoIntegerSolution(f"no positive integer weights up to {bound}")
    order = sorted(map(tuple, hits + 1), key=lambda h: (sum(h), h))
    return tuple(int(v) for v in order[0])


def build_closed_chain(c1, c2, c3, n, bound=64):
    """Closed chain ``Gamma_n``: each loop ``c_i`` repeated ``n l_i`` times, then concatenated.

    The loops must start and end at the same rectangle id.  Returns
    ``(Gamma_n, (l1, l2, l3))``; ``Gamma_n`` has total translation zero and
    length ``n (l1 k1 + l2 k2 + l3 k3)``.
    """
    loops = (c1, c2, c3)
    base = c1.nodes[0][0]
    for c in loops:
        if c.nodes[0][0] != base or c.nodes[-1][0] != base:
            raise ValueError("loops must start and end at the same rectangle")
    weights = integer_weights([c.translation for c in loops], bound)
    out = Chain([c1.nodes[0]])
    for c, w in zip(loops, weights):
        for _ in range(n * w):
            out = out.then(c)
    assert out.translation == (0, 0)
    return out, weights


def _matmul(A, B):
    return [[A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]],
            [A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]]]


def _matvec(A, v):
    return (A[0][0] * v[0] + A[0][1] * v[1], A[1][0] * v[0] + A[1][1] * v[1])


@dataclass(frozen=True)
class PeriodicPoint:
    """Exact periodic point read from a closed chain."""

    x: tuple  # representative in the first rectangle of the chain (Fractions)
    torus: tuple  # the same point reduced modulo Z^2
    period: int
    displacement: tuple  # A^p x - x, an integer vector
    on_boundary: bool


def periodic_from_closed_chain(part, chain):
    """Solve ``(A^p - I) x = sum_k A^{p-1-k} t_k`` exactly and check the itinerary.

    Each ``x_{k+1} = A x_k - t_k`` must lie in the closed rectangle
    ``R_{id_k}``; otherwise :class:`ItineraryMismatch` is raised.
    """
    if not chain.is_closed or chain.length < 1:
        raise ValueError("chain must be closed with positive length")
    A = part.matrix
    p = chain.length
    tags = chain.tags
    S = (0, 0)
    for t in tags:
        S = _matvec(A, S)
        S = (S[0] + t[0], S[1] + t[1])
    Ap = [[1, 0], [0, 1]]
    for _ in range(p):
        Ap = _matmul(A, Ap)
    M = [[Ap[0][0] - 1, Ap[0][1]], [Ap[1][0], Ap[1][1] - 1]]
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    x = (Fraction(M[1][1] * S[0] - M[0][1] * S[1], det),
         Fraction(-M[1][0] * S[0] + M[0][0] * S[1], det))
    rects = {r.id: r for r in part.rectangles}
    cur = x
    boundary = False
    for k, (ident, _) in enumerate(chain.nodes[:-1]):
        where = rects[ident].box.locate(*part.frame.coords(*cur))
        if where == "outside":
            raise ItineraryMismatch(f"orbit leaves R{ident} at step {k}")
        boundary |= where == "boundary"
        nxt = _matvec(A, cur)
        cur = (nxt[0] - tags[k][0], nxt[1] - tags[k][1])
    if cur != x:
        raise ItineraryMismatch("orbit does not close up")
    image = _matvec(Ap, x)
    disp = (image[0] - x[0], image[1] - x[1])
    torus = (x[0] - math.floor(x[0]), x[1] - math.floor(x[1]))
    return PeriodicPoint(x, torus, p, disp, boundary)


def random_closed_chain(relation, length, rng, start=None):
    """Random walk of the given length on the relation, closed back to its first rectangle."""
    succ = successors(relation)
    ids = sorted(succ)
    cur = rng.choice(ids) if start is None else start
    nodes = [(cur, (0, 0))]
    for k in range(length):
        options = succ[nodes[-1][0]]
        if k == length - 1:
            options = [o for o in options if o[0] == nodes[0][0]]
            if not options:
                return None
        j, tag = rng.choice(options)
        v = nodes[-1][1]
        nodes.append((j, (v[0] + tag[0], v[1] + tag[1])))
    return Chain(nodes)


def random_closed_chains(relation, count, max_len=12, seed=0):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        c = random_closed_chain(relation, rng.randint(1, max_len), rng)
        if c is not None:
            out.append(c)
    return out


# Triangle tracks -------------------------------------------------------------------

@dataclass(frozen=True)
class TriangleTrack:
    """Piecewise-affine loop around the triangle ``y, y + n l1 P1, y + n(l1 P1 + l2 P2)``.

    The three sides take ``n l_i k_i`` units of time, so the period is
    ``p_n = n (l1 k1 + l2 k2 + l3 k3)`` and the loop closes because
    ``sum l_i P_i = 0``.
    """

    y: tuple
    vectors: tuple
    weights: tuple
    periods: tuple
    n: int

    def __post_init__(self):
        tot = np.sum([np.multiply(w, v) for w, v in zip(self.weights, self.vectors)], axis=0)
        if np.any(np.abs(tot) > 1e-12):
            raise ValueError("weighted vectors must sum to zero")

    @property
    def vertices(self):
        y = np.asarray(self.y, dtype=float)
        P = np.asarray(self.vectors, dtype=float)
        l = self.weights
        return np.array([y, y + self.n * l[0] * P[0], y + self.n * (l[0] * P[0] + l[1] * P[1])])

    @property
    def breakpoints(self):
        l, k, n = self.weights, self.periods, self.n
        return (0, n * l[0] * k[0], n * (l[0] * k[0] + l[1] * k[1]),
                n * (l[0] * k[0] + l[1] * k[1] + l[2] * k[2]))

    @property
    def period(self):
        return self.breakpoints[-1]

    def __call__(self, t):
        t = np.mod(np.asarray(t, dtype=float), self.period)
        v = self.vertices
        ends = np.vstack([v, v[:1]])
        bp = np.asarray(self.breakpoints, dtype=float)
        seg = np.clip(np.searchsorted(bp, t, side="right") - 1, 0, 2)
        frac = (t - bp[seg]) / (bp[seg + 1] - bp[seg])
        return ends[seg] + frac[:, None] * (ends[seg + 1] - ends[seg])

    def boundary_distance(self, pts):
        """Signed distance to the triangle boundary (positive inside)."""
        from .rotset import convex_hull, signed_margin

        hull = convex_hull(self.vertices)
        return np.array([signed_margin(p, hull) for p in np.asarray(pts).reshape(-1, 2)])


@dataclass(frozen=True)
class ShadowReport:
    D: float
    boundary_margin: float


def triangle_shadow_check(times, orbit, track, interior_orbit=None):
    """Max distance between orbit samples and the time-matched track points.

    ``boundary_margin`` is the smallest distance from ``interior_orbit`` to
    the triangle boundary (NaN when no interior orbit is given).
    """
    times = np.asarray(times, dtype=float)
    orbit = np.asarray(orbit, dtype=float).reshape(-1, 2)
    D = float(np.max(np.linalg.norm(orbit - track(times), axis=1)))
    margin = float("nan")
    if interior_orbit is not None:
        margin = float(np.min(track.boundary_distance(interior_orbit)))
    return ShadowReport(D, margin)


def triangle_linking_check(track, interior):
    """Linking of a constant interior point with the track over one period (``+-1/p_n``)."""
    p = np.asarray(interior, dtype=float)
    if track.boundary_distance(p)[0] <= 0:
        raise PointNotInterior(f"{tuple(p)} is not strictly inside the triangle")
    const = lambda t: np.broadcast_to(p, (len(np.atleast_1d(t)), 2))
    return linking_curves(const, track, T=track.period).value


def assemble_triangle_orbit(isotopy, starts, track, samples_per_unit=8):
    """Concatenate cover trajectories of periodic points along the three sides of a track.

    ``starts[i]`` is a periodic point realizing ``track.vectors[i]`` with period
    ``track.periods[i]``.  Side ``i`` follows the trajectory of ``starts[i]``,
    shifted by the integer vector that brings it closest to the current
    position, for ``n l_i k_i`` time units.  One period is integrated and the
    rest is tiled with ``x(s + m k) = x(s) + m v``, since integrating a
    hyperbolic orbit for many periods amplifies rounding error exponentially.
    Returns ``(times, points)``.
    """
    bp = track.breakpoints
    pos = np.asarray(track.y, dtype=float)
    times, pts = [], []
    for i in range(3):
        z = np.asarray(starts[i], dtype=float)
        k = int(track.periods[i])
        v = np.asarray(track.vectors[i], dtype=float)
        shift = np.round(pos - z)
        span = bp[i + 1] - bp[i]
        local = np.arange(span * samples_per_unit + (1 if i == 2 else 0)) / samples_per_unit
        laps = np.floor(local / k + 1e-12)
        rest = np.maximum(local - laps * k, 0.0)
        seg = isotopy.eval_many(rest, np.tile(z + shift, (len(local), 1)), with_jacobian=False)[0]
        seg = seg + laps[:, None] * v
        times.append(bp[i] + local)
        pts.append(seg)
        pos = z + shift + (span // k) * v
    return np.concatenate(times), np.concatenate(pts)
