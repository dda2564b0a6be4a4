"""Radial Hamiltonian isotopies of the disc and the action of their fixed points.

A profile ``h`` (a function of ``s = r^2``) generates the autonomous field
``X = 2 h'(r^2) (-y, x)``: each circle turns at ``h'(r^2) / pi`` turns per
unit time.  The Hamiltonian is ``H(p) = h(|p|^2)`` and the action of a point
fixed by the whole isotopy is ``-integral_0^1 H(x) dt`` plus the integral of
the primitive ``(x dy - y dx) / 2`` along the (constant) loop ``t -> f_t(x)``.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.integrate import quad

from .errors import NoCandidateAboveTol, NotFixed, PreconditionError
from .lift import DEFAULT_SAMPLES, DEFAULT_TOL, separation_totals
from .maps import DISC, RadialTwistIsotopy, as_points, radial_twist_flow
from .sampling import make_rng, uniform_disc

DISC_AREA = math.pi
FIXED_TOL = 1e-10
QUAD_TOL = 1e-10


class HamiltonianProfile:
    """``s -> h(s)`` on ``[0, 1]`` with first and second derivatives.

    The callables must accept numpy arrays.  Profiles vanish together with
    their derivative at ``s = 1`` (checked on construction).
    """

    def __init__(self, h, dh, d2h, name="custom", check=True):
        self.h = h
        self.dh = dh
        self.d2h = d2h
        self.name = name
        self.autonomous = True
        if check:
            self.check()

    def check(self, tol=1e-12):
        one = np.array([1.0])
        if abs(float(self.h(one)[0])) > tol or abs(float(self.dh(one)[0])) > tol:
            raise PreconditionError(f"profile {self.name!r} must satisfy h(1) = h'(1) = 0")

    def __call__(self, s):
        return self.h(np.asarray(s, dtype=float))

    def scaled(self, lam):
        lam = float(lam)
        return HamiltonianProfile(lambda s: lam * self.h(s), lambda s: lam * self.dh(s),
                                  lambda s: lam * self.d2h(s), f"{lam:g}*{self.name}")

    def __add__(self, other):
        return HamiltonianProfile(lambda s: self.h(s) + other.h(s),
                                  lambda s: self.dh(s) + other.dh(s),
                                  lambda s: self.d2h(s) + other.d2h(s),
                                  f"{self.name}+{other.name}")

    def angular_speed(self, r):
        """Rotation speed of the circle of radius ``r``, in turns per unit time."""
        return self.dh(np.asarray(r, dtype=float) ** 2) / math.pi

    def hamiltonian(self, pts):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        return self.h(np.einsum("ij,ij->i", pts, pts))


def cubic_profile(lam=1.0):
    """``h(s) = lam (1 - s)^3``."""
    base = HamiltonianProfile(lambda s: (1.0 - s) ** 3, lambda s: -3.0 * (1.0 - s) ** 2,
                              lambda s: 6.0 * (1.0 - s), "cubic")
    return base if lam == 1.0 else base.scaled(lam)


def bump_profile(support, amplitude=1.0):
    """``amplitude * (1 - s/support)^3`` for ``s < support``, zero beyond."""
    c, w = float(amplitude), float(support)
    if not 0 < w <= 1:
        raise ValueError("support must lie in (0, 1]")

    def h(s):
        return c * np.clip(1.0 - s / w, 0.0, None) ** 3

    def dh(s):
        return -3.0 * c / w * np.clip(1.0 - s / w, 0.0, None) ** 2

    def d2h(s):
        return 6.0 * c / w ** 2 * np.clip(1.0 - s / w, 0.0, None)

    return HamiltonianProfile(h, dh, d2h, f"bump({w:g},{c:g})")


def ring_profile(lam=1.0):
    """``h(s) = lam s^2 (1 - s)^3``: the centre and the boundary circle are at rest."""
    c = float(lam)

    def h(s):
        return c * s ** 2 * (1.0 - s) ** 3

    def dh(s):
        return c * s * (1.0 - s) ** 2 * (2.0 - 5.0 * s)

    def d2h(s):
        return c * (1.0 - s) * (2.0 - 16.0 * s + 20.0 * s ** 2)

    return HamiltonianProfile(h, dh, d2h, "ring" if c == 1.0 else f"{c:g}*ring")


def zero_profile():
    zero = np.zeros_like
    return HamiltonianProfile(lambda s: zero(s), lambda s: zero(s), lambda s: zero(s), "zero")


def profile_by_name(name, lam=1.0):
    makers = {"cubic": cubic_profile, "ring": ring_profile, "zero": lambda lam: zero_profile()}
    if name not in makers:
        raise PreconditionError(f"unknown profile {name!r}; known: {sorted(makers)}")
    return makers[name](lam)


def hamiltonian_isotopy(profile, representation="closed", time_step=1e-3):
    """Isotopy generated by ``X = 2 h'(r^2) (-y, x)`` on the unit disc.

    ``representation="closed"`` uses the exact rotation of each circle;
    ``"flow"`` integrates the field.  The profile is attached as ``.profile``.
    """

    def rate(s):
        return 2.0 * profile.dh(s)

    def rate_derivative(s):
        return 2.0 * profile.d2h(s)

    if representation == "closed":
        iso = RadialTwistIsotopy(rate, rate_derivative, surface=DISC)
    elif representation == "flow":
        iso = radial_twist_flow(rate, rate_derivative, surface=DISC, time_step=time_step)
    else:
        raise ValueError(f"unknown representation {representation!r}")
    iso.profile = profile
    return iso


@dataclass(frozen=True)
class ActionValue:
    value: float
    loop_term: float
    hamiltonian_term: float
    primitive_choice: str = "(x dy - y dx)/2"


def standard_primitive(pts):
    """Coefficients ``(a, b)`` of ``lambda = a dx + b dy = (x dy - y dx)/2``."""
    return np.column_stack([-0.5 * pts[:, 1], 0.5 * pts[:, 0]])


def symplectic_action(isotopy, x, profile=None, primitive=standard_primitive, loop_samples=65):
    """Action of a point fixed by every ``f_t``, ``t`` in ``[0, 1]``.

    The loop term integrates ``primitive`` along the sampled loop
    ``t -> f_t(x)`` (trapezoid rule on finite-difference velocities); for a
    fixed point it vanishes whatever the primitive.  The Hamiltonian term is
    ``-integral_0^1 H(f_t(x)) dt`` by adaptive quadrature.
    """
    profile = profile if profile is not None else isotopy.profile
    x = as_points(x)[0][0]
    ts = np.linspace(0.0, 1.0, loop_samples)
    loop = isotopy.eval_many(ts, np.tile(x, (loop_samples, 1)), with_jacobian=False)[0]
    drift = float(np.max(np.linalg.norm(loop - x, axis=1)))
    if drift > FIXED_TOL:
        raise NotFixed(f"point moves by {drift:.3g} under the isotopy")
    coef = primitive(loop)
    vel = np.gradient(loop, ts, axis=0)
    integrand = np.einsum("ij,ij->i", coef, vel)
    loop_term = float(np.sum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(ts)))

    def h_along(t):
        p = isotopy.eval(t, x)
        return float(profile.hamiltonian(p)[0])

    ham, _ = quad(h_along, 0.0, 1.0, epsabs=QUAD_TOL, epsrel=QUAD_TOL)
    return ActionValue(loop_term - ham, loop_term, -ham)


@dataclass(frozen=True)
class AverageLinking:
    """Monte-Carlo integrals of ``Linking_n(x0, .)`` and ``Linking_1(x0, .)`` over the disc area."""

    mean_n: float
    mean_1: float
    stderr_n: float
    stderr_1: float
    n: int
    samples: int
    resampled: int
    values_n: np.ndarray = field(repr=False, default=None)


def average_linking(isotopy, x0, n, N, seed=0, guard=1e-9, tol=DEFAULT_TOL,
                    samples_per_unit=DEFAULT_SAMPLES):
    """Area integrals (mass ``pi``) of the linking with a fixed point ``x0``.

    Points are drawn uniformly in the unit disc from a counter-based stream;
    draws within ``guard`` of ``x0`` are replaced and counted.
    """
    if N < 100:
        raise ValueError("N must be at least 100")
    x0 = as_points(x0)[0][0]
    fx = isotopy.apply(x0)
    if np.linalg.norm(fx - x0) > FIXED_TOL:
        raise NotFixed("x0 is not fixed by f")
    rng = make_rng(seed)
    pts = uniform_disc(rng, int(N))
    resampled = 0
    while True:
        close = np.linalg.norm(pts - x0, axis=1) < guard
        if not close.any():
            break
        resampled += int(close.sum())
        pts[close] = uniform_disc(rng, int(close.sum()))
    base = np.broadcast_to(x0, pts.shape)
    ln = separation_totals(isotopy, base, pts, n, tol, samples_per_unit)[0] / n
    l1 = separation_totals(isotopy, base, pts, 1, tol, samples_per_unit)[0]
    vn = DISC_AREA * ln
    v1 = DISC_AREA * l1
    root = math.sqrt(len(pts))
    return AverageLinking(float(vn.mean()), float(v1.mean()), float(vn.std(ddof=1) / root),
                          float(v1.std(ddof=1) / root), int(n), int(N), resampled, vn)


def radial_average_linking(profile):
    """Closed-form fast path for radial profiles: ``integral_0^1 2 r h'(r^2) dr``."""
    val, _ = quad(lambda r: 2.0 * r * float(profile.dh(np.array([r * r]))[0]), 0.0, 1.0,
                  epsabs=QUAD_TOL, epsrel=QUAD_TOL)
    return val


def find_nonzero_action_fixed_point(isotopy, candidates, tol=1e-6, profile=None):
    """The candidate fixed point with the largest ``|action|``.

    Returns ``(point, ActionValue, all actions)``; raises
    :class:`NoCandidateAboveTol` when every ``|action|`` is below ``tol``.
    """
    pts = [as_points(c)[0][0] for c in candidates]
    if not pts:
        raise ValueError("no candidates")
    actions = [symplectic_action(isotopy, p, profile) for p in pts]
    mags = [abs(a.value) for a in actions]
    best = int(np.argmax(mags))
    if mags[best] < tol:
        raise NoCandidateAboveTol(f"all {len(pts)} candidates have |action| < {tol:g}")
    return tuple(map(float, pts[best])), actions[best], actions
