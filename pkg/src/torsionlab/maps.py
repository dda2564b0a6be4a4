"""Surface models, plane maps and isotopies.

Everything here works in cover coordinates: a torus or annulus point is a
point of the plane, and the maps commute with the integer translations of the
surface.  Angles are measured in turns.

An :class:`Isotopy` only has to describe ``f_t`` for ``t`` in ``[0, 1]``
through :meth:`Isotopy.unit`; the extension to all ``t >= 0`` follows the
rule ``f_t = f_{t - floor(t)} o f^{floor(t)}``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ConfigError, IntegrationFailure

TWO_PI = 2.0 * np.pi
_EYE = np.eye(2)


@dataclass(frozen=True)
class SurfaceModel:
    """One of the four surfaces handled by the package.

    ``kind`` is ``"plane"``, ``"disc"`` (open unit disc), ``"annulus"``
    (R/Z x R) or ``"torus"`` (R^2/Z^2).
    """

    kind: str

    def __post_init__(self):
        if self.kind not in ("plane", "disc", "annulus", "torus"):
            raise ValueError(f"unknown surface kind {self.kind!r}")

    @property
    def translations(self):
        """Integer deck translations acting on the cover."""
        return {
            "plane": (),
            "disc": (),
            "annulus": ((1, 0),),
            "torus": ((1, 0), (0, 1)),
        }[self.kind]

    def contains(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        ok = np.all(np.isfinite(pts), axis=1)
        if self.kind == "disc":
            ok &= np.einsum("ij,ij->i", pts, pts) < 1.0
        return ok


PLANE = SurfaceModel("plane")
DISC = SurfaceModel("disc")
ANNULUS = SurfaceModel("annulus")
TORUS = SurfaceModel("torus")


@dataclass(frozen=True)
class UnitTangent:
    """A unit tangent vector, stored as a base point and a direction in turns."""

    base: tuple
    direction: float

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(float(c) for c in self.base))
        object.__setattr__(self, "direction", float(self.direction) % 1.0)

    @classmethod
    def from_vector(cls, base, vector):
        vx, vy = vector
        if vx == 0 and vy == 0:
            raise ValueError("zero tangent vector")
        return cls(base, math.atan2(vy, vx) / TWO_PI)

    @property
    def vector(self):
        a = TWO_PI * self.direction
        return np.array([math.cos(a), math.sin(a)])


def as_points(p):
    """Return ``(array of shape (N, 2), single)`` for one point or a batch."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 1:
        if arr.shape != (2,):
            raise ValueError(f"expected a 2-vector, got shape {arr.shape}")
        return arr.reshape(1, 2), True
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected points of shape (N, 2), got {arr.shape}")
    return arr, False


def rotation_matrices(theta):
    """Stack of rotation matrices for angles ``theta`` in radians."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    out = np.empty(theta.shape + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def _identity_stack(n):
    return np.broadcast_to(_EYE, (n, 2, 2)).copy()


def _matvec(m, v):
    return np.einsum("nij,nj->ni", m, v)


class SurfaceMap:
    """A diffeomorphism of the plane in cover coordinates.

    Subclasses provide :meth:`step`, returning the image points together with
    the differential at the input points.
    """

    surface = PLANE

    def step(self, pts):
        raise NotImplementedError

    def apply(self, p):
        pts, single = as_points(p)
        out = self.step(pts)[0]
        return out[0] if single else out

    def differential(self, p):
        pts, single = as_points(p)
        out = self.step(pts)[1]
        return out[0] if single else out

    def iterate(self, p, n):
        """``f^n(p)`` without storing the intermediate orbit."""
        pts, single = as_points(p)
        cur = pts.copy()
        for _ in range(int(n)):
            cur = self.apply(cur)
        return cur[0] if single else cur

    def orbit(self, p, n):
        """``(p, f(p), ..., f^n(p))``; shape ``(n+1, 2)`` or ``(N, n+1, 2)``."""
        pts, single = as_points(p)
        out = np.empty((len(pts), int(n) + 1, 2))
        out[:, 0] = pts
        for k in range(int(n)):
            out[:, k + 1] = self.apply(out[:, k])
        return out[0] if single else out


class LinearMap(SurfaceMap):
    """``p -> M p`` for a fixed 2x2 matrix (e.g. a toral automorphism)."""

    def __init__(self, matrix, surface=PLANE):
        self.matrix = np.asarray(matrix, dtype=float)
        self.surface = surface

    def step(self, pts):
        pts = np.asarray(pts, dtype=float)
        return pts @ self.matrix.T, np.broadcast_to(self.matrix, (len(pts), 2, 2)).copy()


class FunctionMap(SurfaceMap):
    """A map given by vectorised callables for the values and differential."""

    def __init__(self, func, jac, surface=PLANE):
        self.func = func
        self.jac = jac
        self.surface = surface

    def step(self, pts):
        pts = np.asarray(pts, dtype=float)
        return self.func(pts), self.jac(pts)


class Isotopy(SurfaceMap):
    """A family ``(f_t)`` joining the identity to ``f = f_1``.

    Subclasses implement :meth:`unit` for ``tau`` in ``[0, 1]`` (one value per
    point).  Instances are immutable after construction.
    """

    area_preserving = False

    def unit(self, tau, pts):
        """Return ``(f_tau(pts), df_tau(pts))`` for ``tau`` in ``[0, 1]``."""
        raise NotImplementedError

    def unit_points(self, tau, pts):
        return self.unit(tau, pts)[0]

    def step(self, pts):
        pts = np.asarray(pts, dtype=float)
        return self.unit(np.ones(len(pts)), pts)

    def apply(self, p):
        pts, single = as_points(p)
        out = self.unit_points(np.ones(len(pts)), pts)
        return out[0] if single else out

    def eval_many(self, times, pts, with_jacobian=True):
        """Evaluate ``f_{t_i}(p_i)`` (and ``df_{t_i}(p_i)``) for paired inputs."""
        times = np.asarray(times, dtype=float)
        pts = np.asarray(pts, dtype=float)
        if times.shape != (len(pts),):
            times = np.broadcast_to(times, (len(pts),)).astype(float)
        if not np.all(np.isfinite(times)):
            raise ValueError("times must be finite")
        if np.any(times < 0):
            raise ValueError("negative times are not supported")
        whole = np.floor(times).astype(np.int64)
        tau = times - whole
        cur = pts.copy()
        jac = _identity_stack(len(pts)) if with_jacobian else None
        top = int(whole.max()) if len(whole) else 0
        for j in range(top):
            mask = whole > j
            if with_jacobian:
                nxt, d = self.step(cur[mask])
                jac[mask] = d @ jac[mask]
            else:
                nxt = self.unit_points(np.ones(int(mask.sum())), cur[mask])
            cur[mask] = nxt
        if with_jacobian:
            p, d = self.unit(tau, cur)
            return p, d @ jac
        return self.unit_points(tau, cur), None

    def eval(self, t, p):
        """``f_t(p)`` with the iterate extension rule."""
        pts, single = as_points(p)
        out = self.eval_many(np.full(len(pts), float(t)), pts, with_jacobian=False)[0]
        return out[0] if single else out

    def jacobian(self, t, p):
        """``df_t(p)``."""
        pts, single = as_points(p)
        out = self.eval_many(np.full(len(pts), float(t)), pts)[1]
        return out[0] if single else out

    def velocity(self, t, p, h=1e-6):
        """Time derivative of ``t -> f_t(p)`` by central differences."""
        lo = max(t - h, 0.0)
        return (self.eval(t + h, p) - self.eval(lo, p)) / (t + h - lo)


class IdentityIsotopy(Isotopy):
    area_preserving = True

    def __init__(self, surface=PLANE):
        self.surface = surface

    def unit(self, tau, pts):
        pts = np.asarray(pts, dtype=float)
        return pts.copy(), _identity_stack(len(pts))


class TranslationIsotopy(Isotopy):
    """``f_t(p) = p + t v``; a rigid rotation of the annulus or torus."""

    area_preserving = True

    def __init__(self, vector, surface=PLANE):
        self.vector = np.asarray(vector, dtype=float)
        self.surface = surface

    def unit(self, tau, pts):
        pts = np.asarray(pts, dtype=float)
        tau = np.asarray(tau, dtype=float)
        return pts + tau[:, None] * self.vector, _identity_stack(len(pts))


class RotationIsotopy(Isotopy):
    """Rigid rotation about ``center`` at ``omega`` turns per unit time."""

    area_preserving = True

    def __init__(self, omega, center=(0.0, 0.0), surface=PLANE):
        self.omega = float(omega)
        self.center = np.asarray(center, dtype=float)
        self.surface = surface

    def unit(self, tau, pts):
        pts = np.asarray(pts, dtype=float)
        rot = rotation_matrices(TWO_PI * self.omega * np.asarray(tau, dtype=float))
        return self.center + _matvec(rot, pts - self.center), rot


class LinearPathIsotopy(Isotopy):
    """``f_t = (1 - t) Id + t M``; with ``M = [[1, 1], [0, 1]]`` this is the shear ``[[1, t], [0, 1]]``."""

    def __init__(self, matrix, surface=PLANE):
        self.matrix = np.asarray(matrix, dtype=float)
        self.surface = surface
        self.area_preserving = bool(np.allclose(self.matrix, [[1, self.matrix[0, 1]], [0, 1]]))

    def unit(self, tau, pts):
        pts = np.asarray(pts, dtype=float)
        tau = np.asarray(tau, dtype=float)[:, None, None]
        mats = (1.0 - tau) * _EYE + tau * self.matrix
        return _matvec(mats, pts), mats


def linear_shear(k=1.0):
    """The isotopy ``f_t = [[1, k t], [0, 1]]``."""
    return LinearPathIsotopy([[1.0, float(k)], [0.0, 1.0]])


class HorizontalShear(Isotopy):
    """``f_t(x, y) = (x + t a sin(2 pi y), y)`` on the torus."""

    area_preserving = True
    surface = TORUS

    def __init__(self, a):
        self.a = float(a)

    def unit(self, tau, pts):
        pts = np.asarray(pts, dtype=float)
        tau = np.asarray(tau, dtype=float)
        arg = TWO_PI * pts[:, 1]
        out = pts.copy()
        out[:, 0] += tau * self.a * np.sin(arg)
        jac = _identity_stack(len(pts))
        jac[:, 0, 1] = tau * self.a * TWO_PI * np.cos(arg)
        return out, jac


class VerticalShear(Isotopy):
    """``f_t(x, y) = (x, y + t b sin(2 pi x))`` on the torus."""

    area_preserving = True
    surface = TORUS

    def __init__(self, b):
        self.b = float(b)

    def unit(self, tau, pts):
        pts = np.asarray(pts, dtype=float)
        tau = np.asarray(tau, dtype=float)
        arg = TWO_PI * pts[:, 0]
        out = pts.copy()
        out[:, 1] += tau * self.b * np.sin(arg)
        jac = _identity_stack(len(pts))
        jac[:, 1, 0] = tau * self.b * TWO_PI * np.cos(arg)
        return out, jac


class Concatenation(Isotopy):
    """Run ``first`` on ``[0, 1/2]`` then ``second`` on ``[1/2, 1]`` (both at double speed)."""

    def __init__(self, first, second):
        self.first = first
        self.second = second
        self.surface = first.surface
        self.area_preserving = first.area_preserving and second.area_preserving

    def unit(self, tau, pts):
        pts = np.asarray(pts, dtype=float)
        tau = np.asarray(tau, dtype=float)
        late = tau > 0.5
        early_tau = np.where(late, 1.0, 2.0 * tau)
        p, jac = self.first.unit(early_tau, pts)
        if np.any(late):
            q, d = self.second.unit(2.0 * tau[late] - 1.0, p[late])
            p[late] = q
            jac[late] = d @ jac[late]
        return p, jac

    def unit_points(self, tau, pts):
        pts = np.asarray(pts, dtype=float)
        tau = np.asarray(tau, dtype=float)
        late = tau > 0.5
        p = self.first.unit_points(np.where(late, 1.0, 2.0 * tau), pts)
        if np.any(late):
            p[late] = self.second.unit_points(2.0 * tau[late] - 1.0, p[late])
        return p


class FlowIsotopy(Isotopy):
    """Flow of a time-dependent vector field, integrated with fixed-step RK4.

    ``field(t, pts)`` returns the velocities (shape ``(N, 2)``) and
    ``field_derivative(t, pts)`` their spatial Jacobians (``(N, 2, 2)``); ``t``
    is an array with one time per point.  The differential is obtained from
    the variational equation, integrated on the same steps.
    """

    def __init__(self, field, field_derivative, surface=PLANE, time_step=1e-3,
                 area_preserving=False):
        if not time_step > 0:
            raise ValueError("time_step must be positive")
        self.field = field
        self.field_derivative = field_derivative
        self.surface = surface
        self.time_step = float(time_step)
        self.area_preserving = area_preserving

    def unit(self, tau, pts):
        return self._integrate(tau, pts, True)

    def unit_points(self, tau, pts):
        return self._integrate(tau, pts, False)[0]

    def _integrate(self, tau, pts, with_jacobian):
        x = np.array(pts, dtype=float)
        tau = np.asarray(tau, dtype=float)
        n = len(x)
        jac = _identity_stack(n) if with_jacobian else None
        if n == 0:
            return x, jac
        steps = max(1, int(math.ceil(float(tau.max()) / self.time_step - 1e-9)))
        dt = tau / steps
        t = np.zeros(n)
        f, df = self.field, self.field_derivative
        for _ in range(steps):
            h = dt[:, None]
            t_mid = t + 0.5 * dt
            t_end = t + dt
            k1 = f(t, x)
            k2 = f(t_mid, x + 0.5 * h * k1)
            k3 = f(t_mid, x + 0.5 * h * k2)
            k4 = f(t_end, x + h * k3)
            if with_jacobian:
                hh = dt[:, None, None]
                m1 = df(t, x) @ jac
                m2 = df(t_mid, x + 0.5 * h * k1) @ (jac + 0.5 * hh * m1)
                m3 = df(t_mid, x + 0.5 * h * k2) @ (jac + 0.5 * hh * m2)
                m4 = df(t_end, x + h * k3) @ (jac + hh * m3)
                jac = jac + hh / 6.0 * (m1 + 2 * m2 + 2 * m3 + m4)
            x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            t = t_end
            bad = ~np.all(np.isfinite(x), axis=1)
            if self.surface.kind == "disc":
                bad |= np.einsum("ij,ij->i", x, x) >= 1.0 + 1e-9
            if np.any(bad):
                raise IntegrationFailure("flow diverged or left the domain", float(t[bad][0]))
        return x, jac


class DoubleShear(Concatenation):
    """Horizontal shear by ``a sin(2 pi y)`` on ``[0, 1/2]``, then vertical shear by ``b sin(2 pi x)``.

    With ``representation="flow"`` both halves are integrated as vector-field
    flows instead of being evaluated in closed form.
    """

    def __init__(self, a, b, representation="closed", time_step=1e-3):
        self.a = float(a)
        self.b = float(b)
        self.representation = representation
        if representation == "closed":
            first, second = HorizontalShear(a), VerticalShear(b)
        elif representation == "flow":
            first = FlowIsotopy(*_shear_field(self.a, 0), surface=TORUS,
                                time_step=time_step, area_preserving=True)
            second = FlowIsotopy(*_shear_field(self.b, 1), surface=TORUS,
                                 time_step=time_step, area_preserving=True)
        else:
            raise ValueError(f"unknown representation {representation!r}")
        super().__init__(first, second)

    def apply(self, p):
        if self.representation != "closed":
            return super().apply(p)
        pts, single = as_points(p)
        x = pts[:, 0] + self.a * np.sin(TWO_PI * pts[:, 1])
        y = pts[:, 1] + self.b * np.sin(TWO_PI * x)
        out = np.column_stack([x, y])
        return out[0] if single else out


def _shear_field(amp, axis):
    """Autonomous field moving coordinate ``axis`` by ``amp sin(2 pi other)``."""
    other = 1 - axis

    def field(t, x):
        v = np.zeros_like(x)
        v[:, axis] = amp * np.sin(TWO_PI * x[:, other])
        return v

    def field_derivative(t, x):
        d = np.zeros((len(x), 2, 2))
        d[:, axis, other] = amp * TWO_PI * np.cos(TWO_PI * x[:, other])
        return d

    return field, field_derivative


class RadialTwistIsotopy(Isotopy):
    """Rotation of each circle ``|p| = r`` by ``rate(r^2) t`` radians, in closed form.

    ``rate`` and ``rate_derivative`` are functions of ``s = r^2``.  This is the
    exact time-``t`` map of the field ``rate(|p|^2) (-y, x)``.
    """

    area_preserving = True

    def __init__(self, rate, rate_derivative, surface=DISC):
        self.rate = rate
        self.rate_derivative = rate_derivative
        self.surface = surface

    def unit(self, tau, pts):
        pts = np.asarray(pts, dtype=float)
        tau = np.asarray(tau, dtype=float)
        s = np.einsum("ij,ij->i", pts, pts)
        rot = rotation_matrices(self.rate(s) * tau)
        # d/dp [R(theta(p)) p] = R (I + (J p) grad(theta)^T), grad(theta) = 2 tau rate'(s) p
        jp = np.column_stack([-pts[:, 1], pts[:, 0]])
        coef = 2.0 * tau * self.rate_derivative(s)
        inner = _EYE + coef[:, None, None] * jp[:, :, None] * pts[:, None, :]
        return _matvec(rot, pts), rot @ inner

    def unit_points(self, tau, pts):
        pts = np.asarray(pts, dtype=float)
        s = np.einsum("ij,ij->i", pts, pts)
        rot = rotation_matrices(self.rate(s) * np.asarray(tau, dtype=float))
        return _matvec(rot, pts)


def radial_twist_flow(rate, rate_derivative, surface=DISC, time_step=1e-3):
    """The same twist as :class:`RadialTwistIsotopy`, as an integrated flow."""

    def field(t, x):
        s = np.einsum("ij,ij->i", x, x)
        w = rate(s)
        return np.column_stack([-w * x[:, 1], w * x[:, 0]])

    def field_derivative(t, x):
        s = np.einsum("ij,ij->i", x, x)
        w = rate(s)
        dw = rate_derivative(s)
        jx = np.column_stack([-x[:, 1], x[:, 0]])
        d = 2.0 * dw[:, None, None] * jx[:, :, None] * x[:, None, :]
        d[:, 0, 1] -= w
        d[:, 1, 0] += w
        return d

    return FlowIsotopy(field, field_derivative, surface=surface, time_step=time_step,
                       area_preserving=True)


class IterateIsotopy(Isotopy):
    """``g_t = f_{q t} - t v`` so that ``g = f^q - v``.

    Orbits are read off the orbit of ``f`` and shifted by multiples of ``v``,
    which keeps identities between ``g`` and ``f`` exact.
    """

    def __init__(self, base, q, shift=(0, 0)):
        if int(q) < 1:
            raise ValueError("q must be a positive integer")
        self.base = base
        self.q = int(q)
        self.shift = np.asarray(shift, dtype=float)
        self.surface = base.surface
        self.area_preserving = getattr(base, "area_preserving", False)

    def unit(self, tau, pts):
        tau = np.asarray(tau, dtype=float)
        p, jac = self.base.eval_many(self.q * tau, pts)
        return p - tau[:, None] * self.shift, jac

    def unit_points(self, tau, pts):
        tau = np.asarray(tau, dtype=float)
        p, _ = self.base.eval_many(self.q * tau, pts, with_jacobian=False)
        return p - tau[:, None] * self.shift

    def iterate(self, p, n):
        return self.base.iterate(p, self.q * int(n)) - int(n) * self.shift

    def orbit(self, p, n):
        n = int(n)
        full = self.base.orbit(p, self.q * n)
        k = np.arange(n + 1)[:, None] * self.shift
        return full[..., :: self.q, :] - k


class IterateMap(SurfaceMap):
    """``g = f^q - v`` for a plain map ``f``; orbits are taken from ``f``."""

    def __init__(self, base, q, shift=(0, 0)):
        if int(q) < 1:
            raise ValueError("q must be a positive integer")
        self.base = base
        self.q = int(q)
        self.shift = np.asarray(shift, dtype=float)
        self.surface = base.surface

    def step(self, pts):
        cur = np.asarray(pts, dtype=float)
        jac = _identity_stack(len(cur))
        for _ in range(self.q):
            cur, d = self.base.step(cur)
            jac = d @ jac
        return cur - self.shift, jac

    def iterate(self, p, n):
        return self.base.iterate(p, self.q * int(n)) - int(n) * self.shift

    def orbit(self, p, n):
        n = int(n)
        full = self.base.orbit(p, self.q * n)
        k = np.arange(n + 1)[:, None] * self.shift
        return full[..., :: self.q, :] - k


def orbit_lift(fmap, p, n):
    """Cover orbit ``(p, f(p), ..., f^n(p))`` without reduction modulo the deck group."""
    if int(n) < 1:
        raise ValueError("n must be a positive integer")
    return fmap.orbit(p, n)


def iterate_extension(base, q, shift=(0, 0)):
    """``f^q - shift`` as an isotopy when ``base`` is one, else as a plain map."""
    if isinstance(base, Isotopy):
        return IterateIsotopy(base, q, shift)
    return IterateMap(base, q, shift)


class ConjugatedIsotopy(Isotopy):
    """``M o f_t o M^{-1}`` for a fixed invertible matrix ``M`` (e.g. a reflection)."""

    def __init__(self, base, matrix):
        self.base = base
        self.matrix = np.asarray(matrix, dtype=float)
        self.inverse = np.linalg.inv(self.matrix)
        self.surface = base.surface
        self.area_preserving = getattr(base, "area_preserving", False)

    def unit(self, tau, pts):
        pts = np.asarray(pts, dtype=float)
        p, jac = self.base.unit(tau, pts @ self.inverse.T)
        return p @ self.matrix.T, self.matrix @ jac @ self.inverse

    def unit_points(self, tau, pts):
        pts = np.asarray(pts, dtype=float)
        return self.base.unit_points(tau, pts @ self.inverse.T) @ self.matrix.T


REFLECTION = np.array([[1.0, 0.0], [0.0, -1.0]])


def reflected(isotopy):
    """Conjugate by ``(x, y) -> (x, -y)``; torsion and linking change sign."""
    return ConjugatedIsotopy(isotopy, REFLECTION)


CAT_MATRIX = np.array([[2, 1], [1, 1]])


def cat_map():
    """The linear toral automorphism ``[[2, 1], [1, 1]]`` as a plain map."""
    return LinearMap(CAT_MATRIX, surface=TORUS)


def _parse_params(text):
    params = {}
    if not text:
        return params
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(f"malformed map parameter {item!r} (expected key=value)")
        key, value = (s.strip() for s in item.split("=", 1))
        try:
            params[key] = float(value)
        except ValueError:
            params[key] = value
    return params


_MAP_PARAMS = {
    "identity": set(),
    "rotation": {"omega", "cx", "cy"},
    "annulus_rotation": {"alpha"},
    "translation": {"vx", "vy"},
    "linear_shear": {"k"},
    "double_shear": {"a", "b"},
    "radial_hamiltonian": {"profile", "lambda"},
    "cat_map": set(),
}


def build_map(kind, params=None, representation="closed", time_step=1e-3):
    """Construct a map of the shipped zoo from its name and parameters."""
    params = dict(params or {})
    if kind not in _MAP_PARAMS:
        raise ConfigError(f"unknown map kind {kind!r}; known: {sorted(_MAP_PARAMS)}")
    unknown = set(params) - _MAP_PARAMS[kind]
    if unknown:
        raise ConfigError(f"unknown parameters for {kind}: {sorted(unknown)}")
    if representation not in ("closed", "flow"):
        raise ConfigError(f"unknown representation {representation!r}")
    if not time_step > 0:
        raise ConfigError("time_step must be positive")
    if kind == "identity":
        return IdentityIsotopy()
    if kind == "rotation":
        center = (params.get("cx", 0.0), params.get("cy", 0.0))
        return RotationIsotopy(params.get("omega", 0.5), center)
    if kind == "annulus_rotation":
        return TranslationIsotopy((params.get("alpha", 0.5), 0.0), surface=ANNULUS)
    if kind == "translation":
        return TranslationIsotopy((params.get("vx", 0.0), params.get("vy", 0.0)), surface=TORUS)
    if kind == "linear_shear":
        return linear_shear(params.get("k", 1.0))
    if kind == "double_shear":
        return DoubleShear(params.get("a", 1.0), params.get("b", 1.0), representation, time_step)
    if kind == "radial_hamiltonian":
        from .action import hamiltonian_isotopy, profile_by_name

        profile = profile_by_name(str(params.get("profile", "cubic")), params.get("lambda", 1.0))
        return hamiltonian_isotopy(profile, representation=representation, time_step=time_step)
    return cat_map()


def parse_map_section(section):
    """Build a map from a ``[map]`` config section (a mapping of strings)."""
    allowed = {"kind", "params", "representation", "time_step"}
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in [map]: {sorted(unknown)}")
    if "kind" not in section:
        raise ConfigError("[map] section needs a 'kind'")
    try:
        time_step = float(section.get("time_step", 1e-3))
    except ValueError as exc:
        raise ConfigError(f"bad time_step: {exc}") from None
    return build_map(
        section["kind"].strip(),
        _parse_params(section.get("params", "")),
        section.get("representation", "closed").strip(),
        time_step,
    )
