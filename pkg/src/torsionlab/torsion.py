"""Finite-time torsion of orbits and of invariant measures.

``torsion_n(I, x, xi, n)`` is the lifted change of the direction of
``df_t(x) xi`` over ``[0, n]``, divided by ``n``, in turns per unit time.
Changing ``xi`` moves the value by at most ``2/n``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .lift import DEFAULT_SAMPLES, DEFAULT_TOL, tangent_base, tangent_totals, track_tangent
from .maps import as_points
from .sampling import make_rng

DEFAULT_XI = (1.0, 0.0)
DEFAULT_SCHEDULE = tuple(2 ** k for k in range(5, 13))


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValueError(f"horizon must be a positive integer, got {n!r}")
    return int(n)


def torsion_n(isotopy, x, xi=DEFAULT_XI, n=1, tol=DEFAULT_TOL, samples_per_unit=DEFAULT_SAMPLES):
    """``(1/n)`` times the lifted rotation of ``df_t(x) xi`` over ``[0, n]``."""
    n = _check_n(n)
    return track_tangent(isotopy, x, xi, n, tol, samples_per_unit).total_change / n


def torsion_n_many(isotopy, xs, xis=DEFAULT_XI, n=1, tol=DEFAULT_TOL,
                   samples_per_unit=DEFAULT_SAMPLES):
    """Vectorised :func:`torsion_n` over rows of ``xs`` (and ``xis``)."""
    n = _check_n(n)
    totals, _ = tangent_totals(isotopy, xs, xis, n, tol, samples_per_unit)
    return totals / n


def xi_directions(count):
    """``count`` unit vectors evenly spread around the circle."""
    a = 2 * np.pi * np.arange(count) / count
    return np.column_stack([np.cos(a), np.sin(a)])


def xi_spread(isotopy, x, n, directions=4, tol=DEFAULT_TOL):
    """Max pairwise difference of ``torsion_n`` over evenly spaced ``xi``."""
    xis = xi_directions(directions)
    xs = np.broadcast_to(as_points(x)[0][0], xis.shape)
    vals = torsion_n_many(isotopy, xs, xis, n, tol)
    return float(vals.max() - vals.min())


def pushforward(isotopy, x, xi, m):
    """``(f_m(x), df_m(x) xi / |df_m(x) xi|)`` for an integer ``m >= 0``."""
    y, w = tangent_base(isotopy, np.reshape(x, (1, 2)), np.reshape(xi, (1, 2)), int(m))
    return y[0, -1], w[0, -1]


@dataclass(frozen=True)
class TorsionEstimate:
    """Torsion of one orbit at the largest horizon of a schedule.

    ``diagnostic`` is ``"converged"`` when the last three schedule values lie
    within ``tol`` of each other and ``"not-converged"`` otherwise; it is a
    finite-horizon observation, not a statement about the limit.
    """

    value: float
    n: int
    diagnostic: str
    tol: float
    xi_spread: float
    schedule: tuple = ()
    values: tuple = ()
    x: tuple = (0.0, 0.0)
    xi: tuple = DEFAULT_XI

    @property
    def converged(self):
        return self.diagnostic == "converged"

    def csv_row(self):
        xi_turns = math.atan2(self.xi[1], self.xi[0]) / (2 * math.pi) % 1.0
        return [self.x[0], self.x[1], xi_turns, self.n, self.value, self.diagnostic]


TORSION_CSV_HEADER = ["x0x", "x0y", "xi_turns", "n", "torsion", "diagnostic"]


def torsion_orbit(isotopy, x, xi=DEFAULT_XI, schedule=DEFAULT_SCHEDULE, tol=1e-3,
                  spread_directions=4):
    """Torsion along a schedule of horizons, read off a single lifted track.

    One track over the largest horizon is computed; the value for a smaller
    horizon ``n`` is the lifted change up to ``t = n`` divided by ``n``.
    """
    schedule = tuple(_check_n(s) for s in schedule)
    if not schedule:
        raise ValueError("schedule must be nonempty")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be increasing")
    x = as_points(x)[0][0]
    top = schedule[-1]
    track = track_tangent(isotopy, x, xi, top)
    start = track.angles[0]
    values = tuple(float((track.value_at(s) - start) / s) for s in schedule)
    tail = values[-3:]
    converged = len(tail) == 3 and max(tail) - min(tail) <= tol
    spread = xi_spread(isotopy, x, top, spread_directions) if spread_directions > 1 else 0.0
    xi = tuple(float(c) for c in np.asarray(xi, dtype=float) / np.linalg.norm(xi))
    return TorsionEstimate(values[-1], top, "converged" if converged else "not-converged", tol,
                           spread, schedule, values, tuple(float(c) for c in x), xi)


@dataclass(frozen=True)
class MeasureTorsion:
    """Monte-Carlo torsion of a measure: ``mass * mean(torsion_n)`` and its standard error.

    ``xi_budget`` (``mass * 2/n``) bounds the effect of using one fixed
    direction for every sample instead of integrating over directions.
    """

    mean: float
    stderr: float
    n: int
    samples: int
    mass: float
    xi_budget: float
    values: np.ndarray = field(repr=False, default=None)


def torsion_measure(isotopy, sampler, n, N, seed=0, xi=DEFAULT_XI, mass=1.0,
                    tol=DEFAULT_TOL):
    """Average finite-time torsion over ``N`` points drawn from ``sampler``.

    ``sampler(rng, N)`` must return points distributed according to an
    ``f``-invariant probability measure; ``mass`` rescales the result when the
    measure of interest is not normalised (e.g. ``pi`` for area on the disc).
    """
    n = _check_n(n)
    if N < 2:
        raise ValueError("N must be at least 2")
    pts = np.asarray(sampler(make_rng(seed), int(N)), dtype=float)
    vals = mass * torsion_n_many(isotopy, pts, xi, n, tol)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(len(vals)))
    return MeasureTorsion(mean, stderr, n, int(N), float(mass), 2.0 * mass / n, vals)
