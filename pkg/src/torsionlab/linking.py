"""Linking numbers of orbit pairs and of sampled curves.

The linking of ``x`` and ``y`` over ``[0, n]`` is the lifted change of the
direction from ``f_t(x)`` to ``f_t(y)`` divided by ``n``.  Swapping the two
points turns every direction by half a turn, so the value is symmetric.
"""

from dataclasses import dataclass
import csv

import numpy as np

from .errors import Collision, ConfigError
from .lift import (COLLISION_GUARD, DEFAULT_SAMPLES, DEFAULT_TOL, certified_lift,
                   separation_totals, track_separation, turns_of, unwrap, wrapped_increments)


def linking_n(isotopy, x, y, n, tol=DEFAULT_TOL, samples_per_unit=DEFAULT_SAMPLES):
    """Finite-time linking number of the orbits of ``x`` and ``y``."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    return track_separation(isotopy, x, y, n, tol, samples_per_unit).total_change / n


def linking_n_many(isotopy, xs, ys, n, tol=DEFAULT_TOL, samples_per_unit=DEFAULT_SAMPLES):
    """Vectorised :func:`linking_n` over paired rows of ``xs`` and ``ys``."""
    totals, _ = separation_totals(isotopy, xs, ys, int(n), tol, samples_per_unit)
    return totals / int(n)


@dataclass(frozen=True)
class SampledCurve:
    """A plane curve known at increasing times, linear between samples."""

    times: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.points, dtype=float)
        if t.ndim != 1 or p.shape != (len(t), 2):
            raise ValueError("times must be (M,) and points (M, 2)")
        if len(t) < 2 or np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing with at least two samples")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", p)

    @classmethod
    def constant(cls, point, times):
        times = np.asarray(times, dtype=float)
        return cls(times, np.tile(np.asarray(point, dtype=float), (len(times), 1)))

    @classmethod
    def from_function(cls, func, times):
        times = np.asarray(times, dtype=float)
        return cls(times, np.asarray(func(times), dtype=float))

    def at(self, t):
        t = np.asarray(t, dtype=float)
        return np.column_stack([np.interp(t, self.times, self.points[:, 0]),
                                np.interp(t, self.times, self.points[:, 1])])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
        if not rows or [c.strip() for c in rows[0]] != ["t", "x", "y"]:
            raise ConfigError(f"{path}: expected header t,x,y")
        data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
        try:
            return cls(data[:, 0], data[:, 1:3])
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"{path}: {exc}") from None

    def to_csv(self, path, metadata=None):
        with open(path, "w", newline="") as fh:
            for line in metadata or ():
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "x", "y"])
            for t, (px, py) in zip(self.times, self.points):
                w.writerow([repr(float(t)), repr(float(px)), repr(float(py))])


@dataclass(frozen=True)
class LinkingEstimate:
    value: float
    horizon: float
    min_separation: float
    total_change: float


def _common_times(alpha, beta, T):
    times = np.union1d(alpha.times, beta.times)
    start = max(alpha.times[0], beta.times[0])
    if T is None:
        T = min(alpha.times[-1], beta.times[-1]) - start
    end = start + T
    if end > min(alpha.times[-1], beta.times[-1]) + 1e-12:
        raise ValueError("curves are not sampled up to the requested horizon")
    times = times[(times >= start) & (times < end)]
    return np.append(times, end), float(T)


def linking_curves(alpha, beta, T=None, guard=COLLISION_GUARD, tol=DEFAULT_TOL):
    """Normalised lifted-angle change of ``beta - alpha`` over ``[0, T]``.

    ``alpha`` and ``beta`` are :class:`SampledCurve` objects (angles are taken
    at the union of their sample times and must move by less than a quarter
    turn between samples) or vectorised callables of time, which are sampled
    adaptively.
    """
    if callable(alpha) or callable(beta):
        if T is None:
            raise ValueError("T is required for callable curves")
        fa = alpha if callable(alpha) else alpha.at
        fb = beta if callable(beta) else beta.at
        seps = []

        def direction_at(t):
            d = np.asarray(fb(t), float) - np.asarray(fa(t), float)
            dist = np.linalg.norm(d, axis=1)
            if np.any(dist < guard):
                raise Collision("curves meet", float(t[int(np.argmin(dist))]))
            seps.append(dist.min())
            return d

        track = certified_lift(direction_at, float(T), tol)
        return LinkingEstimate(track.total_change / T, float(T), float(min(seps)),
                               track.total_change)
    times, T = _common_times(alpha, beta, T)
    d = beta.at(times) - alpha.at(times)
    dist = np.linalg.norm(d, axis=1)
    if np.any(dist < guard):
        raise Collision("curves meet", float(times[int(np.argmin(dist))]))
    angles = unwrap(d)
    total = float(angles[-1] - angles[0])
    return LinkingEstimate(total / T, T, float(dist.min()), total)


@dataclass(frozen=True)
class PerturbationReport:
    """Outcome of comparing the linking of ``(alpha, beta)`` and a perturbed pair.

    ``max_normalized_difference`` is the sup over checkpoints ``t`` of
    ``t * |Linking_t(alpha, beta) - Linking_t(alpha', beta')|``; when the
    premise holds it cannot reach half a turn.  ``difference_at_T`` is the
    unscaled difference at the horizon, bounded by ``1/(2T)``.
    """

    premise_ok: bool
    separation: float
    alpha_offset: float
    beta_offset: float
    max_angle_difference: float
    max_normalized_difference: float
    difference_at_T: float
    horizon: float

    @property
    def bound_holds(self):
        if not self.premise_ok:
            return None
        return (self.max_normalized_difference <= 0.5
                and self.difference_at_T <= 0.5 / self.horizon)


def perturbation_bound_check(alpha, beta, alpha2, beta2, T=None):
    """Check the robustness of linking under perturbations of size at most ``d/2``.

    ``d`` is the measured minimum of ``|beta(t) - alpha(t)|``; the premise
    is that ``alpha2`` and ``beta2`` stay within ``d/2`` of ``alpha`` and
    ``beta``.  Everything is measured on the union of the sample times.
    """
    curves = (alpha, beta, alpha2, beta2)
    grid = curves[0].times
    for c in curves[1:]:
        grid = np.union1d(grid, c.times)
    start = max(c.times[0] for c in curves)
    stop = min(c.times[-1] for c in curves)
    if T is None:
        T = stop - start
    end = start + T
    if end > stop + 1e-12:
        raise ValueError("curves are not sampled up to the requested horizon")
    grid = np.append(grid[(grid >= start) & (grid < end)], end)
    a, b, a2, b2 = (c.at(grid) for c in curves)
    sep = float(np.min(np.linalg.norm(b - a, axis=1)))
    off_a = float(np.max(np.linalg.norm(a2 - a, axis=1)))
    off_b = float(np.max(np.linalg.norm(b2 - b, axis=1)))
    premise = sep > 0 and off_a <= sep / 2 and off_b <= sep / 2
    first = unwrap(b - a)
    second = unwrap(b2 - a2)
    pointwise = np.abs(wrapped_increments(np.stack([turns_of(b2 - a2), turns_of(b - a)], axis=0).T))
    drift = (first - first[0]) - (second - second[0])
    return PerturbationReport(
        premise_ok=bool(premise),
        separation=sep,
        alpha_offset=off_a,
        beta_offset=off_b,
        max_angle_difference=float(pointwise.max()),
        max_normalized_difference=float(np.max(np.abs(drift))),
        difference_at_T=float(abs(drift[-1]) / T),
        horizon=float(T),
    )
