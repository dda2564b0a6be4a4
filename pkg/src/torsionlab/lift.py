"""Continuous lifts of angle-valued functions of time.

Directions are unit vectors; angles are in turns.  A lift is built from the
wrapped increments between consecutive samples, so it is only trustworthy
when consecutive samples are less than a quarter turn apart.  The trackers
below refine the time grid until that holds and then repeat the computation
on a grid twice as dense to certify the total change.
"""

from dataclasses import dataclass, field
import csv
import math

import numpy as np

from .errors import Collision, GapTooLarge, RefinementExhausted
from .maps import as_points
from .sampling import chunked, parallel_map

MAX_GAP = 0.25
DEFAULT_TOL = 1e-7
DEFAULT_SAMPLES = 8
MAX_DEPTH = 20
COLLISION_GUARD = 1e-9
_MAX_DOUBLINGS = 6


def turns_of(vectors):
    """Angle of each vector in turns, in ``[0, 1)``."""
    v = np.asarray(vectors, dtype=float)
    out = np.arctan2(v[..., 1], v[..., 0]) / (2 * np.pi)
    out = np.mod(out, 1.0)
    # mod can round -tiny up to exactly 1.0
    return np.where(out >= 1.0, 0.0, out)


def wrapped_increments(turns):
    """Differences of consecutive angles, each reduced to ``[-1/2, 1/2)``."""
    d = np.diff(np.asarray(turns, dtype=float), axis=-1)
    return d - np.floor(d + 0.5)


def unwrap(directions, max_gap=MAX_GAP):
    """Lift a sequence of direction vectors to a continuous angle sequence.

    Raises :class:`GapTooLarge` if two consecutive directions are more than
    ``max_gap`` turns apart; the caller should sample more densely.  A step of
    exactly ``max_gap`` is still unambiguous and is accepted (the adaptive
    trackers are stricter).
    """
    turns = turns_of(directions)
    if turns.ndim != 1:
        raise ValueError("expected a sequence of 2-vectors")
    steps = wrapped_increments(turns)
    bad = np.flatnonzero(np.abs(steps) > max_gap)
    if bad.size:
        k = int(bad[0])
        raise GapTooLarge(f"directions {k} and {k + 1} are {abs(steps[k]):.4f} turns apart", k)
    return turns[0] + np.concatenate([[0.0], np.cumsum(steps)])


@dataclass(frozen=True)
class LiftedAngleTrack:
    """A lifted angle function sampled at increasing times.

    ``refinement_certificate`` is the largest gap between consecutive
    samples, and ``halving_change`` the change of the total variation observed
    when the base grid was made twice as dense.
    """

    times: np.ndarray
    angles: np.ndarray
    refinement_certificate: float
    halving_change: float = 0.0
    samples_per_unit: int = field(default=DEFAULT_SAMPLES)

    @property
    def total_change(self):
        return float(self.angles[-1] - self.angles[0])

    @property
    def horizon(self):
        return float(self.times[-1] - self.times[0])

    def value_at(self, t):
        """Linear interpolation of the lifted angle."""
        return np.interp(t, self.times, self.angles)

    def shifted(self, k):
        """The same track with an integer added to every angle."""
        return LiftedAngleTrack(self.times, self.angles + int(k), self.refinement_certificate,
                                self.halving_change, self.samples_per_unit)

    def to_csv(self, path, metadata=None):
        with open(path, "w", newline="") as fh:
            for line in metadata or ():
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "angle_turns"])
            for t, a in zip(self.times, self.angles):
                w.writerow([repr(float(t)), repr(float(a))])


def adaptive_lift(direction_at, horizon, samples_per_unit=DEFAULT_SAMPLES, max_depth=MAX_DEPTH):
    """Sample ``direction_at`` on ``[0, horizon]`` and bisect until all gaps are small.

    ``direction_at`` takes an array of times and returns one direction vector
    per time.  Returns ``(times, angles, max_gap)``.
    """
    count = max(2, int(math.ceil(horizon * samples_per_unit)) + 1)
    times = np.linspace(0.0, horizon, count)
    base_step = times[1] - times[0]
    turns = turns_of(direction_at(times))
    for _ in range(max_depth + 1):
        steps = np.abs(wrapped_increments(turns))
        bad = np.flatnonzero(steps >= MAX_GAP)
        if bad.size == 0:
            break
        widths = times[bad + 1] - times[bad]
        if np.min(widths) < base_step / 2.0 ** max_depth:
            raise RefinementExhausted(
                f"angle gap persists after {max_depth} bisections near t={times[bad[0]]:.6g}")
        mids = 0.5 * (times[bad] + times[bad + 1])
        new_turns = turns_of(direction_at(mids))
        times = np.insert(times, bad + 1, mids)
        turns = np.insert(turns, bad + 1, new_turns)
    else:
        raise RefinementExhausted(f"angle gap persists after {max_depth} bisections")
    steps = wrapped_increments(turns)
    angles = np.concatenate([[turns[0]], turns[0] + np.cumsum(steps)])
    max_gap = float(np.max(np.abs(steps))) if steps.size else 0.0
    return times, angles, max_gap


def certified_lift(direction_at, horizon, tol=DEFAULT_TOL, samples_per_unit=DEFAULT_SAMPLES,
                   max_depth=MAX_DEPTH):
    """Adaptive lift whose total change is stable under doubling the base density."""
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    m = int(samples_per_unit)
    coarse = adaptive_lift(direction_at, horizon, m, max_depth)
    for _ in range(_MAX_DOUBLINGS):
        fine = adaptive_lift(direction_at, horizon, 2 * m, max_depth)
        change = abs((fine[1][-1] - fine[1][0]) - (coarse[1][-1] - coarse[1][0]))
        if change <= tol:
            return LiftedAngleTrack(fine[0], fine[1], fine[2], float(change), 2 * m)
        coarse, m = fine, 2 * m
    raise RefinementExhausted(
        f"total angle change not stable under step halving (last change {change:.3g})")


def _normalize(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def tangent_base(isotopy, x, xi, K):
    """Orbit ``y_k = f^k(x)`` and normalised pushed vectors ``w_k`` for ``k <= K``.

    ``x`` and ``xi`` have shape ``(B, 2)``; the result arrays have shape
    ``(B, K+1, 2)``.  Normalising at every step keeps long horizons finite.
    """
    x = np.asarray(x, dtype=float)
    y = np.empty((len(x), K + 1, 2))
    w = np.empty_like(y)
    y[:, 0] = x
    w[:, 0] = _normalize(np.asarray(xi, dtype=float))
    for k in range(K):
        p, jac = isotopy.step(y[:, k])
        y[:, k + 1] = p
        w[:, k + 1] = _normalize(np.einsum("nij,nj->ni", jac, w[:, k]))
    return y, w


def _split_times(times, K):
    k = np.clip(np.floor(times).astype(np.int64), 0, K - 1)
    return k, times - k


def tangent_direction_fn(isotopy, x, xi, horizon):
    """Callable ``t -> df_t(x) xi`` on ``[0, horizon]``."""
    K = max(1, int(math.ceil(horizon)))
    y, w = tangent_base(isotopy, np.reshape(x, (1, 2)), np.reshape(xi, (1, 2)), K)
    y, w = y[0], w[0]

    def direction_at(times):
        k, tau = _split_times(np.asarray(times, dtype=float), K)
        _, jac = isotopy.unit(tau, y[k])
        return np.einsum("nij,nj->ni", jac, w[k])

    return direction_at


def separation_direction_fn(isotopy, x, y, horizon, guard=COLLISION_GUARD):
    """Callable ``t -> f_t(y) - f_t(x)`` on ``[0, horizon]``, with a collision guard."""
    K = max(1, int(math.ceil(horizon)))
    ox = isotopy.orbit(np.asarray(x, dtype=float), K)
    oy = isotopy.orbit(np.asarray(y, dtype=float), K)

    def direction_at(times):
        times = np.asarray(times, dtype=float)
        k, tau = _split_times(times, K)
        d = isotopy.unit_points(tau, oy[k]) - isotopy.unit_points(tau, ox[k])
        dist = np.linalg.norm(d, axis=1)
        if np.any(dist < guard):
            i = int(np.argmin(dist))
            raise Collision(f"orbits closer than {guard:g}", float(times[i]))
        return d

    return direction_at


def track_tangent(isotopy, x, xi, T, tol=DEFAULT_TOL, samples_per_unit=DEFAULT_SAMPLES,
                  max_depth=MAX_DEPTH):
    """Lifted direction of ``df_t(x) xi`` for ``t`` in ``[0, T]``."""
    xi = np.asarray(xi, dtype=float)
    if not np.any(xi):
        raise ValueError("xi must be nonzero")
    fn = tangent_direction_fn(isotopy, as_points(x)[0][0], xi, T)
    return certified_lift(fn, T, tol, samples_per_unit, max_depth)


def track_separation(isotopy, x, y, T, tol=DEFAULT_TOL, samples_per_unit=DEFAULT_SAMPLES,
                     max_depth=MAX_DEPTH, guard=COLLISION_GUARD):
    """Lifted direction from ``f_t(x)`` to ``f_t(y)`` for ``t`` in ``[0, T]``."""
    x = as_points(x)[0][0]
    y = as_points(y)[0][0]
    if np.linalg.norm(y - x) < guard:
        raise Collision("initial points coincide", 0.0)
    fn = separation_direction_fn(isotopy, x, y, T, guard)
    return certified_lift(fn, T, tol, samples_per_unit, max_depth)


# Batched fast path -----------------------------------------------------------
#
# For many trajectories at an integer horizon the direction is sampled on a
# uniform grid with ``2m`` points per unit time.  The total change on that grid
# and on its every-other-point subgrid must agree; rows that fail either the
# gap test or the halving test are recomputed with the adaptive tracker.

_CHUNK = 200_000


def _grid_totals(turns):
    """Totals on the full grid and on the halved grid, plus the max gap."""
    fine = wrapped_increments(turns)
    coarse = wrapped_increments(turns[:, ::2])
    return fine.sum(axis=1), coarse.sum(axis=1), np.max(np.abs(fine), axis=1)


def _uniform_tau(m2):
    return np.arange(m2) / m2


def _batch(direction_rows, B, K, m, tol, fallback):
    """Shared driver: ``direction_rows(rows)`` returns directions ``(len(rows), K*2m+1, 2)``."""
    totals = np.empty(B)
    per_row = K * 2 * m + 1
    # chunks do not depend on the thread count, so neither do the results
    chunks = chunked(B, max(1, _CHUNK // per_row))

    def run(rows):
        fine, coarse, gap = _grid_totals(turns_of(direction_rows(rows)))
        return fine, (gap < MAX_GAP) & (np.abs(fine - coarse) <= tol)

    redo = []
    for rows, (fine, ok) in zip(chunks, parallel_map(run, chunks)):
        totals[rows] = fine
        redo.extend(rows[~ok].tolist())
    for r, value in zip(redo, parallel_map(fallback, redo)):
        totals[r] = value
    return totals, len(redo)


def tangent_totals(isotopy, xs, xis, K, tol=DEFAULT_TOL, samples_per_unit=DEFAULT_SAMPLES):
    """Total lifted change of ``df_t(x) xi`` over ``[0, K]`` for many ``(x, xi)``.

    Returns ``(totals, fallbacks)`` where ``fallbacks`` counts rows that
    needed the adaptive tracker.
    """
    xs = np.asarray(xs, dtype=float).reshape(-1, 2)
    xis = np.broadcast_to(np.asarray(xis, dtype=float), xs.shape)
    K = int(K)
    m = int(samples_per_unit)
    tau = _uniform_tau(2 * m)

    def rows_fn(rows):
        y, w = tangent_base(isotopy, xs[rows], xis[rows], K)
        R = len(rows)
        pts = np.repeat(y[:, :K], len(tau), axis=1).reshape(-1, 2)
        vec = np.repeat(w[:, :K], len(tau), axis=1).reshape(-1, 2)
        taus = np.tile(tau, R * K)
        _, jac = isotopy.unit(taus, pts)
        d = np.einsum("nij,nj->ni", jac, vec).reshape(R, K * len(tau), 2)
        return np.concatenate([d, w[:, K:K + 1]], axis=1)

    def fallback(r):
        return track_tangent(isotopy, xs[r], xis[r], K, tol, 2 * m).total_change

    return _batch(rows_fn, len(xs), K, m, tol, fallback)


def separation_totals(isotopy, xs, ys, K, tol=DEFAULT_TOL, samples_per_unit=DEFAULT_SAMPLES,
                      guard=COLLISION_GUARD):
    """Total lifted change of the direction from ``f_t(x)`` to ``f_t(y)`` over ``[0, K]``."""
    xs = np.asarray(xs, dtype=float).reshape(-1, 2)
    ys = np.asarray(ys, dtype=float).reshape(-1, 2)
    K = int(K)
    m = int(samples_per_unit)
    tau = _uniform_tau(2 * m)

    def rows_fn(rows):
        ox = isotopy.orbit(xs[rows], K)
        oy = isotopy.orbit(ys[rows], K)
        R = len(rows)
        taus = np.tile(tau, R * K)
        px = isotopy.unit_points(taus, np.repeat(ox[:, :K], len(tau), axis=1).reshape(-1, 2))
        py = isotopy.unit_points(taus, np.repeat(oy[:, :K], len(tau), axis=1).reshape(-1, 2))
        d = (py - px).reshape(R, K * len(tau), 2)
        d = np.concatenate([d, (oy[:, K] - ox[:, K])[:, None]], axis=1)
        dist = np.linalg.norm(d, axis=2)
        if np.any(dist < guard):
            r, j = np.unravel_index(int(np.argmin(dist)), dist.shape)
            raise Collision(f"orbits closer than {guard:g}", float(j) / len(tau))
        return d

    def fallback(r):
        return track_separation(isotopy, xs[r], ys[r], K, tol, 2 * m, guard=guard).total_change

    return _batch(rows_fn, len(xs), K, m, tol, fallback)
