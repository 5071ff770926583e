"""Samplers for the direction-persistent lattice walk.

The walk lives on the d-dimensional integer lattice.  At step n it keeps its
current direction with probability 1 - p_n and with probability p_n redraws
the direction uniformly over all 2d signed unit vectors (the redraw may
repeat the old direction).  The first step always redraws, so the initial
direction is uniform.

Two samplers produce the same law:

* ``simulate``         one Bernoulli decision per step;
* ``simulate_events``  jumps straight from one redraw time to the next, by
                       geometric inversion for constant schedules and by a
                       thinning / survival-product hybrid otherwise.

Paths are stored sparsely as the ordered list of redraw times with the
direction drawn at each.  ``visits`` counts target hits segment by segment
without materializing every position; ``Path.positions_dense`` replays all
steps and exists for cross-checking.

``sample_positions`` is the vectorized many-path workhorse used by the
statistical experiments; it implements both laws batch-wise and can record
position snapshots and direction-change counts along the way.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .schedule import Constant, Schedule

__all__ = [
    "Direction",
    "WalkState",
    "TurnEvent",
    "Path",
    "all_directions",
    "initial_state",
    "step",
    "simulate",
    "simulate_events",
    "visits",
    "embedded_jumps",
    "sample_positions",
    "PositionsSample",
    "sample_visit_stats",
    "VisitStats",
]

# Samplers switch from per-step thinning to survival-product inversion below
# this rate; keeps expected draws per update O(10) without product underflow.
_THINNING_CUTOFF = 0.1


@dataclass(frozen=True)
class Direction:
    """A signed axis direction; exactly 2d of these exist in dimension d."""

    axis: int
    sign: int

    def __post_init__(self):
        if self.axis < 0:
            raise ValueError(f"axis must be nonnegative, got {self.axis}")
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    def vector(self, d: int) -> tuple:
        if self.axis >= d:
            raise ValueError(f"axis {self.axis} out of range for dimension {d}")
        v = [0] * d
        v[self.axis] = self.sign
        return tuple(v)

    @property
    def index(self) -> int:
        """Stable encoding in [0, 2d): +axis0, -axis0, +axis1, ..."""
        return 2 * self.axis + (0 if self.sign > 0 else 1)

    @staticmethod
    def from_index(idx: int) -> "Direction":
        return Direction(idx // 2, 1 if idx % 2 == 0 else -1)


def all_directions(d: int) -> list:
    return [Direction.from_index(i) for i in range(2 * d)]


@dataclass(frozen=True)
class WalkState:
    """Position and heading after ``time`` steps.

    ``direction`` is None only in the start state (time 0), where no heading
    exists yet; the first ``step`` from such a state always draws one.
    """

    position: tuple
    direction: Direction | None
    time: int


@dataclass(frozen=True)
class TurnEvent:
    update_time: int
    new_direction: Direction


@dataclass(frozen=True)
class Path:
    """Sparse trajectory: start point, redraw events, and the horizon."""

    start: tuple
    events: tuple
    horizon: int

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        times = [e.update_time for e in self.events]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValueError("event times must be strictly increasing")
        if times and (times[0] < 1 or times[-1] > self.horizon):
            raise ValueError("event times must lie in [1, horizon]")

    @property
    def d(self) -> int:
        return len(self.start)

    def segments(self) -> Iterator[tuple]:
        """Yield (t_first, t_last, direction, position_before) per constant run.

        The run covers steps t_first..t_last inclusive; position_before is the
        location after step t_first - 1.
        """
        pos = self.start
        for k, ev in enumerate(self.events):
            t0 = ev.update_time
            t1 = self.events[k + 1].update_time - 1 if k + 1 < len(self.events) else self.horizon
            t1 = min(t1, self.horizon)
            yield t0, t1, ev.new_direction, pos
            vec = ev.new_direction.vector(self.d)
            steps = t1 - t0 + 1
            pos = tuple(x + steps * v for x, v in zip(pos, vec))

    def endpoint(self) -> tuple:
        pos = self.start
        for t0, t1, direction, before in self.segments():
            pos = tuple(x + (t1 - t0 + 1) * v
                        for x, v in zip(before, direction.vector(self.d)))
        return pos

    def positions_dense(self) -> np.ndarray:
        """Replay every step; shape (horizon + 1, d) including the start row."""
        out = np.zeros((self.horizon + 1, self.d), dtype=np.int64)
        out[0] = self.start
        for t0, t1, direction, before in self.segments():
            vec = np.asarray(direction.vector(self.d))
            steps = np.arange(1, t1 - t0 + 2)[:, None]
            out[t0: t1 + 1] = np.asarray(before) + steps * vec
        return out

    def to_csv(self, fileobj) -> None:
        """Redraw-event rows (k, tau_k, axis, sign)."""
        writer = csv.writer(fileobj, lineterminator="\n")
        writer.writerow(["k", "tau_k", "axis", "sign"])
        for k, ev in enumerate(self.events, start=1):
            writer.writerow([k, ev.update_time, ev.new_direction.axis,
                             ev.new_direction.sign])

    def dense_to_csv(self, fileobj) -> None:
        """Step rows (n, x_1..x_d) for n = 0..horizon."""
        writer = csv.writer(fileobj, lineterminator="\n")
        writer.writerow(["n"] + [f"x_{k + 1}" for k in range(self.d)])
        for t, row in enumerate(self.positions_dense()):
            writer.writerow([t] + [int(x) for x in row])


def initial_state(d: int, start: Sequence[int] | None = None) -> WalkState:
    if start is None:
        start = (0,) * d
    start = tuple(int(x) for x in start)
    if len(start) != d:
        raise ValueError(f"start has {len(start)} coordinates, expected {d}")
    return WalkState(start, None, 0)


def _draw_direction(d: int, rng: np.random.Generator) -> Direction:
    return Direction.from_index(int(rng.integers(0, 2 * d)))


def _step_impl(state: WalkState, schedule: Schedule, rng: np.random.Generator,
               d: int) -> tuple:
    n = state.time + 1
    if state.direction is None:
        updated = True
    else:
        updated = rng.random() < schedule.p_at(n)
    direction = _draw_direction(d, rng) if updated else state.direction
    vec = direction.vector(d)
    pos = tuple(x + v for x, v in zip(state.position, vec))
    return WalkState(pos, direction, n), updated


def step(state: WalkState, schedule: Schedule, rng: np.random.Generator) -> WalkState:
    """Advance one step: redraw the heading with probability p_n, then move."""
    return _step_impl(state, schedule, rng, len(state.position))[0]


def simulate(d: int, schedule: Schedule, n_steps: int, rng: np.random.Generator,
             start: Sequence[int] | None = None) -> Path:
    """Direct stepping sampler; the first direction is uniform over 2d options."""
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    state = initial_state(d, start)
    events = []
    for _ in range(n_steps):
        state, updated = _step_impl(state, schedule, rng, d)
        if updated:
            events.append(TurnEvent(state.time, state.direction))
    return Path(initial_state(d, start).position, tuple(events), n_steps)


def _geometric_gap(p, rng: np.random.Generator) -> float:
    """Inversion sampler for a Geometric(p) gap on {1, 2, ...}; inf if p == 0."""
    if p >= 1:
        return 1
    if p <= 0:
        return math.inf
    u = rng.random()
    if u == 0.0:
        return math.inf
    return math.ceil(math.log(u) / math.log1p(-p))


def _next_update_varying(schedule: Schedule, m: int, horizon: int,
                         rng: np.random.Generator) -> int | None:
    """First redraw time after m, or None if none occurs by the horizon.

    Steps with p >= 0.1 are decided by one Bernoulli draw each.  A maximal
    stretch of smaller rates is resolved with a single exponential variate
    against the running -log survival product, which is exact and keeps the
    work per update bounded.  Leaving a stretch without an update is the only
    information consumed from the variate, so resuming thinning afterwards
    stays exact.
    """
    j = m
    while j < horizon:
        j += 1
        p = schedule.p_at(j)
        if p >= _THINNING_CUTOFF:
            if rng.random() < p:
                return j
            continue
        u = rng.random()
        budget = math.inf if u == 0.0 else -math.log(u)
        hazard = 0.0
        while True:
            hazard += -math.log1p(-p)
            if hazard >= budget:
                return j
            j += 1
            if j > horizon:
                return None
            p = schedule.p_at(j)
            if p >= _THINNING_CUTOFF:
                j -= 1  # re-examine this step under thinning
                break
    return None


def simulate_events(d: int, schedule: Schedule, n_steps: int,
                    rng: np.random.Generator,
                    start: Sequence[int] | None = None) -> Path:
    """Event-driven sampler with the same law as ``simulate``.

    Only the redraw times are sampled: gaps are Geometric(p) by inversion for
    ``Constant`` schedules, and come from the thinning/inversion hybrid for
    time-dependent rates.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    origin = initial_state(d, start).position
    events = []
    if n_steps >= 1:
        t = 1  # the first step always redraws
        constant = isinstance(schedule, Constant)
        while t is not None and t <= n_steps:
            events.append(TurnEvent(t, _draw_direction(d, rng)))
            if constant:
                gap = _geometric_gap(schedule.p, rng)
                t = None if math.isinf(gap) else t + int(gap)
            else:
                t = _next_update_varying(schedule, t, n_steps, rng)
    return Path(origin, tuple(events), n_steps)


def visits(path: Path, target: Sequence[int]) -> int:
    """Exact count of times 1 <= t <= horizon with S_t == target.

    Each constant-direction segment is an axis-aligned run of lattice points
    and can contain the target at most once, so the count needs one O(d)
    check per event rather than a full replay.
    """
    target = tuple(int(x) for x in target)
    if len(target) != path.d:
        raise ValueError(f"target has {len(target)} coordinates, expected {path.d}")
    count = 0
    for t0, t1, direction, before in path.segments():
        delta = [t - x for t, x in zip(target, before)]
        off_axis_ok = all(delta[i] == 0 for i in range(path.d) if i != direction.axis)
        if not off_axis_ok:
            continue
        m = delta[direction.axis] * direction.sign
        if 1 <= m <= t1 - t0 + 1:
            count += 1
    return count


def embedded_jumps(path: Path) -> list:
    """Displacements between consecutive redraw times, as (direction, length).

    For a constant schedule the lengths are Geometric(p) and the directions
    uniform, which is what makes the event-driven sampler fast.  The final
    partial run up to the horizon is not a complete jump and is omitted.
    """
    jumps = []
    for k in range(len(path.events) - 1):
        gap = path.events[k + 1].update_time - path.events[k].update_time
        jumps.append((path.events[k].new_direction, gap))
    return jumps


@dataclass(frozen=True)
class PositionsSample:
    """Batched sampler output: positions per requested time, change counts."""

    positions: dict
    change_counts: np.ndarray | None

    def at(self, t: int) -> np.ndarray:
        return self.positions[t]


def sample_positions(d: int, schedule: Schedule, n: int, samples: int,
                     rng: np.random.Generator, *,
                     times: Sequence[int] | None = None,
                     count_changes_in: tuple | None = None,
                     method: str = "events") -> PositionsSample:
    """Sample ``samples`` independent walks, vectorized across paths.

    Returns positions (int64 arrays of shape (samples, d)) at each requested
    time (default: the horizon only).  ``count_changes_in=(lo, hi)`` also
    counts, per path, the steps t in (lo, hi] at which the direction actually
    changed.  ``method`` selects the per-step law ("step") or the event-jump
    law ("events"); both laws are identical, matching ``simulate`` and
    ``simulate_events``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    if times is None:
        times = (n,)
    times = tuple(sorted(set(int(t) for t in times)))
    if times and (times[0] < 0 or times[-1] > n):
        raise ValueError(f"snapshot times must lie in [0, {n}]")
    if count_changes_in is not None:
        lo, hi = count_changes_in
        if not (1 <= lo <= hi <= n):
            raise ValueError("count_changes_in must satisfy 1 <= lo <= hi <= n")
    if method not in ("step", "events"):
        raise ValueError(f"method must be 'step' or 'events', got {method!r}")

    positions = {t: np.zeros((samples, d), dtype=np.int64) for t in times}
    changes = np.zeros(samples, dtype=np.int64) if count_changes_in else None
    if samples == 0 or n == 0:
        return PositionsSample(positions, changes)

    if method == "step":
        _run_dense(d, schedule, n, samples, rng, positions, changes, count_changes_in)
    else:
        _run_events(d, schedule, n, samples, rng, positions, changes, count_changes_in)
    return PositionsSample(positions, changes)


def _run_dense(d, schedule, n, samples, rng, positions, changes, window):
    p = schedule.prefix_probs(n)
    axis = np.zeros(samples, dtype=np.int64)
    sign = np.zeros(samples, dtype=np.int64)
    pos = np.zeros((samples, d), dtype=np.int64)
    rows = np.arange(samples)
    for k in range(1, n + 1):
        if k == 1:
            mask = np.ones(samples, dtype=bool)
        else:
            mask = rng.random(samples) < p[k - 1]
        if mask.any():
            idx = rng.integers(0, 2 * d, mask.sum())
            new_axis = idx // 2
            new_sign = 1 - 2 * (idx % 2)
            if changes is not None and window[0] < k <= window[1]:
                moved = (new_axis != axis[mask]) | (new_sign != sign[mask])
                changes[mask] += moved
            axis[mask] = new_axis
            sign[mask] = new_sign
        pos[rows, axis] += sign
        if k in positions:
            positions[k][:] = pos
    return


def _hazard_table(schedule, n):
    """Cumulative -log survival through each step, with p == 1 steps forced.

    Steps with p_j == 1 contribute zero hazard here and are instead handled
    by a "next forced index" lookup, since -log(0) would poison the cumsum.
    """
    p = schedule.prefix_probs(n)
    forced = p >= 1.0
    with np.errstate(divide="ignore"):
        hazard = -np.log1p(-np.where(forced, 0.0, p))
    nc = np.zeros(n + 1)
    np.cumsum(hazard, out=nc[1:])
    # next_forced[t] = smallest step j > t with p_j == 1, else n + 1
    next_forced = np.full(n + 2, n + 1, dtype=np.int64)
    for j in range(n, 0, -1):
        next_forced[j - 1] = j if forced[j - 1] else next_forced[j]
    return nc, next_forced


def _run_events(d, schedule, n, samples, rng, positions, changes, window):
    nc, next_forced = _hazard_table(schedule, n)
    snap_times = np.asarray(sorted(positions), dtype=np.int64)

    active = np.arange(samples)
    cur_t = np.ones(samples, dtype=np.int64)  # time of the latest redraw
    idx0 = rng.integers(0, 2 * d, samples)
    axis = idx0 // 2
    sign = (1 - 2 * (idx0 % 2)).astype(np.int64)
    pos = np.zeros((samples, d), dtype=np.int64)  # position after step cur_t - 1

    while active.size:
        t = cur_t[active]
        u = rng.random(active.size)
        with np.errstate(divide="ignore"):
            budget = -np.log(u)
        nxt = np.searchsorted(nc, nc[t] + budget, side="left")
        nxt = np.maximum(nxt, t + 1)
        nxt = np.minimum(nxt, next_forced[t])

        # record snapshots landing inside the current run [t, nxt)
        for s in snap_times:
            if s == 0:
                continue
            hit = (t <= s) & (s < nxt)
            if hit.any():
                rows = active[hit]
                offs = (s - t[hit] + 1) * sign[rows]
                snap = pos[rows]
                snap[np.arange(rows.size), axis[rows]] += offs
                positions[s][rows] = snap

        finished = nxt > n
        if finished.any():
            rows = active[finished]
            offs = (n - t[finished] + 1) * sign[rows]
            pos[rows, axis[rows]] += offs

        cont = ~finished
        if cont.any():
            rows = active[cont]
            tn = nxt[cont]
            offs = (tn - t[cont]) * sign[rows]
            pos[rows, axis[rows]] += offs
            idx = rng.integers(0, 2 * d, rows.size)
            new_axis = idx // 2
            new_sign = (1 - 2 * (idx % 2)).astype(np.int64)
            if changes is not None:
                lo, hi = window
                moved = ((new_axis != axis[rows]) | (new_sign != sign[rows])) \
                    & (lo < tn) & (tn <= hi)
                changes[rows] += moved
            axis[rows] = new_axis
            sign[rows] = new_sign
            cur_t[rows] = tn
        active = active[cont]
    return


@dataclass(frozen=True)
class VisitStats:
    """Per-horizon visit statistics over a batch of paths.

    ``counts[h]`` holds, per path, the number of times 1 <= t <= h with
    S_t equal to the target; ``late[h]`` flags paths with at least one such
    visit in (h // 2, h].
    """

    counts: dict
    late: dict


def sample_visit_stats(d: int, schedule: Schedule, n: int, samples: int,
                       rng: np.random.Generator, *,
                       target: Sequence[int] | None = None,
                       horizons: Sequence[int] | None = None) -> VisitStats:
    """Sample walks and count target visits at several nested horizons.

    Each path is simulated once up to n with the event-jump law; per
    constant-direction run the target can be met at most once, so hits are
    detected run by run without storing positions.  All horizons must be
    <= n; they observe the same paths, so per-path counts are monotone in
    the horizon by construction.
    """
    if n < 1:
        raise ValueError("n must be positive")
    target = (0,) * d if target is None else tuple(int(x) for x in target)
    if len(target) != d:
        raise ValueError(f"target has {len(target)} coordinates, expected {d}")
    horizons = (n,) if horizons is None else tuple(sorted(set(int(h) for h in horizons)))
    if horizons[0] < 1 or horizons[-1] > n:
        raise ValueError(f"horizons must lie in [1, {n}]")

    counts = {h: np.zeros(samples, dtype=np.int64) for h in horizons}
    late = {h: np.zeros(samples, dtype=bool) for h in horizons}
    if samples == 0:
        return VisitStats(counts, late)

    nc, next_forced = _hazard_table(schedule, n)
    tgt = np.asarray(target, dtype=np.int64)

    active = np.arange(samples)
    cur_t = np.ones(samples, dtype=np.int64)
    idx0 = rng.integers(0, 2 * d, samples)
    axis = idx0 // 2
    sign = (1 - 2 * (idx0 % 2)).astype(np.int64)
    pos = np.zeros((samples, d), dtype=np.int64)

    while active.size:
        t = cur_t[active]
        u = rng.random(active.size)
        with np.errstate(divide="ignore"):
            budget = -np.log(u)
        nxt = np.searchsorted(nc, nc[t] + budget, side="left")
        nxt = np.maximum(nxt, t + 1)
        nxt = np.minimum(nxt, next_forced[t])

        ax = axis[active]
        sg = sign[active]
        delta = tgt[None, :] - pos[active]
        on_axis = delta[np.arange(active.size), ax]
        off_ok = (np.abs(delta).sum(axis=1) - np.abs(on_axis)) == 0
        k = on_axis * sg  # steps into the run at which the target sits
        run_len = np.minimum(nxt - 1, n) - t + 1
        hit = off_ok & (k >= 1) & (k <= run_len)
        if hit.any():
            s = t + k - 1  # absolute time of the visit
            rows = active[hit]
            sh = s[hit]
            for h in horizons:
                within = sh <= h
                if within.any():
                    counts[h][rows[within]] += 1
                    late[h][rows[within & ~(sh <= h // 2)]] = True

        cont = nxt <= n
        if cont.any():
            rows = active[cont]
            tn = nxt[cont]
            pos[rows, axis[rows]] += (tn - t[cont]) * sign[rows]
            idx = rng.integers(0, 2 * d, rows.size)
            axis[rows] = idx // 2
            sign[rows] = (1 - 2 * (idx % 2)).astype(np.int64)
            cur_t[rows] = tn
        active = active[cont]
    return VisitStats(counts, late)
