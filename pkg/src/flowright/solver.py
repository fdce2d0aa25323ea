"""Initialization, sweep iteration, and termination of the FlowRight solver.

The initial schedule spends each harvest inside its own epoch at the bit
ratio of the two users.  Each iteration then sweeps adjacent epoch pairs
left to right, locally re-optimizing energy and bit allocations under a
causality budget recomputed from the original harvests minus consumption
finalized earlier in the sweep.  Completion time strictly decreases every
sweep until the change falls below the stop threshold; the fixed point is
the unique optimal schedule.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .channel import min_power, split_power
from .errors import Infeasible, MaxItersExceeded, NotEnoughEnergy
from .instance import ProblemInstance, check_feasible, to_normalized
from .local_opt import CausalityBudget, EpochState, find_local_optimal
from .single_epoch import tmin_one_epoch

_INNER_TOL = 1e-12  # residual tolerance of the bisections inside a solve


@dataclass(frozen=True)
class Segment:
    """One constant-rate stretch of a schedule, in native units."""

    t_start: float
    t_end: float
    power: float
    r1: float
    r2: float

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class Band:
    """A maximal run of consecutive epochs sharing one power level."""

    first: int  # epoch indices, 0-based inclusive
    last: int
    power: float
    duration: float
    energy: float


@dataclass(frozen=True)
class Schedule:
    """A feasible transmission plan: per-epoch allocations plus the instant
    both users' demands are exhausted."""

    harvest_times: tuple[float, ...]
    states: tuple[EpochState, ...]
    completion_time: float
    rate_scale: float = 1.0

    @property
    def n_used(self) -> int:
        return len(self.states)

    @property
    def unused_harvests(self) -> tuple[int, ...]:
        """1-based indices of harvests the schedule leaves untouched."""
        return tuple(range(self.n_used + 1, len(self.harvest_times) + 1))

    def segments(self) -> list[Segment]:
        out = []
        for i, st in enumerate(self.states):
            if st.used <= 0.0:
                continue
            t0 = self.harvest_times[i]
            out.append(
                Segment(t0, t0 + st.used, st.power, st.r1 * self.rate_scale, st.r2 * self.rate_scale)
            )
        return out

    def powers(self) -> list[float]:
        return [st.power for st in self.states]

    def delivered_bits(self) -> tuple[float, float]:
        b1 = sum(st.b1 for st in self.states) * self.rate_scale
        b2 = sum(st.b2 for st in self.states) * self.rate_scale
        return b1, b2

    def power_bands(self, rtol: float = 1e-3) -> list[Band]:
        """Group consecutive used epochs whose powers agree within rtol."""
        bands: list[Band] = []
        for i, st in enumerate(self.states):
            if bands and abs(st.power - bands[-1].power) <= rtol * max(st.power, bands[-1].power):
                b = bands[-1]
                bands[-1] = Band(
                    b.first, i, b.power, b.duration + st.used, b.energy + st.consumed
                )
            else:
                bands.append(Band(i, i, st.power, st.used, st.consumed))
        return bands

    def to_dict(self, iterations: int | None = None) -> dict:
        return {
            "T": self.completion_time,
            "iterations": iterations,
            "unused_harvests": list(self.unused_harvests),
            "segments": [
                {
                    "t_start": s.t_start,
                    "t_end": s.t_end,
                    "power_W": s.power,
                    "r1": s.r1,
                    "r2": s.r2,
                }
                for s in self.segments()
            ],
        }


@dataclass(frozen=True)
class LoadedSchedule:
    """Schedule rebuilt from its JSON form; enough surface for checking and
    export (segments in native units plus the completion time)."""

    _segments: tuple[Segment, ...]
    completion_time: float
    unused_harvests: tuple[int, ...] = ()

    def segments(self) -> list[Segment]:
        return list(self._segments)


def schedule_from_dict(data: dict) -> LoadedSchedule:
    segs = tuple(
        Segment(
            float(s["t_start"]),
            float(s["t_end"]),
            float(s["power_W"]),
            float(s["r1"]),
            float(s["r2"]),
        )
        for s in data["segments"]
    )
    return LoadedSchedule(segs, float(data["T"]), tuple(data.get("unused_harvests", ())))


@dataclass
class SolveDiagnostics:
    """Per-solve record: sweep count, completion-time trajectory, active
    epoch counts, and why the loop stopped.

    `iterations` counts sweeps until the completion-time improvement fell
    below the stop threshold; `polish_sweeps` counts the extra sweeps run
    afterwards to make the allocation itself stationary (completion time is
    quantized by bisection and can stall a little before the rates do).
    """

    iterations: int = 0
    t_history: list[float] = field(default_factory=list)
    n_history: list[int] = field(default_factory=list)
    stop_reason: str = ""
    wall_time: float = 0.0
    epsilon_stop: float = 0.0
    polish_sweeps: int = 0


def completion_time(schedule) -> float:
    """Total transmitting time of a schedule (equals the stored completion
    time whenever the schedule has no interior idle gaps)."""
    return sum(seg.t_end - seg.t_start for seg in schedule.segments())


def _greedy_init(norm: ProblemInstance, frac: float) -> Schedule | None:
    """One greedy pass: interior epochs consume `frac` of their own harvest
    over their full length at the bit ratio, deferring the rest to the open
    tail; the last epoch used spends its whole budget on the residual bits
    in minimum time.  None when even the tail budget cannot finish them."""
    params = norm.channel
    times = norm.times
    energies = norm.energies
    k = len(times)
    ratio = math.inf if norm.b2 == 0.0 else norm.b1 / norm.b2

    rem1, rem2 = norm.b1, norm.b2
    deferred = 0.0
    states: list[EpochState] = []
    for i in range(k):
        open_tail = i == k - 1
        xi = math.inf if open_tail else times[i + 1] - times[i]
        e_i = energies[i] * (1.0 if open_tail else frac)
        if open_tail:
            e_i += deferred
        # the epoch consumes exactly its budget; if that can finish the
        # residual bits inside the epoch, this one is the last
        try:
            t_last = tmin_one_epoch(
                e_i, rem1, rem2, None if open_tail else xi, params, _INNER_TOL
            )
        except NotEnoughEnergy:
            t_last = None
        if t_last is not None:
            r1 = rem1 / t_last if t_last > 0.0 else 0.0
            r2 = rem2 / t_last if t_last > 0.0 else 0.0
            states.append(
                EpochState(xi, e_i, rem1, rem2, r1, r2, min_power(params, (r1, r2)), used=t_last)
            )
            t_up = times[len(states) - 1] + states[-1].used
            return Schedule(times, tuple(states), t_up, norm.rate_scale)
        if open_tail:
            return None
        # otherwise spread the budget over the whole epoch at the bit ratio
        p = e_i / xi
        deferred += energies[i] - e_i
        (r1, r2), _ = split_power(params, p, ratio)
        states.append(EpochState(xi, e_i, r1 * xi, r2 * xi, r1, r2, p, used=xi))
        rem1 = max(0.0, rem1 - r1 * xi)
        rem2 = max(0.0, rem2 - r2 * xi)
    return None  # bit pools hit zero exactly at a boundary: not reachable


def initialize(instance: ProblemInstance) -> Schedule:
    """Greedy feasible start: each epoch consumes exactly its own harvest.

    Interior epochs spread their harvest over the whole epoch at the
    boundary point matching the bit ratio; the last epoch used spends its
    budget on the residual bits in minimum time, so the transmission stops
    partway through it.  When the final harvest cannot cover the bits the
    greedy pass leaves over (energy burned early at poor efficiency), the
    pass is retried with interior epochs consuming a halved fraction of
    their harvests, deferring the remainder to the tail; strict feasibility
    guarantees some fraction works.
    """
    norm = to_normalized(instance)
    verdict = check_feasible(norm)
    if not verdict.feasible:
        raise Infeasible(
            f"harvested energy {verdict.total_energy} J cannot deliver the bit demands "
            f"(needs more than {verdict.required_energy} J)",
            deficit=verdict.deficit,
        )
    frac = 1.0
    for _ in range(80):
        sched = _greedy_init(norm, frac)
        if sched is not None:
            return sched
        frac *= 0.5
    raise Infeasible("no feasible greedy initialization found")  # pragma: no cover


def _mean_epoch_duration(instance: ProblemInstance, fallback: float) -> float:
    t = instance.times
    if len(t) < 2:
        return fallback
    return (t[-1] - t[0]) / (len(t) - 1)


def solve(
    instance: ProblemInstance,
    tol: float = 1e-9,
    max_iters: int | None = None,
    initial: Schedule | None = None,
) -> tuple[Schedule, SolveDiagnostics]:
    """Run FlowRight to the minimum completion time of the instance.

    Stops once an iteration improves the completion time by less than
    tol times the mean epoch duration.  `initial` may supply an alternative
    feasible starting schedule (normalized units); by default the greedy
    initialization is used.  max_iters defaults to 50*n^2 for n initial
    epochs; exceeding it raises MaxItersExceeded carrying the best schedule
    and diagnostics so far.
    """
    started = time.perf_counter()
    norm = to_normalized(instance)
    params = norm.channel
    sched0 = initial if initial is not None else initialize(instance)

    times = norm.times
    energies = norm.energies
    states = list(sched0.states)
    n = len(states)
    if max_iters is None:
        max_iters = max(50 * n * n, 50)

    t_now = sched0.completion_time
    eps_stop = tol * _mean_epoch_duration(norm, fallback=max(t_now, 1.0))
    diag = SolveDiagnostics(t_history=[t_now], n_history=[n], epsilon_stop=eps_stop)

    def make_schedule() -> Schedule:
        return Schedule(times, tuple(states[:n]), t_now, norm.rate_scale)

    def run_sweep():
        nonlocal n
        consumed_before = 0.0  # finalized assignment strictly before the pair
        cum_harvested = energies[0]
        for i in range(n - 1):
            cap = cum_harvested - consumed_before
            budget = CausalityBudget(min(cap, states[i].energy + states[i + 1].energy))
            states[i], states[i + 1], _ = find_local_optimal(
                states[i], states[i + 1], budget, params, _INNER_TOL
            )
            consumed_before += states[i].energy
            cum_harvested += energies[i + 1]
        while n > 1 and states[n - 1].bits_total == 0.0:
            n -= 1

    for sweep in range(1, max_iters + 1):
        run_sweep()
        t_prev, t_now = t_now, times[n - 1] + states[n - 1].used
        diag.t_history.append(t_now)
        diag.n_history.append(n)
        diag.iterations = sweep
        if t_prev - t_now < eps_stop:
            diag.stop_reason = "converged"
            break
    else:
        diag.stop_reason = "max_iters"
        diag.wall_time = time.perf_counter() - started
        raise MaxItersExceeded(
            f"no convergence after {max_iters} sweeps",
            schedule=make_schedule(),
            diagnostics=diag,
        )

    # Completion time is quantized by the inner bisections and can stop
    # moving a few sweeps before the per-epoch allocation does.  Keep
    # sweeping until the rates themselves are stationary so the returned
    # schedule carries the fixed point's structure, not just its length.
    rate_scale = max(max(st.r1 for st in states[:n]), max(st.r2 for st in states[:n]), 1e-300)
    for extra in range(1, 20 * n + 20):
        before = [(st.r1, st.r2) for st in states[:n]]
        run_sweep()
        delta = max(
            max(abs(st.r1 - b[0]), abs(st.r2 - b[1]))
            for st, b in zip(states[:n], before)
        )
        diag.polish_sweeps = extra
        if delta <= 1e-10 * rate_scale:
            break
    t_now = times[n - 1] + states[n - 1].used

    diag.wall_time = time.perf_counter() - started
    return make_schedule(), diag
