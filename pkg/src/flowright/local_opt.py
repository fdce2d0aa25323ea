"""Pairwise local optimization over adjacent epochs.

Each local step re-solves the subproblem "transmit the pooled bits of two
adjacent epochs in minimum time using their pooled energy", subject to the
causality budget capping what the earlier epoch may consume.  Three regimes:

  (a) the budget alone finishes every pooled bit inside the earlier epoch,
      leaving an idle gap there and pushing surplus energy right;
  (b) one constant rate pair over both epochs respects the budget, so powers
      and rates equalize across the pair;
  (c) the budget binds: the earlier epoch is pinned at the budget and the
      split is resolved by the two-epoch solve below.

Pooled bits and pooled energy are conserved exactly in every branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .channel import ChannelParams, min_power, rate_strong, _weak_rate_raw
from .errors import InconsistentBudget, NotEnoughEnergy
from .single_epoch import tmin_one_epoch


@dataclass(frozen=True)
class EpochState:
    """Allocation of one epoch: assigned energy, bits, boundary rates, and
    the transmitting portion of the duration.

    `duration` is the harvest-to-harvest length (inf for the open tail after
    the final harvest); `used` is the part actually spent transmitting.
    """

    duration: float
    energy: float
    b1: float
    b2: float
    r1: float = 0.0
    r2: float = 0.0
    power: float = 0.0
    used: float = 0.0

    @property
    def bits_total(self) -> float:
        return self.b1 + self.b2

    @property
    def consumed(self) -> float:
        return self.power * self.used


@dataclass(frozen=True)
class CausalityBudget:
    """Most energy the earlier epoch of a pair may consume: everything
    harvested through it minus everything already spent before it, capped by
    the pair's pooled energy."""

    e_max: float


@dataclass(frozen=True)
class TwoEpochSplit:
    r1_first: float
    r2_first: float
    r1_second: float
    r2_second: float
    t_second: float  # transmitting time inside the later epoch


def tmin_two_epoch(
    e_first: float,
    e_second: float,
    b1: float,
    b2: float,
    xi_first: float,
    xi_second: float,
    params: ChannelParams,
    tol: float = 1e-9,
) -> TwoEpochSplit:
    """Rate split for a pair whose earlier epoch is pinned at `e_first`.

    The earlier epoch spends exactly e_first over its full duration, the
    later one spends e_second over a length solved here.  When continuing
    the stronger user's capped rate into the later epoch would oversupply
    the weaker user, the stronger user's rates differ across the epochs with
    the weaker user silent in the first; otherwise the stronger user keeps
    one rate across both and the split is bisected on that rate until the
    weaker user's bit total matches.

    Raises InconsistentBudget when no rate in the admissible bracket can
    meet the bit totals (the pinned assignment is not realizable).
    """
    if xi_first <= 0.0:
        raise ValueError(f"the earlier epoch needs positive duration, got {xi_first}")
    if b1 < 0.0 or b2 < 0.0:
        raise ValueError(f"bit amounts must be nonnegative, got ({b1}, {b2})")
    eps_b = tol * max(1.0, b2)

    def tail(rem1: float, rem2: float, t_up: float) -> tuple[float, float, float]:
        t = tmin_one_epoch(e_second, rem1, rem2, t_up, params, tol)
        if t <= 0.0:
            return 0.0, 0.0, 0.0
        return rem1 / t, rem2 / t, t

    if e_first <= 0.0:
        # nothing to spend early: the later epoch carries everything
        try:
            r1n, r2n, t2 = tail(b1, b2, None)
        except NotEnoughEnergy as exc:
            raise InconsistentBudget(str(exc)) from exc
        return TwoEpochSplit(0.0, 0.0, r1n, r2n, t2)

    p_first = e_first / xi_first
    cap = rate_strong(params, p_first, 0.0)

    if b1 <= 0.0:
        # weaker user only; the pinned epoch runs at its single-user point
        r2f = max(0.0, _weak_rate_raw(params, p_first, 0.0))
        rem2 = b2 - r2f * xi_first
        if rem2 <= eps_b:
            raise InconsistentBudget(
                "the pinned epoch alone oversupplies the weaker user"
            )
        try:
            _, r2n, t2 = tail(0.0, rem2, None)
        except NotEnoughEnergy as exc:
            raise InconsistentBudget(str(exc)) from exc
        return TwoEpochSplit(0.0, r2f, 0.0, r2n, t2)

    r1_hi = min(cap, b1 / xi_first)

    if cap < b1 / xi_first:
        # stronger user cannot finish inside the first epoch even alone;
        # test whether carrying its capped rate onward already gives the
        # weaker user too much
        t_eq = (b1 - cap * xi_first) / cap
        r2n_eq = _weak_rate_raw(params, e_second / t_eq, cap)
        if r2n_eq * t_eq - b2 > eps_b:
            rem1 = b1 - cap * xi_first
            t_up = max(xi_second, t_eq) * (1.0 + 1e-9)
            try:
                r1n, r2n, t2 = tail(rem1, b2, t_up)
            except NotEnoughEnergy as exc:
                raise InconsistentBudget(str(exc)) from exc
            return TwoEpochSplit(cap, 0.0, r1n, r2n, t2)

    # one stronger-user rate across the pair; bisect it on the weak user's
    # bit residual, which decreases in r1
    lo, hi = 0.0, r1_hi
    width_floor = 1e-12 * r1_hi
    while True:
        r1 = 0.5 * (lo + hi)
        t2 = (b1 - r1 * xi_first) / r1
        r2f = _weak_rate_raw(params, p_first, r1)
        r2n = _weak_rate_raw(params, e_second / t2, r1)
        btilde = r2f * xi_first + r2n * t2
        if abs(btilde - b2) <= eps_b:
            break
        if btilde > b2:
            lo = r1
        else:
            hi = r1
        if hi - lo <= width_floor:
            if abs(btilde - b2) > max(eps_b, 1e-6 * max(1.0, b2)):
                raise InconsistentBudget(
                    f"no stronger-user rate in [0, {r1_hi}] meets the bit totals "
                    f"(residual {btilde - b2})"
                )
            break
    return TwoEpochSplit(r1, max(0.0, r2f), r1, max(0.0, r2n), t2)


def _leftover(pool: float, taken: float) -> float:
    rem = pool - taken
    return rem if rem > 0.0 else 0.0


def find_local_optimal(
    first: EpochState,
    second: EpochState,
    budget: CausalityBudget,
    params: ChannelParams,
    tol: float = 1e-9,
) -> tuple[EpochState, EpochState, bool]:
    """Locally optimal reallocation of one adjacent epoch pair.

    Returns the updated pair and a finished flag that is set when every
    pooled bit ends inside the earlier epoch (a gap opens there and all
    surplus energy moves right).  Pooled bits and energy are conserved
    exactly.  The pair must be consistent (its current allocation must
    itself be feasible); on such input the pooled energy always suffices and
    NotEnoughEnergy never escapes.
    """
    b1p = first.b1 + second.b1
    b2p = first.b2 + second.b2
    e_pool = first.energy + second.energy

    if b1p == 0.0 and b2p == 0.0:
        # nothing to send: the pair is a pure energy conduit, everything
        # flows right for later pairs to pick up
        idle_first = replace(first, energy=0.0, r1=0.0, r2=0.0, power=0.0, used=0.0)
        idle_second = replace(second, energy=e_pool, r1=0.0, r2=0.0, power=0.0, used=0.0)
        return idle_first, idle_second, True

    e_max = min(budget.e_max, e_pool)
    window_second = second.duration if math.isfinite(second.duration) else second.used
    window = first.duration + window_second

    t_a = None
    try:
        t_a = tmin_one_epoch(e_max, b1p, b2p, window, params, tol)
    except NotEnoughEnergy:
        pass

    if t_a is not None and t_a <= first.duration:
        # (a) everything fits in the earlier epoch on the causal budget
        r1, r2 = b1p / t_a, b2p / t_a
        power = min_power(params, (r1, r2))
        e_first = min(power * t_a, e_pool)
        done = EpochState(first.duration, e_first, b1p, b2p, r1, r2, power, used=t_a)
        drained = EpochState(second.duration, e_pool - e_first, 0.0, 0.0, used=0.0)
        return done, drained, True

    if t_a is not None and e_max == e_pool:
        t_b = t_a
    else:
        t_b = tmin_one_epoch(e_pool, b1p, b2p, window, params, tol)
    r1b, r2b = b1p / t_b, b2p / t_b
    p_b = min_power(params, (r1b, r2b))
    e_first_eq = min(p_b * first.duration, e_pool)

    if e_first_eq <= e_max:
        # (b) powers and rates equalize across the pair
        b1f, b2f = r1b * first.duration, r2b * first.duration
        upd_first = EpochState(
            first.duration, e_first_eq, b1f, b2f, r1b, r2b, p_b, used=first.duration
        )
        upd_second = EpochState(
            second.duration,
            e_pool - e_first_eq,
            _leftover(b1p, b1f),
            _leftover(b2p, b2f),
            r1b,
            r2b,
            p_b,
            used=t_b - first.duration,
        )
        return upd_first, upd_second, False

    # (c) causality binds: pin the earlier epoch at the budget
    e_second = e_pool - e_max
    split = tmin_two_epoch(
        e_max, e_second, b1p, b2p, first.duration, window_second, params, tol
    )
    b1f, b2f = split.r1_first * first.duration, split.r2_first * first.duration
    upd_first = EpochState(
        first.duration,
        e_max,
        b1f,
        b2f,
        split.r1_first,
        split.r2_first,
        e_max / first.duration,
        used=first.duration,
    )
    p_second = e_second / split.t_second if split.t_second > 0.0 else 0.0
    upd_second = EpochState(
        second.duration,
        e_second,
        _leftover(b1p, b1f),
        _leftover(b2p, b2f),
        split.r1_second,
        split.r2_second,
        p_second,
        used=split.t_second,
    )
    return upd_first, upd_second, False
