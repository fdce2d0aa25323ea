"""Minimum completion time for a fixed energy budget in one epoch.

The energy needed to move (b1, b2) bits in time T at one constant boundary
rate pair is f(T) = T * g(b1/T, b2/T), which is convex and strictly
decreasing in T.  The unique T at which f(T) equals the budget is found by
bisection on the energy residual.
"""

from __future__ import annotations

import math

from .channel import ChannelParams, min_power
from .errors import NotEnoughEnergy

_TWO_LN2 = 2.0 * math.log(2.0)
_WIDTH_FLOOR = 1e-12  # relative interval width at which bisection stops


def energy_for_duration(params: ChannelParams, b1: float, b2: float, t: float) -> float:
    """Energy consumed by transmitting (b1, b2) bits over t seconds at the
    single proportional boundary rate pair.  Infinite when t is too short to
    represent the rates in double precision."""
    if t <= 0.0:
        return math.inf if (b1 > 0.0 or b2 > 0.0) else 0.0
    return t * min_power(params, (b1 / t, b2 / t))


def tmin_one_epoch(
    energy: float,
    b1: float,
    b2: float,
    t_upper: float | None,
    params: ChannelParams,
    tol: float = 1e-9,
) -> float:
    """Smallest T with T*g(b1/T, b2/T) equal to `energy`, within t_upper.

    Terminates when the energy residual is within tol*energy, with an
    interval-width floor guaranteeing termination at double resolution.
    Pass t_upper=None for an open-ended window; the bracket is then grown by
    doubling (possible exactly when the budget strictly exceeds the
    asymptotic minimum energy for the bits).

    Raises NotEnoughEnergy when no T in (0, t_upper] spends only `energy`,
    i.e. the bits cannot be finished within the window on this budget.
    Zero bits return T = 0.
    """
    if b1 < 0.0 or b2 < 0.0:
        raise ValueError(f"bit amounts must be nonnegative, got ({b1}, {b2})")
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if b1 == 0.0 and b2 == 0.0:
        return 0.0
    if energy <= 0.0:
        raise NotEnoughEnergy(f"budget {energy} J cannot move ({b1}, {b2}) bits")

    eps_e = tol * energy

    if t_upper is None:
        ch = params
        floor = _TWO_LN2 * ch.sigma2 * (b1 / ch.s1 + b2 / ch.s2)
        if energy <= floor:
            raise NotEnoughEnergy(
                f"budget {energy} J is at or below the asymptotic minimum {floor} J"
            )
        t_upper = 1.0
        while energy_for_duration(params, b1, b2, t_upper) > energy:
            t_upper *= 2.0

    if t_upper <= 0.0:
        raise ValueError(f"t_upper must be positive, got {t_upper}")
    # the raise decision gets a fixed relative slack so that windows sitting
    # exactly on the root (a pair already at one shared rate pair) pass
    # through to the bisection instead of failing on float noise
    if energy_for_duration(params, b1, b2, t_upper) > energy * (1.0 + 1e-9) + eps_e:
        raise NotEnoughEnergy(
            f"({b1}, {b2}) bits need more than {energy} J within {t_upper} s"
        )

    lo, hi = 0.0, t_upper
    width_floor = _WIDTH_FLOOR * t_upper
    while True:
        mid = 0.5 * (lo + hi)
        spent = energy_for_duration(params, b1, b2, mid)
        if abs(spent - energy) <= eps_e:
            return mid
        if spent > energy:
            lo = mid  # too fast, needs more than the budget
        else:
            hi = mid
        if hi - lo <= width_floor:
            # hi always sits on the affordable side of the root
            return hi
