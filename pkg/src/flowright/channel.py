"""Rate-region math for a two-user AWGN broadcast link.

Everything here uses the normalized convention: rates are bits per real
channel use (the 1/2*log2 form) and powers share one linear unit with the
noise variance.  Physical-unit handling lives in the instance layer, which
rescales bits so that these formulas apply unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError

_LN2 = math.log(2.0)
_LOG2E = 1.0 / _LN2
_EXP_CAP = 700.0  # beyond this exponent 2**x overflows a double
_RATE_SLACK = 1e-9  # forgiveness for boundary roundoff in h1/h2


def _pow2(x: float) -> float:
    """2**x, saturating to inf instead of raising OverflowError."""
    y = x * _LN2
    if y > _EXP_CAP:
        return math.inf
    return math.exp(y)


def _pow2m1(x: float) -> float:
    """2**x - 1 with full relative precision near zero."""
    y = x * _LN2
    if y > _EXP_CAP:
        return math.inf
    return math.expm1(y)


@dataclass(frozen=True)
class ChannelParams:
    """Linear channel power gains and noise variance.

    User 1 is the strictly stronger receiver: s1 > s2 > 0.  sigma2 is the
    AWGN variance in the same power unit as transmit power.
    """

    s1: float
    s2: float
    sigma2: float

    def __post_init__(self):
        if not (self.s1 > self.s2 > 0.0):
            raise ValueError(
                f"channel gains must satisfy s1 > s2 > 0, got s1={self.s1}, s2={self.s2}"
            )
        if not self.sigma2 > 0.0:
            raise ValueError(f"noise variance must be positive, got {self.sigma2}")


class RatePair(NamedTuple):
    """A (stronger, weaker) rate pair in bits per channel use."""

    r1: float
    r2: float


class PowerSplit(NamedTuple):
    """Fraction of total power given to the stronger user, and both shares."""

    alpha: float
    p1: float
    p2: float


@dataclass(frozen=True)
class DerivativeBundle:
    """First and second partials of the boundary rate functions.

    The strong-user function is differentiated with respect to total power P
    and the weaker user's rate r; the weak-user function with respect to P
    and the stronger user's rate r.  Both mixed partials of the weak-user
    function are identically zero.
    """

    dh1_dP: float
    dh1_dr: float
    d2h1_dP2: float
    d2h1_dr2: float
    d2h1_drdP: float
    d2h1_dPdr: float
    dh2_dP: float
    dh2_dr: float
    d2h2_dP2: float
    d2h2_dr2: float
    d2h2_drdP: float
    d2h2_dPdr: float


def min_power(params: ChannelParams, rates) -> float:
    """Minimum total power that puts the rate pair on the region boundary.

    Strictly increasing and strictly convex in each rate; zero rates need
    zero power.  Total on the nonnegative quadrant.
    """
    r1, r2 = rates
    if r1 < 0.0 or r2 < 0.0:
        raise DomainError(f"rates must be nonnegative, got ({r1}, {r2})")
    s1, s2, sg = params.s1, params.s2, params.sigma2
    return sg * (_pow2m1(2.0 * r2) / s2 + _pow2m1(2.0 * r1) * _pow2(2.0 * r2) / s1)


def rate_strong(params: ChannelParams, power: float, r2: float = 0.0) -> float:
    """Boundary rate of the stronger user at total power `power` when the
    weaker user gets rate `r2`.

    Raises DomainError when r2 exceeds the weaker user's single-user rate at
    this power (the result would be negative).
    """
    if power < 0.0:
        raise DomainError(f"power must be nonnegative, got {power}")
    if r2 < 0.0:
        raise DomainError(f"r2 must be nonnegative, got {r2}")
    s1, s2, sg = params.s1, params.s2, params.sigma2
    arg = s1 * (s2 * power + sg) / (s2 * sg * _pow2(2.0 * r2)) - (s1 - s2) / s2
    if arg <= 0.0:
        raise DomainError(
            f"r2={r2} is far above the weaker user's single-user rate at P={power}"
        )
    val = 0.5 * math.log2(arg)
    if val < 0.0:
        if val > -_RATE_SLACK:
            return 0.0
        raise DomainError(
            f"r2={r2} exceeds the weaker user's single-user rate at P={power}"
        )
    return val


def _weak_rate_raw(params: ChannelParams, power: float, r1: float) -> float:
    # No domain clamp: may return a negative value when r1 is not
    # achievable at this power.  Solver internals rely on the sign.
    s1, s2, sg = params.s1, params.s2, params.sigma2
    num = s2 * power / sg + 1.0
    den = (s2 / s1) * _pow2m1(2.0 * r1) + 1.0
    if math.isinf(den):
        return -math.inf
    return 0.5 * math.log2(num / den)


def rate_weak(params: ChannelParams, power: float, r1: float = 0.0) -> float:
    """Boundary rate of the weaker user at total power `power` when the
    stronger user gets rate `r1`.

    Raises DomainError when r1 exceeds the stronger user's single-user rate
    at this power.
    """
    if power < 0.0:
        raise DomainError(f"power must be nonnegative, got {power}")
    if r1 < 0.0:
        raise DomainError(f"r1 must be nonnegative, got {r1}")
    val = _weak_rate_raw(params, power, r1)
    if val < 0.0:
        if val > -_RATE_SLACK:
            return 0.0
        raise DomainError(
            f"r1={r1} exceeds the stronger user's single-user rate at P={power}"
        )
    return val


def split_power(
    params: ChannelParams, power: float, bit_ratio: float
) -> tuple[RatePair, PowerSplit]:
    """Boundary rate pair whose ratio r1/r2 equals `bit_ratio`, at the given
    total power, together with the power split that achieves it.

    bit_ratio is B1/B2.  The degenerate ratios are handled, not raised:
    bit_ratio = inf (B2 = 0) returns the stronger user's single-user point,
    bit_ratio = 0 (B1 = 0) the weaker user's.  The interior case bisects on
    the power fraction alpha; the ratio balance is evaluated in log form so
    that huge bit counts never exponentiate.
    """
    if power <= 0.0:
        raise DomainError(f"power must be positive, got {power}")
    if math.isnan(bit_ratio) or bit_ratio < 0.0:
        raise DomainError(f"bit ratio must be in [0, inf], got {bit_ratio}")
    if bit_ratio == 0.0:
        return RatePair(0.0, rate_weak(params, power, 0.0)), PowerSplit(0.0, 0.0, power)
    if math.isinf(bit_ratio):
        return RatePair(rate_strong(params, power, 0.0), 0.0), PowerSplit(1.0, power, 0.0)

    s1, s2, sg = params.s1, params.s2, params.sigma2
    snr1 = s1 * power / sg

    def balance(a: float) -> float:
        # log(1 + a*snr1) - ratio * log(1 + weak SINR); increasing in a.
        weak = (1.0 - a) * s2 * power / (a * s2 * power + sg)
        return math.log1p(a * snr1) - bit_ratio * math.log1p(weak)

    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if balance(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    alpha = 0.5 * (lo + hi)
    r1 = 0.5 * _LOG2E * math.log1p(alpha * snr1)
    r2 = max(0.0, _weak_rate_raw(params, power, r1))
    return RatePair(r1, r2), PowerSplit(alpha, alpha * power, (1.0 - alpha) * power)


def derivatives(params: ChannelParams, power: float, r: float) -> DerivativeBundle:
    """Closed-form partials of both boundary rate functions at (power, r).

    (power, r) must lie in the valid domain of both functions, i.e. r may
    not exceed the weaker user's single-user rate at this power.
    """
    if power < 0.0 or r < 0.0:
        raise DomainError(f"need power >= 0 and r >= 0, got ({power}, {r})")
    cap = rate_weak(params, power, 0.0)
    if r > cap + _RATE_SLACK:
        raise DomainError(f"r={r} is outside the strong-rate domain at P={power} (cap {cap})")

    s1, s2, sg = params.s1, params.s2, params.sigma2
    t = _pow2(2.0 * r)
    d = s1 * s2 * power + s1 * sg - (s1 - s2) * sg * t  # > 0 on the domain
    n = s1 * s2 * power + s1 * sg
    mixed_h1 = s1 * s2 * (s1 - s2) * sg * t / d**2

    den2 = (t - 1.0) + s1 / s2
    return DerivativeBundle(
        dh1_dP=0.5 * _LOG2E * s1 * s2 / d,
        dh1_dr=-n / d,
        d2h1_dP2=-0.5 * _LOG2E * (s1 * s2) ** 2 / d**2,
        d2h1_dr2=-(2.0 * _LN2) * (s1 - s2) * n * sg * t / d**2,
        d2h1_drdP=mixed_h1,
        d2h1_dPdr=mixed_h1,
        dh2_dP=0.5 * _LOG2E * s2 / (s2 * power + sg),
        dh2_dr=-t / den2,
        d2h2_dP2=-0.5 * _LOG2E * s2**2 / (s2 * power + sg) ** 2,
        d2h2_dr2=-(2.0 * _LN2) * t * ((s1 - s2) / s2) / den2**2,
        d2h2_drdP=0.0,
        d2h2_dPdr=0.0,
    )
