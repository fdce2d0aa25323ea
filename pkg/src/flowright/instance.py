"""Problem instances: harvests, epochs, unit conversion, feasibility.

Times are seconds and energies joules throughout.  Instances come in two
unit systems: "normalized" (bits already divided down so the channel layer's
per-use rate formulas apply with time in seconds) and "physical" (bits are
plain bits over a bandlimited channel of W hertz).  Converting a physical
instance divides the bit demands by 2W, which makes a normalized rate r per
real channel use equivalent to a delivered rate of 2*W*r bits per second,
i.e. r_phys = W*log2(1+SNR) for a single user.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .channel import ChannelParams
from .errors import InvalidInstance, InvalidUnits

_TWO_LN2 = 2.0 * math.log(2.0)


@dataclass(frozen=True)
class Harvest:
    """An instantaneous energy arrival: `energy` joules at `time` seconds."""

    time: float
    energy: float


@dataclass(frozen=True)
class ProblemInstance:
    """Bit demands, harvest profile and channel for one scheduling problem.

    `rate_scale` is the number of native bits represented by one normalized
    bit unit (1 for native-normalized instances, 2W after physical
    conversion); schedule output multiplies rates back by it.
    """

    b1: float
    b2: float
    harvests: tuple[Harvest, ...]
    channel: ChannelParams
    units: str = "normalized"
    bandwidth_hz: float | None = None
    rate_scale: float = 1.0

    def __post_init__(self):
        if self.b1 < 0.0 or self.b2 < 0.0:
            raise InvalidInstance(f"bit demands must be nonnegative, got ({self.b1}, {self.b2})")
        if self.b1 + self.b2 <= 0.0:
            raise InvalidInstance("at least one user must have bits to send")
        if not self.harvests:
            raise InvalidInstance("at least one harvest is required")
        if self.harvests[0].time != 0.0:
            raise InvalidInstance(
                f"the first harvest must arrive at t=0, got t={self.harvests[0].time}"
            )
        prev = -math.inf
        for h in self.harvests:
            if h.time <= prev:
                raise InvalidInstance("harvest times must be strictly increasing")
            if h.energy <= 0.0:
                raise InvalidInstance(f"harvest energies must be positive, got {h.energy}")
            prev = h.time
        if self.units not in ("normalized", "physical"):
            raise InvalidInstance(f"unknown unit system {self.units!r}")
        if self.units == "physical" and not (self.bandwidth_hz and self.bandwidth_hz > 0.0):
            raise InvalidUnits("physical instances need a positive bandwidth")

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(h.time for h in self.harvests)

    @property
    def energies(self) -> tuple[float, ...]:
        return tuple(h.energy for h in self.harvests)

    @property
    def total_energy(self) -> float:
        return sum(h.energy for h in self.harvests)


@dataclass(frozen=True)
class EpochGrid:
    """Finite inter-harvest durations; the epoch after the last harvest is
    open-ended until a schedule pins its length."""

    durations: tuple[float, ...]

    @property
    def total_span(self) -> float:
        return sum(self.durations)


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    total_energy: float
    required_energy: float

    @property
    def margin(self) -> float:
        return self.total_energy - self.required_energy

    @property
    def deficit(self) -> float:
        return max(0.0, self.required_energy - self.total_energy)


def epochs_from_harvests(instance: ProblemInstance) -> EpochGrid:
    """Inter-arrival durations of the harvest sequence."""
    t = instance.times
    return EpochGrid(tuple(t[i + 1] - t[i] for i in range(len(t) - 1)))


def to_normalized(instance: ProblemInstance) -> ProblemInstance:
    """Rescale a physical instance to normalized bit units (identity on
    already-normalized instances)."""
    if instance.units == "normalized":
        return instance
    scale = 2.0 * instance.bandwidth_hz
    return replace(
        instance,
        b1=instance.b1 / scale,
        b2=instance.b2 / scale,
        units="normalized",
        rate_scale=scale,
    )


def min_required_energy(instance: ProblemInstance) -> float:
    """Energy below which no finite completion time exists.

    This is the infinite-horizon limit of the energy needed for the bit
    demands: 2*ln2*sigma2*(b1/s1 + b2/s2) in normalized units.
    """
    norm = to_normalized(instance)
    ch = norm.channel
    return _TWO_LN2 * ch.sigma2 * (norm.b1 / ch.s1 + norm.b2 / ch.s2)


def check_feasible(instance: ProblemInstance) -> FeasibilityVerdict:
    """Strict feasibility screen: total harvested energy must exceed the
    asymptotic minimum (equality means unbounded completion time)."""
    required = min_required_energy(instance)
    total = instance.total_energy
    return FeasibilityVerdict(total > required, total, required)


def _pathloss_gain(pl_db: float) -> float:
    return 10.0 ** (-pl_db / 10.0)


def instance_from_dict(data: dict, time_unit: str = "s") -> ProblemInstance:
    """Build an instance from its JSON form.

    The channel block is either {"s1", "s2", "sigma2"} (normalized) or
    {"W_hz", "N0", "pathloss_db": [PL1, PL2]} (physical).  `time_unit` may
    be "h" to convert harvest times from hours on ingest.
    """
    try:
        b1, b2 = (float(x) for x in data["bits"])
        raw = [(float(h["t"]), float(h["E"])) for h in data["harvests"]]
        chan = data["channel"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInstance(f"malformed instance document: {exc}") from exc
    if time_unit == "h":
        raw = [(t * 3600.0, e) for t, e in raw]
    elif time_unit != "s":
        raise InvalidInstance(f"unknown time unit {time_unit!r}")
    harvests = tuple(Harvest(t, e) for t, e in raw)

    if "sigma2" in chan:
        params = ChannelParams(float(chan["s1"]), float(chan["s2"]), float(chan["sigma2"]))
        return ProblemInstance(b1, b2, harvests, params)
    if "W_hz" in chan:
        w = float(chan["W_hz"])
        n0 = float(chan["N0"])
        if w <= 0.0 or n0 <= 0.0:
            raise InvalidUnits(f"bandwidth and noise density must be positive, got W={w}, N0={n0}")
        pl1, pl2 = (float(x) for x in chan["pathloss_db"])
        params = ChannelParams(_pathloss_gain(pl1), _pathloss_gain(pl2), n0 * w)
        return ProblemInstance(b1, b2, harvests, params, units="physical", bandwidth_hz=w)
    raise InvalidInstance("channel block must carry either sigma2 or W_hz")


def instance_to_dict(instance: ProblemInstance) -> dict:
    """JSON form of an instance (times in seconds)."""
    out = {
        "bits": [instance.b1, instance.b2],
        "harvests": [{"t": h.time, "E": h.energy} for h in instance.harvests],
    }
    ch = instance.channel
    if instance.units == "physical":
        w = instance.bandwidth_hz
        out["channel"] = {
            "W_hz": w,
            "N0": ch.sigma2 / w,
            "pathloss_db": [-10.0 * math.log10(ch.s1), -10.0 * math.log10(ch.s2)],
        }
    else:
        out["channel"] = {"s1": ch.s1, "s2": ch.s2, "sigma2": ch.sigma2}
    return out
