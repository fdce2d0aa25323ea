"""Offline minimum-completion-time scheduling for a two-user AWGN broadcast
link powered by a known sequence of energy harvests."""

from .channel import (
    ChannelParams,
    DerivativeBundle,
    PowerSplit,
    RatePair,
    derivatives,
    min_power,
    rate_strong,
    rate_weak,
    split_power,
)
from .errors import (
    DomainError,
    FlowrightError,
    InconsistentBudget,
    Infeasible,
    InvalidInstance,
    InvalidUnits,
    MaxItersExceeded,
    NotEnoughEnergy,
    TooLarge,
)
from .instance import (
    EpochGrid,
    FeasibilityVerdict,
    Harvest,
    ProblemInstance,
    check_feasible,
    epochs_from_harvests,
    instance_from_dict,
    instance_to_dict,
    min_required_energy,
    to_normalized,
)
from .local_opt import (
    CausalityBudget,
    EpochState,
    TwoEpochSplit,
    find_local_optimal,
    tmin_two_epoch,
)
from .single_epoch import energy_for_duration, tmin_one_epoch
from .solver import (
    Band,
    LoadedSchedule,
    Schedule,
    Segment,
    SolveDiagnostics,
    completion_time,
    initialize,
    schedule_from_dict,
    solve,
)
from .verify import (
    CheckResult,
    VerificationReport,
    check_concavity_f1_f2,
    check_derivatives,
    check_structure,
    generate_instance,
    oracle_tmin,
)

__version__ = "0.1.0"

__all__ = [
    "Band",
    "CausalityBudget",
    "ChannelParams",
    "CheckResult",
    "DerivativeBundle",
    "DomainError",
    "EpochGrid",
    "EpochState",
    "FeasibilityVerdict",
    "FlowrightError",
    "Harvest",
    "InconsistentBudget",
    "Infeasible",
    "InvalidInstance",
    "InvalidUnits",
    "LoadedSchedule",
    "MaxItersExceeded",
    "NotEnoughEnergy",
    "PowerSplit",
    "ProblemInstance",
    "RatePair",
    "Schedule",
    "Segment",
    "SolveDiagnostics",
    "TooLarge",
    "TwoEpochSplit",
    "VerificationReport",
    "check_concavity_f1_f2",
    "check_derivatives",
    "check_feasible",
    "check_structure",
    "completion_time",
    "derivatives",
    "energy_for_duration",
    "epochs_from_harvests",
    "find_local_optimal",
    "generate_instance",
    "initialize",
    "instance_from_dict",
    "instance_to_dict",
    "min_power",
    "min_required_energy",
    "oracle_tmin",
    "rate_strong",
    "rate_weak",
    "schedule_from_dict",
    "solve",
    "split_power",
    "tmin_one_epoch",
    "tmin_two_epoch",
    "to_normalized",
]
