"""Reordering-buffer scheduling on a line of equidistant sites.

Instance generation (recursive blocks, anchors, mirrored phases, packet
scaling), policy simulation, exact small-instance optima with an
independent enumeration oracle, and verifiers for the recurrence /
closed-form lower bounds.
"""

from .core import (
    ADMIT,
    ANCHOR,
    GENERIC,
    REGULAR,
    CostReport,
    IllegalSchedule,
    Instance,
    Meta,
    Request,
    Schedule,
    ValidationReport,
    replay_schedule,
    serve,
    validate_instance,
)
from .genesis import (
    SeparationParams,
    build_instance,
    build_phase,
    instance_from_params,
    scale_packets,
    theorem1_params,
)
from .policies import POLICIES, CapacityViolation, simulate
from .optsolve import (
    ORACLE_MAX_REQUESTS,
    ResourceExceeded,
    SolveLimits,
    TooLarge,
    exhaustive_oracle,
    optimal_cost,
    ucs_cost,
)
from .bounds import (
    BoundTable,
    GridReport,
    TauParams,
    f_bound,
    separation_bound,
    t_hat,
    tau,
    verify_induction_steps,
    verify_tau_dominated,
)

__version__ = "0.1.0"

__all__ = [
    "ADMIT",
    "ANCHOR",
    "GENERIC",
    "REGULAR",
    "CostReport",
    "IllegalSchedule",
    "Instance",
    "Meta",
    "Request",
    "Schedule",
    "ValidationReport",
    "replay_schedule",
    "serve",
    "validate_instance",
    "SeparationParams",
    "build_instance",
    "build_phase",
    "instance_from_params",
    "scale_packets",
    "theorem1_params",
    "POLICIES",
    "CapacityViolation",
    "simulate",
    "ORACLE_MAX_REQUESTS",
    "ResourceExceeded",
    "SolveLimits",
    "TooLarge",
    "exhaustive_oracle",
    "optimal_cost",
    "ucs_cost",
    "BoundTable",
    "GridReport",
    "TauParams",
    "f_bound",
    "separation_bound",
    "t_hat",
    "tau",
    "verify_induction_steps",
    "verify_tau_dominated",
]
