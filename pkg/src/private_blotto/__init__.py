"""Private Blotto: polarized agents choosing items, with median or mean outcomes."""

from .errors import BlottoError
from .model import (
    AgentClass,
    Arrangement,
    FractionalAllocation,
    Instance,
    Outcome,
    class_cost,
    load_instance,
    mean_outcome,
    median_outcome,
)
from .stability import (
    DeviationWitness,
    Policy,
    SearchMode,
    StabilityReport,
    Terminal,
    Trajectory,
    best_response_dynamics,
    find_stable,
    find_stable_canonical,
    is_stable,
)

__all__ = [
    "AgentClass",
    "Arrangement",
    "BlottoError",
    "DeviationWitness",
    "FractionalAllocation",
    "Instance",
    "Outcome",
    "Policy",
    "SearchMode",
    "StabilityReport",
    "Terminal",
    "Trajectory",
    "best_response_dynamics",
    "class_cost",
    "find_stable",
    "find_stable_canonical",
    "is_stable",
    "load_instance",
    "mean_outcome",
    "median_outcome",
]

__version__ = "0.1.0"
