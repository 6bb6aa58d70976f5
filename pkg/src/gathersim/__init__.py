"""Gathering of anonymous, oblivious mobile robots under crash faults.

A computational-geometry core (views, rotational symmetry, quasi-regularity,
Weber points, safe points), the destination rule of the wait-free gathering
protocol, and a deterministic semi-synchronous simulator with adversarial
scheduling, movement truncation and crash injection.
"""

from .configuration import (
    ConfigClass,
    Configuration,
    LocationSummary,
    classify,
    distinct_locations,
    is_gathered,
    median_interval,
    safe_points,
)
from .gathering import ComputeDecision, PotentialValue, compute, moving_set, potential
from .geometry import Circle, Point, Tolerance
from .simulator import AdversarySpec, RunResult, SimParams, SimState, TraceRecord, run, step
from .symmetry import (
    QRegularityResult,
    StringOfAngles,
    SymmetryReport,
    View,
    detect_quasi_regular,
    periodicity,
    qregular_test,
    regularity_at,
    string_of_angles,
    successor,
    symmetricity,
    view,
    weber_numeric,
    weber_point,
)

__all__ = [
    "AdversarySpec",
    "Circle",
    "ComputeDecision",
    "ConfigClass",
    "Configuration",
    "LocationSummary",
    "Point",
    "PotentialValue",
    "QRegularityResult",
    "RunResult",
    "SimParams",
    "SimState",
    "StringOfAngles",
    "SymmetryReport",
    "Tolerance",
    "TraceRecord",
    "View",
    "classify",
    "compute",
    "detect_quasi_regular",
    "distinct_locations",
    "is_gathered",
    "median_interval",
    "moving_set",
    "periodicity",
    "potential",
    "qregular_test",
    "regularity_at",
    "run",
    "safe_points",
    "step",
    "string_of_angles",
    "successor",
    "symmetricity",
    "view",
    "weber_numeric",
    "weber_point",
]

__version__ = "0.1.0"
