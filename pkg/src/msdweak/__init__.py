"""Magic-state distillation under imperfect stabilizer measurements."""

__version__ = "0.1.0"

from .codes import StabilizerCode, builtin, load, loads, serialize, validate_code, css_distance
from .distill import DistillationMap, LogicalState, build_map, evaluate, evaluate_heterogeneous
from .dynamics import (
    RoundMap,
    T_BLOCH,
    convergence_rate,
    deviation_scan,
    dominant_eigenvalue,
    find_fixed_point,
    flow_grid,
    iterate,
    suppression_order_fit,
    threshold,
)
from .measurement import MeasurementModel, first_order_factor, lambda_of
from .pauli import PauliOperator, commutes, multiply, weight_profile
from .symplectic import ParityCheckMatrix, StandardFormResult, standard_form

__all__ = [
    "__version__",
    "StabilizerCode", "builtin", "load", "loads", "serialize", "validate_code",
    "css_distance",
    "DistillationMap", "LogicalState", "build_map", "evaluate",
    "evaluate_heterogeneous",
    "RoundMap", "T_BLOCH", "convergence_rate", "deviation_scan",
    "dominant_eigenvalue", "find_fixed_point", "flow_grid", "iterate",
    "suppression_order_fit", "threshold",
    "MeasurementModel", "first_order_factor", "lambda_of",
    "PauliOperator", "commutes", "multiply", "weight_profile",
    "ParityCheckMatrix", "StandardFormResult", "standard_form",
]
