"""Generalized von Neumann-Jordan constants of metrics on vector spaces."""
from njclab.core import (
    Bracket,
    ContractViolation,
    DegeneratePair,
    GaugeFunction,
    MetricSpace,
    Order,
    RatioSample,
    gauge,
    gauge_ratio,
    param_ratio,
    theorem_bounds,
)
from njclab.estimator import (
    ConstantEstimate,
    EstimationFailed,
    FormulationUnavailable,
    NoClosedForm,
    SearchConfig,
    closed_form_lookup,
    estimate,
    estimate_unit_sphere,
    witness_sequence_bound,
)
from njclab.kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Bracket", "ContractViolation", "DegeneratePair", "GaugeFunction", "MetricSpace", "Order",
    "RatioSample", "gauge", "gauge_ratio", "param_ratio", "theorem_bounds", "ConstantEstimate",
    "EstimationFailed", "FormulationUnavailable", "NoClosedForm", "SearchConfig", "closed_form_lookup",
    "estimate", "estimate_unit_sphere", "witness_sequence_bound",
]
