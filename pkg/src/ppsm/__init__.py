"""Statistics of pre/post-selected dichotomous events.

Models of three +/-1 valued events (pre-selection, intermediate
measurement, post-selection): exact probabilistic queries, anomalous
post-selected shift detection, quantum and classical model generators,
positivity-polytope geometry with margin maximization, and seeded Monte
Carlo estimation.
"""

from .model import (
    CIReport,
    CoefficientVector,
    DegenerateModel,
    DomainError,
    Outcome,
    OUTCOMES,
    PositivityViolation,
    ProbabilityTable,
    ShiftReport,
    SIGNS,
    ci_report,
    closed_form_shifts,
    coefficients_from_table,
    conditional_s,
    index_of,
    marginal_psiphi,
    shift_report,
    table_from_coefficients,
)
from .generators import (
    BoxWorld,
    QubitPair,
    WeakMeasurement,
    WeakValueReport,
    box_world_model,
    classical_disturbance,
    classical_maximal,
    quantum_oracle,
    quantum_strong,
    quantum_weak,
    weak_value,
    weak_value_report,
)
from .polytope import (
    BudgetExhausted,
    OptimizationResult,
    PolytopeFacet,
    facet_slacks,
    maximize_margin,
    min_slack,
    vertices,
)
from .montecarlo import EstimateReport, SampleBatch, estimate, sample

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
