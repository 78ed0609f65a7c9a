"""Quantum decision theory engine.

Events and strategic states (:mod:`qdt.events`), composite prospects and
their operator-valued measure (:mod:`qdt.prospects`), separability
(:mod:`qdt.entanglement`), lottery-choice prediction (:mod:`qdt.lottery`) and
the quarter-law Monte Carlo (:mod:`qdt.quarterlaw`). Hot loops live in
:mod:`qdt._kernels`, compiled when available.
"""

__version__ = "0.1.0"

from .errors import (
    AmbiguousRankingError,
    ConfigError,
    ConvergenceError,
    DimensionError,
    InvariantViolation,
    NormalizationError,
    QDTError,
    SpaceMismatchError,
)
from .events import (
    ElementaryEvent,
    EventProbability,
    StatisticalOperator,
    UncertainUnion,
    event_probability,
    projector_of,
    uncertain_operator,
    uncertain_probability,
    union_probability,
)
from .linalg import HilbertSpace
from .lottery import (
    BeliefState,
    Lottery,
    PredictionReport,
    UtilityFunction,
    attraction_ranking,
    compare_to_empirical,
    expected_utility,
    predict,
    quarter_law_predict,
    utility_factors,
)
from .prospects import (
    CompositeSpace,
    ProbabilityDecomposition,
    Prospect,
    ProspectLattice,
    decohere,
    joint_probability,
    lattice_probabilities,
    marginal_additivity_check,
    povm_deviation,
    product_state,
    prospect_operator,
    prospect_probability,
    prospect_state,
)
from .entanglement import (
    ObservableAlgebra,
    SeparabilityReport,
    is_product_state,
    prospect_entanglement_gate,
    separability_test,
)
from .quarterlaw import AttractionDistribution, MCResult, estimate_aggregate, sample_lattice_q
