"""Statistical learning theory on finite domains, with credal-set extensions."""

from .bounds import (
    BoundReport,
    eps_finite_agnostic,
    eps_finite_realisable,
    eps_rademacher,
    gn_tail,
    hoeffding_tail,
    markov_bound,
    mcdiarmid_tail,
    sample_complexity_realisable,
    union_bound,
)
from .complexity import (
    LossClass,
    RademacherEstimate,
    empirical_rademacher_exact,
    empirical_rademacher_mc,
    rademacher_complexity,
    sup_deviation,
)
from .core import (
    ZERO_ONE,
    Dataset,
    Distribution,
    DomainSpace,
    Hypothesis,
    HypothesisClass,
    LossFunction,
    empirical_risk,
    erm,
    excess_risk,
    expected_risk,
    expected_risk_minimiser,
    sample_dataset,
    zero_one_loss,
)
from .credal import (
    CredalSet,
    RealisabilityReport,
    check_credal_realisability,
    check_uniform_credal_realisability,
    lower_risk,
    per_vertex_minimisers,
    realisability_report,
    sample_mixture,
    support_union,
    upper_risk,
)
from .errors import ConfigError, DomainMismatchError, EmptyDatasetError, SizeGuardError
from .seeding import SeedSpec

__version__ = "0.1.0"
