"""Relative-entropy inference for discrete distributions and Markov chains."""

__version__ = "0.1.0"

from ._accel import backend
from .bayes import (
    DirichletParams,
    HypothesisSet,
    dirichlet_posterior_mean,
    penalized_score,
    posterior_over_hypotheses,
)
from .em import EMTrace, MixtureProblem, alternating_minimize, em_fit, em_projections, mixture_predict
from .errors import ConvergenceError, DomainError, FormatError, InfeasibleError, RelentError
from .estimators import (
    FitResult,
    fit_coarse_grained,
    fit_independence,
    fit_quasi_symmetry,
    fit_symmetry,
    fit_threeway,
)
from .hypothesis_tests import (
    TestReport,
    chernoff_information,
    np_mixture,
    np_solve_mu,
    test_composite,
    test_independence,
    test_nested,
    test_simple,
)
from .markov import (
    Alphabet,
    ConditionalModel,
    NGramTable,
    NormalizationSpec,
    SymbolSequence,
    anneal,
    cond_entropy,
    count_ngrams,
    detect_order,
    entropy_rate_markov1,
    fit_conditional,
    generate,
    gram_entropy,
    ingest_corpus,
    kappa,
    mix_additive,
    mix_multiplicative,
    order_scan,
    redundancy,
    test_order,
)
from .maxent import (
    LinearConstraint,
    MaxentResult,
    boltzmann_gibbs,
    maxent_coarse,
    maxent_linear,
    maxent_multi,
    maxent_symmetric,
    maxent_unobserved,
    sanov_mc_check,
)
from .simplex import (
    Distribution,
    JointTable,
    Partition,
    SquareTable,
    ThreeWayTable,
    chi_square_stat,
    coarse_grain,
    entropy,
    mutual_information,
    relative_entropy,
)
from .special import chi2_cdf, chi2_isf, chi2_quantile, chi2_sf, regularized_gamma_p, regularized_gamma_q
