"""Entropic non-Gaussianity of N-mode bosonic states in truncated Fock space.

The distance from a state to the set of Gaussian states, measured by
relative entropy, is attained at the Gaussian state sharing its first and
second quadrature moments; the minimal value is the difference of von
Neumann entropies.  This package computes that measure, realizes the
associate Gaussian in a truncated Fock basis, evaluates the closed forms
available for Fock-diagonal states, and verifies the extremal claims by
independent brute-force search.
"""

from .errors import (
    ConfigMismatchError,
    DimensionLimitError,
    NonGaussError,
    StateValidationError,
    TruncationError,
    TruncationWarning,
    UncertaintyViolationError,
)
from .fock_space import (
    DEFAULT_CUTOFF,
    DEFAULT_MAX_DIM,
    DensityMatrix,
    Diagnostics,
    ModeConfig,
    QuadratureOps,
    build_operators,
    coherent_state,
    fock_projector,
    partial_trace,
    superposition_01,
    tensor,
    vacuum,
    validate,
)
from .moments import Moments, check_uncertainty, covariance, displacement, extract, symplectic_form
from .gaussian_states import (
    NBAR_FLOOR,
    AssociateFit,
    GaussianLogForm,
    GaussianParams,
    associate_gaussian,
    fit_associate,
    gaussian_entropy,
    log_form,
    single_mode_gaussian,
    synthesize_gaussian,
    thermal_state,
    williamson,
)
from .entropy_measures import (
    IdentityCheck,
    NonGaussReport,
    gaussian_cross_entropy,
    nongaussianity,
    relative_entropy,
    shannon,
    theorem1_identity,
    von_neumann,
)
from .fock_diagonal import (
    FockDiagonal,
    MarginalSet,
    closest_gaussian_fds,
    dephase,
    dephasing_entropy_gain,
    fds_covariance,
    marginals,
    nongauss_fds,
    nongauss_product,
    product_state,
    single_mode_fds,
    to_density_matrix,
    total_mutual_information,
)
from .verifier import (
    MaxEntropyReport,
    NearestFdsReport,
    SearchResult,
    SearchSpec,
    brute_force_closest_gaussian,
    max_entropy_sampling,
    nearest_fds_search,
)

__version__ = "0.1.0"
