"""Open quantum systems driven by Poisson white noise.

Dense-matrix tools for the Poisson-noise master equation, its telegraph
(two-qubit) bath realization and the collective spin models used to compare
the two.
"""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .operators import (
    commutator_superop,
    dagger,
    hermitian_eig,
    kron,
    left_superop,
    matrix_exponential,
    operator_function,
    right_superop,
    unvectorize,
    vectorize,
)
from .lindblad import (
    Trajectory,
    check_density_matrix,
    dissipator,
    expectation,
    gksl_liouvillian,
    propagate,
    steady_state,
)
from .quadrature import expweight_integrate
from .poisson import (
    PoissonMEParams,
    averaged_dissipator,
    gaussian_liouvillian,
    hermitian_coupling_liouvillian,
    jump_family,
    poisson_liouvillian,
)
from .models import (
    CollectiveModel,
    collective_model,
    dicke_state,
    effective_decay_rate,
    effective_decay_rate_quadrature,
    gaussian_decay_rate,
    gibbs_state,
    qubit_model,
)
from .telegraph import (
    BathParams,
    CorrelatorIndex,
    CorrelatorSpec,
    bath_liouvillian,
    correlationlike_analytic,
    correlationlike_numeric,
    npoint_analytic,
    npoint_numeric,
    two_point_analytic,
    whitenoise_area,
)
from .composite import CompositeSetup, composite_liouvillian, convergence_study, reduced_trajectory
from .multitime import MultiTimeSpec, multitime_exact, multitime_regression
