"""memheat: forward and inverse numerical laboratory for one-dimensional heat
conduction with memory,

    theta_t(x, t) = int_0^t k(t - s) theta_xx(x, s) ds,

with Dirichlet control at x = 0. Simulates the field, computes the
Dirichlet-to-Neumann boundary response, and reconstructs the memory kernel
from boundary data, including the finite-observation-time regime with a
quantified truncation-error gate.
"""
from ._backend import HAVE_COMPILED
from .kernels import (
    ConstantKernel,
    DiracDeltaKernel,
    ExponentialKernel,
    PolynomialHalfSquareKernel,
    SampledKernel,
    SumKernel,
    laplace_of_kernel,
    validate_K0,
    validate_no_zeros,
)
from .laplace import (
    AxisQuadratureSpec,
    BromwichFFTSpec,
    FrequencyGrid,
    TalbotSpec,
    TimeSignal,
    forward_laplace,
    inverse_laplace,
    project_RT_contour,
    project_RT_timedomain,
)
from .forward import (
    FieldSolution,
    Geometry,
    RampControl,
    SampledControl,
    closed_form_response,
    extract_response,
    modal_solution,
    omega,
    response_interval,
    response_semiaxis,
    response_time_semiaxis,
    solve_time_domain,
    theta_hat_semiaxis,
    theta_time_semiaxis,
)
from .inverse import (
    ReconstructionResult,
    ResponseRecord,
    make_synthetic_record,
    reconstruct_kernel_time,
    recover_K_semiaxis,
    recover_from_finite_data,
    recover_omega_interval,
)

__version__ = "0.1.0"
