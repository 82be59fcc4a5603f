"""Central table of default tolerances and method parameters.

Every operation receives its tolerances explicitly; these are the documented
defaults, collected in one place so a run manifest can record them.

========================  =========  =====================================================
name                      value      used by
========================  =========  =====================================================
TALBOT_NODES              48         inverse_laplace: starting node count
TALBOT_SCALE              12.0       inverse_laplace: contour radius r = scale/t
TALBOT_AGREEMENT          1e-9       inverse_laplace: doubling stop |v_2N - v_N|
TALBOT_MAX_DOUBLINGS      6          inverse_laplace: doubling cap before NonconvergentSum
SYMMETRY_TOL              1e-8       inverse_laplace: imaginary residual gate
ZERO_CHECK_TOL            1e-12      validate_no_zeros: |K(z)|*(1+|z|) threshold
K0_TOL                    1e-9       validate_K0: positivity floor for a^2 / residual slack
POLE_TOL_FACTOR           1e-8       response_interval: |sinh(wL)| <= factor*e^{|Re wL|}
NEWTON_RESIDUAL           1e-12      recover_omega_interval: |residual| <= tol*(1+|R/F|)
NEWTON_MAX_ITER           60         recover_omega_interval
NEWTON_MAX_HALVINGS       20         recover_omega_interval damping
BRANCH_TOL                1e-9       recover_K_semiaxis sign-consistency check
AXIS_EPS                  1e-3       project_RT_contour: line Re p = eps
AXIS_YMAX                 2e4        project_RT_contour: frequency cutoff
AXIS_GAUSS_ORDER          6          project_RT_contour: Gauss nodes per panel
AXIS_PANELS_PER_OSC       4          project_RT_contour: panels per oscillation period
TRUNCGATE_REL             0.02       recover_from_finite_data: eps(z)/a gate
NOISE_GATE_FACTOR         8.0        recover_from_finite_data: keep |R^T| >= factor*eps
CONSISTENCY_TOL           0.02       recover_from_finite_data: re-simulation residual gate
LINE_OMEGA_MAX            5e4        recover_from_finite_data: frequency window cap
UNSTABLE_GROWTH           1e6        solve_time_domain divergence detector
QUIET_TOL                 1e-6       finite-speed check: |theta| <= tol*max|f| before front
========================  =========  =====================================================
"""

TALBOT_NODES = 48
TALBOT_SCALE = 12.0
TALBOT_AGREEMENT = 1e-9
TALBOT_MAX_DOUBLINGS = 6
SYMMETRY_TOL = 1e-8
ZERO_CHECK_TOL = 1e-12
K0_TOL = 1e-9
POLE_TOL_FACTOR = 1e-8
NEWTON_RESIDUAL = 1e-12
NEWTON_MAX_ITER = 60
NEWTON_MAX_HALVINGS = 20
BRANCH_TOL = 1e-9
AXIS_EPS = 1e-3
AXIS_YMAX = 2e4
AXIS_GAUSS_ORDER = 6
AXIS_PANELS_PER_OSC = 4
TRUNCGATE_REL = 0.02
NOISE_GATE_FACTOR = 8.0
CONSISTENCY_TOL = 0.02
LINE_OMEGA_MAX = 5e4
UNSTABLE_GROWTH = 1e6
QUIET_TOL = 1e-6


def as_dict() -> dict:
    """All defaults as a plain dict (recorded in run manifests)."""
    return {k: v for k, v in globals().items() if k.isupper()}
