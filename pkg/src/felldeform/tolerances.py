"""Every numerical tolerance used by checks, the CLI and the test-suite."""

EXACT_PHASE = 1e-12       # identities that only involve exact phases / pointwise algebra
INTERPOLATION = 1e-10     # identities that pass through Fourier resampling
SECOND_DERIVATIVE = 1e-9  # slack on second-derivative (Taylor) bounds
BRACKET = 1e-8            # Poisson bracket against closed-form derivatives
FINITE_DIFFERENCE = 1e-6  # analytic vs central-difference derivative at step 1e-4
LIMIT_PI2 = 1e-3          # residual / hbar against its limit at hbar = 1e-4
SLOPE = 1.0
SLOPE_TOL = 0.05
HALVING_TOL = 0.2         # successive differences halve under x2 refinement, +-20%
ADJOINT = 1e-6            # lower bounds of phi and its deformed adjoint

TABLE = {
    "exact_phase": EXACT_PHASE,
    "interpolation": INTERPOLATION,
    "second_derivative": SECOND_DERIVATIVE,
    "bracket": BRACKET,
    "finite_difference": FINITE_DIFFERENCE,
    "limit_pi2": LIMIT_PI2,
    "slope_tol": SLOPE_TOL,
    "halving_tol": HALVING_TOL,
    "adjoint": ADJOINT,
}
