"""Stochastic shear-flow laboratory: OU wall forcing, boundary-layer
calculus, closed-form dissipation bounds, and a desk-scale channel solver."""

from ._shearlab import (  # noqa: F401
    OUParams,
    __version__,
    delta,
    delta_inequality_margin,
    exact_step,
    expected_y_rate,
    f_derivatives,
    gibbs_check,
    grad_phi_norm_sq,
    int_fprime_sq,
    large_noise_bound,
    mean_bound,
    phi,
    quadratic_variation,
    sample_path,
    second_moment_bound,
    simulate_trajectory,
    stationary_central_moment,
    stationary_moment,
)
