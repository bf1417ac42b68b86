"""Particle Fokker-Planck solver with quasi-random noise."""

from ._core import (
    QUANTITIES,
    ScenarioConfig,
    compute_moments,
    default_config,
    fit_slope,
    inverse_normal_cdf,
    morton_deinterleave,
    morton_interleave,
    run_scenario,
    run_uniform_demo,
    sobol_points,
    strategies,
    __version__,
)

__all__ = [
    "QUANTITIES",
    "ScenarioConfig",
    "compute_moments",
    "default_config",
    "fit_slope",
    "inverse_normal_cdf",
    "morton_deinterleave",
    "morton_interleave",
    "run_scenario",
    "run_uniform_demo",
    "sobol_points",
    "strategies",
]
