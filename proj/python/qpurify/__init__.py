"""Time-optimal purification of a qubit coupled to a dissipative two-level system."""

from ._qpurify import (
    ModelParams,
    QpurifyError,
    commands,
    delta_p,
    min_eigenvalue,
    mu_max,
    propagate_full,
    propagate_reduced,
    region,
    regime,
    run,
    s2_resonant_solution,
    t_min_numeric,
    t_min_uncorrelated,
    x_to_z,
    xi_fixed,
    xi_max,
)

__all__ = [
    "ModelParams",
    "QpurifyError",
    "commands",
    "delta_p",
    "min_eigenvalue",
    "mu_max",
    "propagate_full",
    "propagate_reduced",
    "region",
    "regime",
    "run",
    "s2_resonant_solution",
    "t_min_numeric",
    "t_min_uncorrelated",
    "x_to_z",
    "xi_fixed",
    "xi_max",
]
