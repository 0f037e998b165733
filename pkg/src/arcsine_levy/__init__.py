"""Arc-sine and Pareto factorizations of exponential functionals of Levy processes.

Modules
-------
special     complex gamma function and relatives
exponent    Levy-Khintchine exponents, tilts, duals and class membership
laws        closed-form positive laws (gamma, Pareto, arc-sine, stable, ...)
mellin      Mellin transforms: recurrences, closed forms, Monte Carlo, inversion
simulate    path simulation of exponential functionals and stable suprema
verify      statistical identity checks with JSON/CSV reports
config      exponent spec strings and experiment files
cli         command-line interface (``arcsine-levy``)
"""

__version__ = "0.1.0"

from .exponent import (  # noqa: E402
    CharExponent,
    brownian,
    classify,
    dual,
    evaluate,
    lamperti_stable,
    spectrally_positive,
    theorem_pair,
    tilt,
    tilted_stable,
)
from .mellin import MellinFunction, closed_form, invert_to_density, verify_recurrence  # noqa: E402
from .simulate import PathConfig, exp_functional, make_sampler, stable_supremum  # noqa: E402

__all__ = [
    "__version__",
    "CharExponent",
    "brownian",
    "lamperti_stable",
    "spectrally_positive",
    "tilted_stable",
    "evaluate",
    "classify",
    "tilt",
    "dual",
    "theorem_pair",
    "MellinFunction",
    "closed_form",
    "invert_to_density",
    "verify_recurrence",
    "PathConfig",
    "make_sampler",
    "exp_functional",
    "stable_supremum",
]
