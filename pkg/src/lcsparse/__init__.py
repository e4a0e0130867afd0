"""Randomized degree sparsification for Min-Rep Label Cover, with exact
oracles and a Monte Carlo harness for checking its probabilistic claims."""

from .core import (
    EvalReport,
    Instance,
    Labeling,
    Multilabeling,
    ValidationError,
    degree_profile,
    eval_labeling,
    eval_multilabeling,
    validate_instance,
)
from .generators import GenSpec, corrupt, gen_planted, gen_random, gen_regular_bipartite

__all__ = [
    "EvalReport",
    "GenSpec",
    "Instance",
    "Labeling",
    "Multilabeling",
    "ValidationError",
    "corrupt",
    "degree_profile",
    "eval_labeling",
    "eval_multilabeling",
    "gen_planted",
    "gen_random",
    "gen_regular_bipartite",
    "validate_instance",
]
