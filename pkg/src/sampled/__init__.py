"""
Conjugacy over couplings evaluated on finite sample sets
"""

from .conjugacy_engine import (
    Coupling,
    SampledFunction,
    MappingTheta,
    conjugate,
    reverse_conjugate,
    biconjugate,
    dual_bound,
    infimal_postcomposition,
    make_one_sided_linear,
    capra_coupling,
    fenchel_coupling
)

__all__ = [
    'Coupling',
    'SampledFunction',
    'MappingTheta',
    'conjugate',
    'reverse_conjugate',
    'biconjugate',
    'dual_bound',
    'infimal_postcomposition',
    'make_one_sided_linear',
    'capra_coupling',
    'fenchel_coupling'
]
