"""
Closed-form Capra conjugates of l0 and of its level-set indicators
"""

from .capra_l0 import (
    ConjugateReport,
    conj_levelset_indicator,
    biconj_levelset_indicator,
    conj_l0,
    phi_ray,
    ray_base,
    biconj_l0,
    l0_on_sphere_via_fenchel
)

__all__ = [
    'ConjugateReport',
    'conj_levelset_indicator',
    'biconj_levelset_indicator',
    'conj_l0',
    'phi_ray',
    'ray_base',
    'biconj_l0',
    'l0_on_sphere_via_fenchel'
]
