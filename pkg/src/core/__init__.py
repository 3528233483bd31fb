"""
Core numeric types: extended reals, vectors, support sets and norms
"""

from .extended_real import XReal, NEG_INF, POS_INF, low_add, upp_add, neg, sup_fold, inf_fold
from .vectors_norms import (
    SupportSet,
    as_vector,
    project,
    l0,
    topk_norm,
    ksupport_norm,
    l0_via_norm_chain,
    level_set_contains,
    support_fn_ball_K,
    normalization
)

__all__ = [
    'XReal',
    'NEG_INF',
    'POS_INF',
    'low_add',
    'upp_add',
    'neg',
    'sup_fold',
    'inf_fold',
    'SupportSet',
    'as_vector',
    'project',
    'l0',
    'topk_norm',
    'ksupport_norm',
    'l0_via_norm_chain',
    'level_set_contains',
    'support_fn_ball_K',
    'normalization'
]
