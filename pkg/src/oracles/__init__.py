"""
Brute-force reference implementations
"""

from .bruteforce import OracleResult, topk_norm_bruteforce, dual_norm_bruteforce, hull_membership_sampled
from .moreau_table import moreau_law_table

__all__ = [
    'OracleResult',
    'topk_norm_bruteforce',
    'dual_norm_bruteforce',
    'hull_membership_sampled',
    'moreau_law_table'
]
