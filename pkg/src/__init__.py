"""
capra-l0: Capra conjugacy and the l0 pseudonorm
Main package initialization
"""

__version__ = "1.0.0"
