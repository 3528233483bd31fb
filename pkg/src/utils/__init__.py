"""
Utility modules for logging, vector file I/O and input validation
"""

from .logger import setup_logger
from .vector_io import load_vector, load_sample_set, save_sample_set
from .input_validator import validate_vector, validate_order, validate_sample_set

__all__ = [
    'setup_logger',
    'load_vector',
    'load_sample_set',
    'save_sample_set',
    'validate_vector',
    'validate_order',
    'validate_sample_set'
]
