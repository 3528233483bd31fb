"""
Input Validation Module
Validates loaded vectors, sample sets and norm parameters before they reach
the numerical code
"""

from typing import Any, Dict, Optional

import numpy as np

from src.utils.logger import setup_logger

logger = setup_logger(__name__)


def _new_results() -> Dict[str, Any]:
    return {
        'is_valid': True,
        'errors': [],
        'warnings': [],
        'stats': {}
    }


def validate_vector(values: np.ndarray, zero_tol: float = 0.0) -> Dict[str, Any]:
    """
    Validate a vector for use as a primal or dual point

    Args:
        values: Loaded vector
        zero_tol: Threshold under which entries count as zero

    Returns:
        Dictionary with validation results
    """
    validation_results = _new_results()

    try:
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            validation_results['is_valid'] = False
            validation_results['errors'].append(f"Expected a nonempty flat vector, got shape {values.shape}")
            return validation_results

        if zero_tol < 0:
            validation_results['is_valid'] = False
            validation_results['errors'].append(f"zero_tol must be >= 0, got {zero_tol}")

        if np.isnan(values).any():
            validation_results['is_valid'] = False
            validation_results['errors'].append("Vector contains NaN entries")
        if np.isinf(values).any():
            validation_results['is_valid'] = False
            validation_results['errors'].append("Vector contains infinite entries")

        # Entries below zero_tol but nonzero are silently dropped by l0
        tiny = values[(values != 0.0) & (np.abs(values) <= zero_tol)]
        if tiny.size:
            validation_results['warnings'].append(
                f"{tiny.size} nonzero entries fall under zero_tol={zero_tol}"
            )

        validation_results['stats'] = {
            'dim': int(values.size),
            'nonzero': int(np.count_nonzero(values)),
        }
        logger.debug(f"Vector validation completed: {validation_results['stats']}")

    except Exception as e:
        validation_results['is_valid'] = False
        validation_results['errors'].append(f"Validation error: {str(e)}")
        logger.error(f"Error validating vector: {str(e)}")

    return validation_results


def validate_order(k: Optional[int], dim: int, lowest: int = 0, kind: str = 'norm') -> Dict[str, Any]:
    """
    Validate a norm order k against the dimension

    Args:
        k: Order given by the caller (None when missing)
        dim: Dimension of the vector
        lowest: Smallest admissible k (0 for top-k, 1 for k-support)
        kind: Name used in messages

    Returns:
        Dictionary with validation results
    """
    validation_results = _new_results()
    if k is None:
        validation_results['is_valid'] = False
        validation_results['errors'].append(f"{kind} needs --k")
    elif not lowest <= k <= dim:
        validation_results['is_valid'] = False
        validation_results['errors'].append(f"{kind}: k={k} outside {lowest}..{dim}")
    validation_results['stats'] = {'k': k, 'dim': dim}
    return validation_results


def validate_sample_set(points: np.ndarray, dim: Optional[int] = None) -> Dict[str, Any]:
    """
    Validate a sample set before it becomes a SampledFunction

    Duplicate rows are an error (sample points must be distinct).

    Args:
        points: (n, d) array
        dim: Expected dimension, if known

    Returns:
        Dictionary with validation results
    """
    validation_results = _new_results()

    try:
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[0] == 0:
            validation_results['is_valid'] = False
            validation_results['errors'].append(f"Expected a nonempty (n, d) array, got shape {points.shape}")
            return validation_results

        if dim is not None and points.shape[1] != dim:
            validation_results['is_valid'] = False
            validation_results['errors'].append(f"Samples live in R^{points.shape[1]}, expected R^{dim}")

        if not np.isfinite(points).all():
            validation_results['is_valid'] = False
            validation_results['errors'].append("Samples contain NaN or infinite entries")

        distinct = np.unique(points, axis=0).shape[0]
        if distinct != points.shape[0]:
            validation_results['is_valid'] = False
            validation_results['errors'].append(f"Found {points.shape[0] - distinct} duplicate sample points")

        validation_results['stats'] = {
            'samples': int(points.shape[0]),
            'dim': int(points.shape[1]),
            'distinct': int(distinct),
        }
        logger.info(f"Sample set validation completed: {validation_results['stats']}")

    except Exception as e:
        validation_results['is_valid'] = False
        validation_results['errors'].append(f"Validation error: {str(e)}")
        logger.error(f"Error validating sample set: {str(e)}")

    return validation_results
