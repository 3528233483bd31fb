"""
Vector I/O Module
Handles loading of vectors and sample sets from JSON / text files, and
saving sample sets back to JSON
"""

import json
from pathlib import Path
from typing import List, Union

import numpy as np
import pandas as pd

from src.exceptions import VectorFileError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

PathLike = Union[str, Path]


def _read_json(file_path: Path):
    with open(file_path, 'r', encoding='utf-8') as handle:
        return json.load(handle)


def _read_text(file_path: Path) -> pd.DataFrame:
    # whitespace / newline separated numbers; ragged rows are padded with NaN
    return pd.read_csv(file_path, sep=r'\s+', header=None, dtype=float, comment='#')


def load_vector(file_path: PathLike) -> np.ndarray:
    """
    Load a vector from a .json array or a whitespace separated .txt file

    Args:
        file_path: Path to the vector file

    Returns:
        1-D float array with d >= 1 entries

    Raises:
        VectorFileError: If the file is missing, has an unknown extension,
            or does not hold a flat list of finite-or-infinite numbers
    """
    file_path = Path(file_path)
    try:
        logger.debug(f"Loading vector from {file_path}")
        if file_path.suffix == '.json':
            data = _read_json(file_path)
            if not isinstance(data, list) or any(isinstance(v, (list, dict, bool)) or v is None for v in data):
                raise VectorFileError(f"{file_path} must hold a flat JSON array of numbers")
            values = np.array(data, dtype=float)
        elif file_path.suffix == '.txt':
            values = _read_text(file_path).to_numpy().ravel()
            values = values[~np.isnan(values)]
        else:
            raise VectorFileError(f"Unsupported vector file extension '{file_path.suffix}' (use .json or .txt)")

        if values.size == 0:
            raise VectorFileError(f"{file_path} holds no numbers")
        if np.isnan(values).any():
            raise VectorFileError(f"{file_path} holds NaN entries")
        logger.debug(f"Loaded vector of dimension {values.size} from {file_path}")
        return values

    except VectorFileError:
        raise
    except FileNotFoundError as e:
        logger.error(f"Vector file not found at {file_path}")
        raise VectorFileError(f"Vector file not found: {file_path}") from e
    except (OSError, ValueError, TypeError, pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        logger.error(f"Error loading vector file {file_path}: {str(e)}")
        raise VectorFileError(f"Cannot parse {file_path}: {e}") from e


def load_sample_set(file_path: PathLike) -> np.ndarray:
    """
    Load a sample set: a JSON list of equal-length vectors, or a text file
    with one vector per line

    Returns:
        (n, d) float array
    """
    file_path = Path(file_path)
    try:
        logger.info(f"Loading sample set from {file_path}")
        if file_path.suffix == '.json':
            data = _read_json(file_path)
            if not isinstance(data, list) or not data or not all(isinstance(row, list) for row in data):
                raise VectorFileError(f"{file_path} must hold a nonempty JSON list of vectors")
            if len({len(row) for row in data}) != 1:
                raise VectorFileError(f"{file_path} mixes vectors of different dimensions")
            points = np.array(data, dtype=float)
        elif file_path.suffix == '.txt':
            frame = _read_text(file_path)
            if frame.isnull().values.any():
                raise VectorFileError(f"{file_path} mixes vectors of different dimensions")
            points = frame.to_numpy()
        else:
            raise VectorFileError(f"Unsupported sample file extension '{file_path.suffix}'")

        if points.ndim != 2 or points.shape[1] == 0:
            raise VectorFileError(f"{file_path} holds no vectors")
        logger.info(f"Successfully loaded {points.shape[0]} samples of dimension {points.shape[1]}")
        return points

    except VectorFileError:
        raise
    except FileNotFoundError as e:
        logger.error(f"Sample file not found at {file_path}")
        raise VectorFileError(f"Sample file not found: {file_path}") from e
    except (OSError, ValueError, TypeError, pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        logger.error(f"Error loading sample file {file_path}: {str(e)}")
        raise VectorFileError(f"Cannot parse {file_path}: {e}") from e


def save_sample_set(points: np.ndarray, file_path: PathLike) -> Path:
    """Write a sample set as a JSON list of vectors; returns the path written."""
    file_path = Path(file_path)
    rows: List[List[float]] = np.atleast_2d(np.asarray(points, dtype=float)).tolist()
    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, 'w', encoding='utf-8') as handle:
            json.dump(rows, handle)
    except OSError as e:
        logger.error(f"Error writing sample file {file_path}: {str(e)}")
        raise VectorFileError(f"Cannot write {file_path}: {e}") from e
    logger.info(f"Saved {len(rows)} samples to {file_path}")
    return file_path
