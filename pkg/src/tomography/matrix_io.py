"""
Text formats for matrices and vector sets.

Matrix format (used to dump estimators and import states):
1. Header line ``d <rows> <cols>``
2. One line per entry in row-major order: ``<re> <im>``

Vector-set format (user-supplied structured POVMs):
1. Header line ``<d> <m> <settings>``
2. m lines of 2d floats, real and imaginary parts interleaved

This module provides readers and writers for both formats.
"""

import logging
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from .exceptions import FormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_matrix(matrix: np.ndarray) -> str:
    """
    Serialize a complex matrix to the matrix text format.

    Args:
        matrix: A 2-D array (converted to complex)

    Returns:
        The formatted text, newline-terminated
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2:
        raise FormatError(f"Matrix must be 2-D, got {a.ndim}-D")
    rows, cols = a.shape
    lines = [f"d {rows} {cols}"]
    lines.extend(f"{z.real:.17g} {z.imag:.17g}" for z in a.ravel())
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, source: str = "<string>") -> np.ndarray:
    """
    Parse the matrix text format.

    Raises:
        FormatError: If the header or any entry line is malformed
    """
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise FormatError("Matrix text cannot be empty", source)

    header = lines[0].split()
    if len(header) != 3 or header[0] != "d":
        raise FormatError(f"Expected header 'd <rows> <cols>', got '{lines[0]}'", source, 1)
    try:
        rows, cols = int(header[1]), int(header[2])
    except ValueError as e:
        raise FormatError(f"Invalid matrix dimensions: {e}", source, 1)
    if rows < 1 or cols < 1:
        raise FormatError(f"Matrix dimensions must be positive, got {rows}x{cols}", source, 1)

    entries = lines[1:]
    if len(entries) != rows * cols:
        raise FormatError(f"Expected {rows * cols} entries, got {len(entries)}", source)

    values = np.empty(rows * cols, dtype=complex)
    for i, line in enumerate(entries):
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"Expected '<re> <im>', got '{line}'", source, i + 2)
        try:
            values[i] = complex(float(parts[0]), float(parts[1]))
        except ValueError as e:
            raise FormatError(f"Invalid number: {e}", source, i + 2)

    if not np.all(np.isfinite(values)):
        raise FormatError("Matrix entries must be finite", source)
    return values.reshape(rows, cols)


def save_matrix(matrix: np.ndarray, path: PathLike) -> None:
    """Write a matrix file."""
    Path(path).write_text(format_matrix(matrix))
    logger.debug(f"Wrote matrix to {path}")


def load_matrix(path: PathLike) -> np.ndarray:
    """Read a matrix file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FormatError(f"Cannot read matrix file: {e}", str(path))
    return parse_matrix(text, str(path))


def format_vector_set(vectors: np.ndarray, settings: int) -> str:
    """Serialize an (m, d) array of vectors to the vector-set format."""
    v = np.asarray(vectors, dtype=complex)
    m, d = v.shape
    lines = [f"{d} {m} {settings}"]
    for row in v:
        interleaved = np.column_stack([row.real, row.imag]).ravel()
        lines.append(" ".join(f"{x:.17g}" for x in interleaved))
    return "\n".join(lines) + "\n"


def parse_vector_set(text: str, source: str = "<string>") -> Tuple[np.ndarray, int]:
    """
    Parse the vector-set format.

    Returns:
        Tuple of (vectors as an (m, d) complex array, number of settings)

    Raises:
        FormatError: If the header or any vector line is malformed
    """
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise FormatError("Vector-set text cannot be empty", source)

    try:
        d, m, settings = (int(x) for x in lines[0].split())
    except ValueError:
        raise FormatError(f"Expected header '<d> <m> <settings>', got '{lines[0]}'", source, 1)
    if d < 1 or m < 1 or settings < 1:
        raise FormatError("Header values must be positive", source, 1)
    if m % settings != 0:
        raise FormatError(f"{m} vectors cannot be split evenly into {settings} settings", source, 1)
    if len(lines) - 1 != m:
        raise FormatError(f"Expected {m} vector lines, got {len(lines) - 1}", source)

    rows: List[np.ndarray] = []
    for i, line in enumerate(lines[1:]):
        try:
            floats = np.array([float(x) for x in line.split()])
        except ValueError as e:
            raise FormatError(f"Invalid number: {e}", source, i + 2)
        if floats.size != 2 * d:
            raise FormatError(f"Expected {2 * d} floats, got {floats.size}", source, i + 2)
        rows.append(floats[0::2] + 1j * floats[1::2])

    return np.array(rows), settings


def load_vector_set(path: PathLike) -> Tuple[np.ndarray, int]:
    """Read a vector-set file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FormatError(f"Cannot read vector-set file: {e}", str(path))
    vectors, settings = parse_vector_set(text, str(path))
    logger.debug(f"Loaded {len(vectors)} vectors in {settings} settings from {path}")
    return vectors, settings
